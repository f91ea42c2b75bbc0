"""Pseudo-symmetry generator sets for the Kitaev sequence and membership tests."""
from dataclasses import dataclass, field

import numpy as np

from .linalg_core import (
    NambuSpace,
    OperatorFlags,
    Subspace,
    car_annihilator,
    subspace_tol,
    tau_car,
)

CARTAN_NAMES = ("D", "DIII", "AII", "CII", "C", "CI", "AI", "BDI")
MINIMAL_MULTIPLICITY = (1, 2, 2, 4, 4, 4, 4, 8)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
ISIGMA2 = 1j * SIGMA2  # [[0, 1], [-1, 0]]
ID2 = np.eye(2, dtype=complex)

# quaternion units acting on the spin factor
SPIN_J1 = np.array([[0, 1j], [1j, 0]])
SPIN_J2 = np.array([[0, 1], [-1, 0]], dtype=complex)


@dataclass(frozen=True)
class SymmetryClass:
    kind: str  # "real", "A" or "AIII"
    s: int = 0

    def __post_init__(self):
        if self.kind == "real":
            if not 0 <= self.s <= 7:
                raise ValueError("real class index must be in 0..7")
        elif self.kind == "A":
            object.__setattr__(self, "s", 0)
        elif self.kind == "AIII":
            object.__setattr__(self, "s", 1)
        else:
            raise ValueError(f"unknown class kind {self.kind!r}")

    @property
    def is_real(self):
        return self.kind == "real"

    @property
    def name(self):
        return CARTAN_NAMES[self.s] if self.is_real else self.kind

    @property
    def multiplicity(self):
        return MINIMAL_MULTIPLICITY[self.s] if self.is_real else 1

    def __str__(self):
        return self.name


def real_class(s):
    return SymmetryClass("real", s % 8)


def parse_class(label):
    """Accept a Cartan name, 'A'/'AIII', or an integer s (or 's3')."""
    if isinstance(label, SymmetryClass):
        return label
    text = str(label).strip()
    if text in ("A", "AIII"):
        return SymmetryClass(text)
    up = text.upper()
    if up in CARTAN_NAMES:
        return real_class(CARTAN_NAMES.index(up))
    if up.startswith("S"):
        up = up[1:]
    try:
        return real_class(int(up))
    except ValueError:
        raise ValueError(f"unknown symmetry class {label!r}") from None


@dataclass(frozen=True, eq=False)
class PhysicalOps:
    """Physical symmetries on a single Nambu space (spin factor first, then band)."""

    T: np.ndarray  # anti-unitary T = T @ conj
    Q: np.ndarray
    C: np.ndarray  # anti-unitary C = C @ conj
    twist: np.ndarray
    spin: tuple  # unitary lifts of the spin-rotation generators


@dataclass(eq=False)
class GeneratorSet:
    cls: SymmetryClass
    n: int
    space: NambuSpace
    J: list
    flags: list
    phys: PhysicalOps = None
    labels: list = field(default_factory=list)

    @property
    def s(self):
        return len(self.J)

    @property
    def fermi(self):
        """Whether the Fermi constraint A(tau k) = A(k)^perp applies."""
        return self.cls is None or self.cls.is_real


def physical_ops(n, twisted=True):
    if n % 2:
        raise ValueError("time reversal needs an even number of bands (spin 1/2)")
    nb = n // 2
    eye_b = np.eye(nb)
    T = np.kron(ID2, np.kron(ISIGMA2, eye_b))
    Q = np.diag(np.r_[-np.ones(n), np.ones(n)]).astype(complex)
    if twisted:
        if nb % 2:
            raise ValueError("twisted particle-hole conjugation needs n divisible by 4")
        tw = np.kron(ID2, np.kron(SIGMA1, np.eye(nb // 2)))
    else:
        tw = np.eye(n, dtype=complex)
    z = np.zeros((n, n))
    C = np.block([[z, tw.T], [tw, z]]).astype(complex)
    spin = tuple(
        np.block([[np.kron(j.conj(), eye_b), np.zeros((n, n))], [np.zeros((n, n)), np.kron(j, eye_b)]])
        for j in (SPIN_J1, SPIN_J2)
    )
    return PhysicalOps(T, Q, C, tw, spin)


def _pseudo_from_physics(sp, ph, count):
    S = sp.S
    J1 = S @ ph.T
    out = [J1]
    if count > 1:
        out.append(1j * ph.Q @ J1)
    if count > 2:
        out.append(1j * S @ ph.C.conj() @ ph.Q)
    return out[:count]


def build_generators(cls, n):
    """Generators J_1..J_s of the pseudo-symmetries for class `cls` on n bands."""
    cls = parse_class(cls)
    m = cls.multiplicity
    if n <= 0 or n % m:
        raise ValueError(f"class {cls} needs n divisible by {m}, got {n}")
    if not cls.is_real:
        sp = NambuSpace(n)
        if cls.kind == "A":
            return GeneratorSet(cls, n, sp, [], [], None, [])
        Q = np.diag(np.r_[-np.ones(n), np.ones(n)]).astype(complex)
        return GeneratorSet(cls, n, sp, [1j * Q], [OperatorFlags(True, -1)], None, ["J3"])
    s = cls.s
    if s == 0:
        return GeneratorSet(cls, n, NambuSpace(n), [], [], None, [])
    if s <= 3:
        sp = NambuSpace(n)
        ph = physical_ops(n, twisted=s == 3)
        J = _pseudo_from_physics(sp, ph, s)
        return GeneratorSet(cls, n, sp, J, [OperatorFlags(True, -1)] * s, ph, [f"J{l + 1}" for l in range(s)])
    # s >= 4: double the spin-rotation data on W' = C^{2n'}
    nh = n // 2
    small = NambuSpace(nh)
    ph = physical_ops(nh, twisted=s == 7)
    j1, j2 = ph.spin
    pseudo = _pseudo_from_physics(small, ph, s - 4)
    big = NambuSpace(n, np.kron(ID2, small.S))
    eye = np.eye(2 * nh)
    J = [np.kron(SIGMA3, j1), np.kron(SIGMA3, j2), np.kron(SIGMA3, j2 @ j1), np.kron(ISIGMA2, eye)]
    J += [np.kron(SIGMA1, j) for j in pseudo]
    return GeneratorSet(cls, n, big, J, [OperatorFlags(True, -1)] * s, ph, [f"J{l + 1}" for l in range(s)])


@dataclass
class GeneratorReport:
    clifford: float
    unitarity: float
    bracket: float
    failures: list

    @property
    def ok(self):
        return not self.failures

    @property
    def max_residual(self):
        return max(self.clifford, self.unitarity, self.bracket)


def _norm(X):
    return float(np.linalg.norm(X, 2)) if X.size else 0.0


def verify_generator_set(g, tol=1e-12):
    dim = g.space.dim
    eye = np.eye(dim)
    failures = []
    cl = un = br = 0.0
    for a, Ja in enumerate(g.J):
        r = _norm(Ja.conj().T @ Ja - eye)
        un = max(un, r)
        if r > tol:
            failures.append(f"J{a + 1} not unitary (residual {r:.2e})")
        for b in range(a, len(g.J)):
            target = -2 * eye if a == b else 0 * eye
            r = _norm(Ja @ g.J[b] + g.J[b] @ Ja - target)
            cl = max(cl, r)
            if r > tol:
                failures.append(f"J{a + 1}, J{b + 1} break the Clifford relation (residual {r:.2e})")
        try:
            tj = tau_car(Ja, g.space)
        except np.linalg.LinAlgError:
            failures.append(f"J{a + 1} singular")
            continue
        sign = 1 if g.flags[a].is_real_car else -1
        r = _norm(tj - sign * Ja)
        br = max(br, r)
        if r > tol:
            kind = "preserve" if sign > 0 else "reverse"
            failures.append(f"J{a + 1} does not {kind} the CAR bracket (residual {r:.2e})")
    return GeneratorReport(cl, un, br, failures)


@dataclass
class Membership:
    in_Cs: bool
    in_Rs: bool
    residuals: dict


def pseudo_residual(A, J):
    """Operator norm of P_A J P_A; zero iff J A is orthogonal to A."""
    P = A.projector
    return _norm(P @ J @ P)


def membership(A, g, tol=None, extra=()):
    if A.ambient.dim != g.space.dim:
        raise ValueError("subspace and generator set live in different spaces")
    tol = 1e-9 if tol is None else tol
    res = {}
    ops = list(zip(g.labels or [f"J{l + 1}" for l in range(g.s)], g.J)) + list(extra)
    for name, J in ops:
        res[name] = pseudo_residual(A, J)
    in_cs = all(v < tol for v in res.values())
    if ops:
        in_cs = in_cs and A.dim == g.n
    if not g.fermi:
        return Membership(in_cs, None, res)
    res["fermi"] = A.distance(car_annihilator(A)) if A.dim == g.n else float("inf")
    return Membership(in_cs, in_cs and res["fermi"] < subspace_tol(), res)


def flattened_hamiltonian(A):
    return np.eye(A.ambient.dim) - 2 * A.projector


def hermitian_with_symmetries(dim, anti=(), real_bracket=None, rng=None):
    """Random Hermitian H anticommuting with every J in `anti`.

    With `real_bracket` = S, additionally enforce H = -S conj(H) S^-1 so that the
    negative eigenspace is its own CAR annihilator.
    """
    rng = np.random.default_rng(rng)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = (X + X.conj().T) / 2
    for J in anti:
        H = (H + J @ H @ J) / 2  # J^-1 = -J
    if real_bracket is not None:
        S = real_bracket
        H = (H - S @ H.conj() @ np.linalg.inv(S)) / 2
    return (H + H.conj().T) / 2


def negative_space(H, sp):
    w, v = np.linalg.eigh(H)
    return Subspace(v[:, w < 0], sp, orthonormal=True)


def random_point(g, rng=None, real=False, extra=()):
    """Random A in C_s(n) (or R_s(n) with real=True) for the generator set g."""
    ops = list(g.J) + [J for _, J in extra]
    H = hermitian_with_symmetries(g.space.dim, ops, g.space.S if real else None, rng)
    return negative_space(H, g.space)
