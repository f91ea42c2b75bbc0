"""(1,1) periodicity C_s(n) <-> C_{s+2}(2n) and the true-symmetry reduction for s >= 4."""
from dataclasses import dataclass, field

import numpy as np

from .clifford import ISIGMA2, SIGMA1, GeneratorSet, hermitian_with_symmetries, membership, negative_space, pseudo_residual
from .linalg_core import NambuSpace, OperatorFlags, Subspace, orth_complement

NULL_TOL = 1e-8


@dataclass(eq=False)
class DoubledContext:
    """Doubled space C^2 (x) W with its generator data.

    `big` holds every pseudo-symmetry of the doubled space (for (1,1) doubling:
    the lifted J's, then I, then K). `small` holds the pseudo-symmetries on
    W = E_{+i}(K); `true_syms` the symmetries that must fix the reduced space.
    """

    small: GeneratorSet
    big: GeneratorSet
    I: np.ndarray
    K: np.ndarray
    L: np.ndarray
    Pi: np.ndarray
    w_basis: np.ndarray
    true_syms: list = field(default_factory=list)

    @property
    def s(self):
        return self.small.s


def doubled_context(small):
    """(1,1) doubling: J_l -> sigma1 (x) J_l, plus I = [[0,1],[-1,0]] (x) Id and K = diag(i,-i) (x) Id."""
    big_sp = small.space.doubled()
    eye = np.eye(small.space.dim)
    I = np.kron(ISIGMA2, eye)
    K = np.kron(np.diag([1j, -1j]), eye)
    J = [np.kron(SIGMA1, j) for j in small.J] + [I, K]
    flags = [OperatorFlags(True, -1)] * small.s + [OperatorFlags(True, -1), OperatorFlags(False, -1)]
    labels = [f"J{l + 1}" for l in range(small.s)] + ["I", "K"]
    big = GeneratorSet(None, 2 * small.n, big_sp, J, flags, None, labels)
    L = 1j * I @ K
    Pi = (np.eye(big_sp.dim) - 1j * K) / 2
    B = np.kron(np.array([[1.0], [0.0]]), eye).astype(complex)
    return DoubledContext(small, big, I, K, L, Pi, B)


def spin_context(big):
    """Reduction data for a generator set with s >= 4 (K = i J1 J2 J3, I = J4)."""
    if big.cls is None or not big.cls.is_real or big.s < 4:
        raise ValueError("spin reduction needs a real class with s >= 4")
    J = big.J
    K = 1j * J[0] @ J[1] @ J[2]
    L = J[0] @ J[1] @ J[2] @ J[3]
    Pi = (np.eye(big.space.dim) - 1j * K) / 2
    nh = big.n // 2
    B = np.kron(np.array([[1.0], [0.0]]), np.eye(2 * nh)).astype(complex)
    if np.linalg.norm(Pi @ B - B) > 1e-12:
        raise ValueError("E_{+i}(K) is not the first block of the layout")
    small_sp = NambuSpace(nh, B.conj().T @ big.space.S @ B)
    true_syms = [B.conj().T @ J[l] @ B for l in range(3)]
    pseudo = [B.conj().T @ L @ J[l] @ B for l in range(3, big.s)]
    small = GeneratorSet(
        None, nh, small_sp, pseudo[1:], [OperatorFlags(True, -1)] * (big.s - 4), None,
        [f"j{l + 5}" for l in range(big.s - 4)],
    )
    ctx = DoubledContext(small, big, J[3], K, L, Pi, B, true_syms)
    ctx.j4 = pseudo[0]
    return ctx


def restricted_generators(ctx):
    """j_l = L J_l restricted to W, for the lifted J's of a (1,1) context."""
    B = ctx.w_basis
    return [B.conj().T @ ctx.L @ J @ B for J in ctx.big.J[: ctx.s]]


def _lift(F, ctx):
    B = ctx.w_basis
    Fc = orth_complement(Subspace(F, ctx.small.space, orthonormal=True)).frame
    a_half = (np.kron(np.array([[1.0], [1.0]]), np.eye(B.shape[1])) @ F) / np.sqrt(2)
    c_half = (np.kron(np.array([[1.0], [-1.0]]), np.eye(B.shape[1])) @ Fc) / np.sqrt(2)
    if np.linalg.norm(B - np.kron(np.array([[1.0], [0.0]]), np.eye(B.shape[1]))) > 1e-12:
        raise ValueError("lifting needs the block layout basis")
    return Subspace(np.hstack([a_half, c_half]), ctx.big.space, orthonormal=True)


def _check_small(a, ctx):
    m = membership(a, ctx.small)
    if not m.in_Cs:
        bad = {k: v for k, v in m.residuals.items() if k != "fermi"}
        raise ValueError(f"input fails small-set membership: {bad}, dim {a.dim}")


def double_11(a, ctx, check=True):
    if check:
        _check_small(a, ctx)
    return _lift(a.frame, ctx)


def intersect_eigenspace(A, L, sign=1, tol=NULL_TOL):
    """A cap E_{sign}(L) for a Hermitian involution L, as a null space."""
    dim = L.shape[0]
    M = (np.eye(dim) - A.projector) + (np.eye(dim) - sign * L) / 2
    w, v = np.linalg.eigh((M + M.conj().T) / 2)
    return Subspace(v[:, w < tol], A.ambient, orthonormal=True)


def _reduce(A, ctx):
    Ap = intersect_eigenspace(A, ctx.L, +1)
    Am = intersect_eigenspace(A, ctx.L, -1)
    if Ap.dim + Am.dim != A.dim:
        raise ValueError(f"A does not split along L: {Ap.dim} + {Am.dim} != {A.dim}")
    coords = ctx.w_basis.conj().T @ ctx.Pi @ Ap.frame
    return Subspace(coords, ctx.small.space)


def reduce_11(A, ctx, check=True):
    if check:
        m = membership(A, ctx.big)
        if not m.in_Cs:
            raise ValueError(f"input fails doubled-set membership: {m.residuals}")
    return _reduce(A, ctx)


def four_subspaces(A, ctx):
    """Dimensions of A and A^c intersected with E_{+1}(L) and E_{-1}(L)."""
    Ac = orth_complement(A)
    return {
        (part, sign): intersect_eigenspace(X, ctx.L, sign).dim
        for part, X in (("A", A), ("Ac", Ac))
        for sign in (1, -1)
    }


def true_symmetry_residuals(a, ctx):
    P = a.projector
    eye = np.eye(a.ambient.dim)
    return [float(np.linalg.norm((eye - P) @ j @ P, 2)) for j in ctx.true_syms]


def double_s4(a, ctx, tol=1e-9):
    res = true_symmetry_residuals(a, ctx)
    res += [pseudo_residual(a, j) for j in ctx.small.J]
    bad = [i for i, r in enumerate(res) if r > tol]
    if bad or a.dim != ctx.small.n:
        names = [f"j{i + 1}" for i in range(3)] + ctx.small.labels
        raise ValueError("reduced-space relations violated: " + ", ".join(f"{names[i]} ({res[i]:.1e})" for i in bad))
    return _lift(a.frame, ctx)


def reduce_s4(A, ctx, check=True):
    if check:
        m = membership(A, ctx.big)
        if not m.in_Cs:
            raise ValueError(f"input fails membership: {m.residuals}")
    return _reduce(A, ctx)


def vacuum_lagrangian(sp):
    """The span of the annihilators c_1..c_n, the default base point A_0."""
    n = sp.n
    return Subspace(np.eye(2 * n)[:, :n], sp, orthonormal=True)


def spin_singlet_point(ctx, rng=None):
    """A random reduced space fixed by the spin rotations and obeying the j_5.. pseudo-symmetries."""
    sp = ctx.small.space
    rng = np.random.default_rng(rng)
    H = hermitian_with_symmetries(sp.dim, ctx.small.J, sp.S, rng)
    # average over the spin group generated by j1, j2 so that H commutes with them
    for j in ctx.true_syms[:2]:
        H = (H - j @ H @ j) / 2
    return negative_space((H + H.conj().T) / 2, sp)
