"""Sampled spheres S^{dx,dk} with involution, and sampled classifying maps over them."""
from dataclasses import dataclass, field

import numpy as np

from .clifford import membership
from .linalg_core import Subspace, car_annihilator

DEFAULT_RESOLUTION = 32
CONTINUITY_THRESHOLD = 0.5


@dataclass(eq=False)
class MomentumSpace:
    dx: int
    dk: int
    points: np.ndarray
    tau: np.ndarray
    base: int
    adjacency: list
    resolution: int = 0
    kinds: tuple = ()
    origin: list = None  # per point (parent index or None for a pole, t)
    parent: "MomentumSpace" = None
    loop: list = None
    faces: list = None

    @property
    def dim(self):
        return self.dx + self.dk

    @property
    def size(self):
        return len(self.points)

    @property
    def fixed(self):
        return [i for i in range(self.size) if self.tau[i] == i]

    def angles(self):
        """(k,) on a circle, (k0, k1) on a 2-sphere: latitude of the last suspension, then longitude."""
        p = self.points
        if self.dim == 1:
            return np.arctan2(p[:, 1], p[:, 0])[:, None]
        if self.dim == 2:
            k1 = np.arctan2(p[:, 1], p[:, 0])
            k0 = np.arctan2(p[:, 2], np.hypot(p[:, 0], p[:, 1]))
            return np.stack([k0, k1], axis=1)
        raise ValueError("angles are defined for dimensions 1 and 2")


def point_sphere():
    return MomentumSpace(0, 0, np.array([[-1.0], [1.0]]), np.array([0, 1]), 0, [[], []])


def suspension_space(M, kind, resolution):
    """Suspension of M along t in [0, 1]; momentum type reverses t under the involution."""
    if kind not in ("momentum", "position"):
        raise ValueError(f"unknown suspension kind {kind!r}")
    if resolution < 4 or resolution % 4:
        raise ValueError("resolution must be a positive multiple of 4 so that t = 1/2 is sampled")
    nt = resolution // 2 + 1
    ts = np.linspace(0.0, 1.0, nt)
    N = M.size
    last = 1 + (nt - 2) * N

    def idx(k, i):
        if i == 0:
            return 0
        if i == nt - 1:
            return last
        return 1 + (i - 1) * N + k

    origin = [(None, 0.0)]
    pts = [np.r_[np.zeros(M.points.shape[1]), -1.0]]
    for i in range(1, nt - 1):
        for k in range(N):
            origin.append((k, float(ts[i])))
            pts.append(np.r_[np.sin(np.pi * ts[i]) * M.points[k], -np.cos(np.pi * ts[i])])
    origin.append((None, 1.0))
    pts.append(np.r_[np.zeros(M.points.shape[1]), 1.0])

    momentum = kind == "momentum"
    tau = np.empty(last + 1, dtype=int)
    tau[0], tau[last] = (last, 0) if momentum else (0, last)
    for i in range(1, nt - 1):
        for k in range(N):
            tau[idx(k, i)] = idx(M.tau[k], nt - 1 - i if momentum else i)

    adj = [set() for _ in range(last + 1)]

    def link(a, b):
        if a != b:
            adj[a].add(b)
            adj[b].add(a)

    for k in range(N):
        for i in range(nt - 1):
            link(idx(k, i), idx(k, i + 1))
        for k2 in M.adjacency[k]:
            for i in range(1, nt - 1):
                link(idx(k, i), idx(k2, i))

    loop = faces = None
    if M.dim == 0:
        # increasing polar angle, starting at the south pole
        loop = [0] + [idx(1, i) for i in range(1, nt - 1)] + [last] + [idx(0, i) for i in range(nt - 2, 0, -1)]
    elif M.loop is not None:
        faces = []
        L = M.loop
        for j in range(len(L)):
            a, b = L[j], L[(j + 1) % len(L)]
            for i in range(nt - 1):
                quad = [idx(a, i), idx(b, i), idx(b, i + 1), idx(a, i + 1)]
                face = [v for m, v in enumerate(quad) if v != quad[m - 1]]
                faces.append(face)

    return MomentumSpace(
        M.dx + (0 if momentum else 1),
        M.dk + (1 if momentum else 0),
        np.array(pts),
        tau,
        idx(M.base, (nt - 1) // 2),
        [sorted(a) for a in adj],
        resolution,
        M.kinds + (kind,),
        origin,
        M,
        loop,
        faces,
    )


def sphere_from_kinds(kinds, resolution=DEFAULT_RESOLUTION):
    M = point_sphere()
    for kind in kinds:
        M = suspension_space(M, kind, resolution)
    return M


def make_sphere(dx, dk, resolution=DEFAULT_RESOLUTION):
    """S^{dx,dk}: dx position-type then dk momentum-type suspensions of S^0."""
    if dx < 0 or dk < 0:
        raise ValueError("dx and dk must be non-negative")
    return sphere_from_kinds(("position",) * dx + ("momentum",) * dk, resolution)


@dataclass(eq=False)
class SampledBundle:
    space: MomentumSpace
    fibers: list
    gens: object
    base_value: Subspace = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.fibers) != self.space.size:
            raise ValueError("one fiber per sample point is required")
        if self.base_value is None:
            self.base_value = self.fibers[self.space.base]

    def frames(self):
        return [f.frame for f in self.fibers]


@dataclass
class BundleReport:
    equivariance: float
    membership: float
    base: float
    continuity: float
    failures: list
    bad_points: list

    @property
    def ok(self):
        return not self.failures


def check_bundle(b, tol=None, continuity=CONTINUITY_THRESHOLD, extra=()):
    tol = 1e-9 if tol is None else tol
    M = b.space
    failures, bad = [], set()
    eq = 0.0
    if b.gens.fermi:
        perps = [car_annihilator(f) for f in b.fibers]
        for k in range(M.size):
            r = b.fibers[M.tau[k]].distance(perps[k])
            eq = max(eq, r)
            if r > tol:
                bad.add(k)
                failures.append(f"equivariance fails at point {k} (distance {r:.2e})")
    mem = 0.0
    for k, f in enumerate(b.fibers):
        m = membership(f, b.gens, tol=tol, extra=extra)
        r = max([v for key, v in m.residuals.items() if key != "fermi"], default=0.0)
        mem = max(mem, r)
        if not m.in_Cs:
            bad.add(k)
            failures.append(f"fiber {k} fails membership (residual {r:.2e}, dim {f.dim})")
    base = b.fibers[M.base].distance(b.base_value)
    if base > tol:
        failures.append(f"base point not anchored (distance {base:.2e})")
    cont = 0.0
    for k, nb in enumerate(M.adjacency):
        for k2 in nb:
            if k2 > k:
                d = float(np.linalg.norm(b.fibers[k].projector - b.fibers[k2].projector, 2))
                cont = max(cont, d)
    if cont > continuity:
        failures.append(f"neighbor fibers differ by {cont:.3f} > {continuity} (refine the grid)")
    return BundleReport(eq, mem, base, cont, failures, sorted(bad))


def constant_bundle(space, A, gens):
    return SampledBundle(space, [A] * space.size, gens)
