"""Numeric topological invariants of sampled bundles."""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg_core import Subspace
from .periodicity import intersect_eigenspace

INTEGER_SLACK = 0.05
LINK_TOL = 1e-8


@dataclass
class InvariantResult:
    kind: str
    value: object
    raw: float = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def nontrivial(self):
        if self.kind in ("KaneMeleZ2", "ClassD1dZ2", "SpinChernZ2"):
            return bool(self.value)
        return self.value not in (0, None)


def _integer(kind, raw, **diag):
    near = round(raw)
    value = int(near) if abs(raw - near) < INTEGER_SLACK else None
    diag["distance_to_integer"] = abs(raw - near)
    return InvariantResult(kind, value, raw, diag)


def winding_number(loop):
    """Winding of det around a closed loop of unitaries (or of a sequence of phases/complex numbers)."""
    arr = np.asarray(loop)
    if arr.ndim == 3:
        vals = np.array([np.linalg.det(m) for m in arr])
    elif np.iscomplexobj(arr):
        vals = arr
    else:
        vals = np.exp(1j * arr)
    if np.any(np.abs(vals) < LINK_TOL):
        raise ValueError("determinant vanishes on the loop")
    steps = np.angle(np.roll(vals, -1) / vals)
    if np.any(np.abs(steps) > np.pi - 1e-6):
        raise ValueError("phase jump too large between neighbors; refine the loop")
    return _integer("Winding", float(steps.sum() / (2 * np.pi)), max_step=float(np.abs(steps).max()))


def chiral_block(A, J):
    """Off-diagonal block of the flattened Hamiltonian in the eigenbasis of the chiral operator iJ."""
    w, v = np.linalg.eigh(1j * J)
    Hk = v.conj().T @ (np.eye(len(w)) - 2 * A.projector) @ v
    neg = w < 0
    return Hk[np.ix_(neg, ~neg)]


def bundle_winding(b, J=None):
    """Winding of det of the chiral block along the oriented loop of a 1-D bundle."""
    M = b.space
    if M.loop is None:
        raise ValueError("bundle must live on a sampled circle")
    J = b.gens.J[-1] if J is None else J
    blocks = [chiral_block(b.fibers[k], J) for k in M.loop]
    return winding_number(np.array([np.linalg.det(q) for q in blocks]))


def _sector_fiber(A, u, v):
    dim = A.ambient.dim
    sec = Subspace(np.stack([np.eye(dim)[u], np.eye(dim)[v]], axis=1), A.ambient, orthonormal=True)
    X = intersect_eigenspace(A, 2 * sec.projector - np.eye(dim), 1)
    if X.dim != 1:
        raise ValueError(f"fiber meets the sector in dimension {X.dim}, expected 1")
    return X.frame[u, 0], X.frame[v, 0]


def class_d_1d_invariant(b, sector=(0, 1), tol=1e-6):
    """Z2 of a one-band class-D line bundle over S^1: compare the types of z = v/u at the two fixed points.

    `sector` names the (u, v) coordinate pair; the default is the n = 1 Nambu space.
    """
    M = b.space
    if M.dim != 1 or len(M.fixed) != 2:
        raise ValueError("class-D invariant needs a circle with two fixed points")
    uv = [_sector_fiber(f, *sector) for f in b.fibers]
    types = []
    for k in M.fixed:
        u, v = uv[k]
        if abs(u) < tol:
            types.append("inf")
        elif abs(v) < tol:
            types.append("zero")
        else:
            raise ValueError(f"fixed point {k} has neither u nor v negligible")
    odd = 0.0
    for k in range(M.size):
        kt = M.tau[k]
        u, v = uv[k]
        ut, vt = uv[kt]
        if kt != k and abs(u) > tol and abs(ut) > tol:
            odd = max(odd, abs(v / u + vt / ut))
    return InvariantResult("ClassD1dZ2", int(types[0] != types[1]), None, {"fixed_types": types, "oddness_residual": odd})


def class_d_per_sector(b, sectors):
    """Class-D reduction of a spinful bundle, one result per sector."""
    return {name: class_d_1d_invariant(b, sec) for name, sec in sectors.items()}


def valence_block(A):
    """A cap V: the part of A spanned by creation operators."""
    n = A.ambient.n
    L = np.diag(np.r_[-np.ones(n), np.ones(n)])
    X = intersect_eigenspace(A, L, 1)
    return X


def sector_selector(op):
    """Selector keeping the +1 eigenspace of `op` inside the valence block."""

    def select(A):
        Vb = valence_block(A)
        F = Vb.frame
        w, v = np.linalg.eigh(F.conj().T @ op @ F)
        return F @ v[:, w > 0.5]

    return select


def chern_number(b, selector=None):
    """Lattice field-strength Chern number over the oriented faces of a sampled 2-sphere."""
    M = b.space
    if M.faces is None:
        raise ValueError("bundle must live on a sampled 2-sphere")
    select = selector or (lambda A: A.frame)
    frames = [select(f) for f in b.fibers]
    ranks = {F.shape[1] for F in frames}
    if len(ranks) != 1:
        raise ValueError(f"selected rank varies over the grid: {sorted(ranks)}")
    faces3 = [f for f in M.faces if len(f) == 3]
    faces4 = [f for f in M.faces if len(f) == 4]
    total = 0.0
    min_link = np.inf
    for group in (faces3, faces4):
        if not group:
            continue
        links = np.empty((len(group), len(group[0])), dtype=complex)
        for i, face in enumerate(group):
            for j, a in enumerate(face):
                c = face[(j + 1) % len(face)]
                links[i, j] = np.linalg.det(frames[a].conj().T @ frames[c])
        mags = np.abs(links)
        min_link = min(min_link, mags.min())
        if mags.min() < LINK_TOL:
            raise ValueError("near-zero link overlap; refine the grid")
        total += float(np.sum(_kernels.loop_phase(links / mags)))
    return _integer("Chern", total / (2 * np.pi), min_link=float(min_link))


def pfaffian(A):
    return _kernels.pfaffian(A)


def sewing_pfaffians(b, T=None):
    """Pf of m_ij = <u_i, T u_j> on the valence block at every grid point."""
    T = b.gens.phys.T if T is None else T
    mats = []
    for f in b.fibers:
        u = valence_block(f).frame
        mats.append(u.conj().T @ T @ u.conj())
    ranks = {m.shape[0] for m in mats}
    if len(ranks) != 1 or ranks.pop() % 2:
        raise ValueError("valence block is not well defined (missing charge symmetry?)")
    return np.abs(_kernels.batch_pfaffian(np.array(mats)))


def _clusters(points, adjacency):
    pts = set(points)
    seen, out = set(), []
    for p in points:
        if p in seen:
            continue
        stack, comp = [p], []
        seen.add(p)
        while stack:
            q = stack.pop()
            comp.append(q)
            for r in adjacency[q]:
                if r in pts and r not in seen:
                    seen.add(r)
                    stack.append(r)
        out.append(sorted(comp))
    return out


def _diameter(pts):
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    chord = np.sqrt((diff ** 2).sum(-1)).max()
    return float(2 * np.arcsin(min(1.0, chord / 2)))


def kane_mele_zero_locus(b, T=None, rel_threshold=1e-3):
    """Zeros of the Kane-Mele Pfaffian and the Z2 parity of zero orbits under the involution."""
    M = b.space
    pf = sewing_pfaffians(b, T)
    thr = rel_threshold * pf.max()
    zeros = [k for k in range(M.size) if pf[k] < thr]
    clusters = _clusters(zeros, M.adjacency)
    owner = {p: i for i, c in enumerate(clusters) for p in c}
    orbits = {frozenset((i, owner[M.tau[c[0]]])) for i, c in enumerate(clusters)}
    value = len(orbits) % 2
    diam = [_diameter(M.points[c]) for c in clusters]
    cell = 2 * np.pi / M.resolution if M.resolution else np.inf
    diag = {
        "zeros": zeros,
        "clusters": clusters,
        "orbits": len(orbits),
        "cluster_diameters": diam,
        "isolated": bool(all(d <= 2 * cell for d in diam)),
        "min_pf_off_zero": float(min((pf[k] for k in range(M.size) if k not in owner), default=np.nan)),
        "max_pf": float(pf.max()),
    }
    return InvariantResult("KaneMeleZ2", value, None, diag)


def pfaffian_zero_locus(b, T=None, rel_threshold=1e-3):
    res = kane_mele_zero_locus(b, T, rel_threshold)
    return InvariantResult("PfaffianZeroLocus", res.diagnostics["zeros"], None, res.diagnostics)


def spin_chern_z2(b, sector_op):
    """Z2 from the parity of the Chern number of one spin sector; both sectors are reported."""
    up = chern_number(b, sector_selector(sector_op))
    down = chern_number(b, sector_selector(-sector_op))
    if up.value is None or down.value is None:
        return InvariantResult("SpinChernZ2", None, up.raw, {"chern_up": up.raw, "chern_down": down.raw})
    return InvariantResult("SpinChernZ2", up.value % 2, up.raw,
                           {"chern_up": up.value, "chern_down": down.value})
