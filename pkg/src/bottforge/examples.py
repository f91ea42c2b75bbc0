"""The two worked constructions: class D over S^0 -> class DIII over S^1 -> class AII over S^2.

Both are built by (1,1) doubling plus the diagonal map, then moved to the
physical representation by fixed basis changes (`LAYOUT_TO_BDG_SPIN`,
`LAYOUT_TO_BDG_SPIN_PH`). Closed-form fibers are provided as independent oracles.
"""
from dataclasses import dataclass

import numpy as np

from . import bott
from .clifford import ISIGMA2, SIGMA1, SIGMA2, SIGMA3, ID2, build_generators, real_class
from .linalg_core import NambuSpace, Subspace
from .periodicity import double_11, doubled_context
from .spaces import SampledBundle, point_sphere

UP, DOWN = 0, 1
P, H = 0, 1

# C^2 (x) W(n=1) in block layout -> BdG (x) spin, basis (c_up, c_dn, c+_up, c+_dn)
LAYOUT_TO_BDG_SPIN = np.array(
    [[0, 1, 0, -1], [1, 0, 1, 0], [1, 0, -1, 0], [0, 1, 0, 1]], dtype=complex
) / np.sqrt(2)

_R = np.array([
    [0, 1, 0, 0, 0, -1, 0, 0], [1, 0, 0, 0, 1, 0, 0, 0], [1, 0, 0, 0, -1, 0, 0, 0], [0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, -1], [0, 0, 1, 0, 0, 0, 1, 0], [0, 0, 1, 0, 0, 0, -1, 0], [0, 0, 0, 1, 0, 0, 0, 1],
])
_M = np.array([
    [0, 0, 1, 0, 0, 0, 1, 0], [0, 0, 0, -1, 0, 0, 0, 1], [0, 0, 0, -1, 0, 0, 0, -1], [0, 0, 1, 0, 0, 0, -1, 0],
    [-1, 0, 0, 0, -1, 0, 0, 0], [0, 1, 0, 0, 0, -1, 0, 0], [0, 1, 0, 0, 0, 1, 0, 0], [-1, 0, 0, 0, 1, 0, 0, 0],
])
# C^2 (x) (BdG (x) spin) in block layout -> BdG (x) spin (x) ph, index bdg*4 + spin*2 + ph
LAYOUT_TO_BDG_SPIN_PH = (_R + 1j * _M) / 2


def k_alpha(alpha):
    return 1j * np.kron(SIGMA1, np.cos(alpha) * SIGMA1 + np.sin(alpha) * SIGMA3)


def qsh_operators():
    """J1, I = J2, K in the BdG (x) spin (x) ph representation."""
    J1 = np.kron(SIGMA1, np.kron(ISIGMA2, ID2))
    I = np.kron(SIGMA2, np.kron(ISIGMA2, ID2))
    K = 1j * np.kron(ID2, np.kron(SIGMA1, SIGMA1))
    return J1, I, K


@dataclass(eq=False)
class ExampleBundle:
    label: str
    bundle: SampledBundle
    closed_form: object  # angles -> frame
    context: bott.BottContext = None

    def closed_form_fibers(self):
        sp = self.bundle.gens.space
        return [Subspace(self.closed_form(*ang), sp) for ang in self.bundle.space.angles()]

    def max_closed_form_distance(self):
        return max(f.distance(g) for f, g in zip(self.bundle.fibers, self.closed_form_fibers()))


def _e(dim, i):
    v = np.zeros(dim, dtype=complex)
    v[i] = 1
    return v


def d_to_diii_closed_form(k):
    """span{ c+_sigma cos(k/2) - c_{-sigma} sin(k/2) } in the BdG (x) spin basis."""
    cols = []
    for s in (UP, DOWN):
        cols.append(np.cos(k / 2) * _e(4, 2 + s) - np.sin(k / 2) * _e(4, 1 - s))
    return np.stack(cols, axis=1)


def seed_fibers():
    """Vacuum and fully occupied lines of class D, n = 1, pushed to BdG (x) spin."""
    g0 = build_generators(real_class(0), 1)
    ctx = doubled_context(g0)
    vac = Subspace(_e(2, 0), g0.space)
    occ = Subspace(_e(2, 1), g0.space)
    sp = NambuSpace(2)
    V = LAYOUT_TO_BDG_SPIN
    return [Subspace(V @ double_11(a, ctx).frame, sp) for a in (vac, occ)], ctx


def build_d_to_diii(resolution=32, alpha=0.0):
    """Class-DIII bundle over S^1 from the S^0 seed {vacuum (base), span(c+_up, c+_dn)}."""
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    (vac, occ), _ = seed_fibers()
    gens = build_generators(real_class(1), 2)
    ctx = bott.make_context(gens, k_alpha(alpha), bott.MOMENTUM)
    seed = SampledBundle(point_sphere(), [vac, occ], gens, label="d_seed")
    out = bott.suspend(seed, ctx, resolution)
    out.label = "kitaev_d_to_diii"
    out.meta["alpha"] = alpha
    cf = d_to_diii_closed_form if alpha == 0 else None
    return ExampleBundle("kitaev_d_to_diii", out, cf, ctx)


def pair_matrix(A):
    """Z with A = span[[1],[Z]] in (annihilator, creator) blocks: the BCS pairing amplitudes."""
    n = A.ambient.n
    Uc, Vc = A.frame[:n], A.frame[n:]
    return Vc @ np.linalg.inv(Uc)


def _idx(bdg, spin, ph):
    return 4 * bdg + 2 * spin + ph


def qsh_fiber_k1(k1):
    """Reference class-s=1 fiber after the particle-hole basis change (k0 = 0)."""
    return qsh_closed_form(0.0, k1)


def qsh_closed_form(k0, k1):
    c0, s0 = np.cos(k0 / 2), np.sin(k0 / 2)
    cols = []
    for sig, eps in ((UP, 1), (DOWN, -1)):
        # a~_{k, sigma, eps}: annihilator slots
        v = np.zeros(8, dtype=complex)
        v[_idx(0, sig, P)] += np.cos(k1 / 2) * c0 - 1j * eps * np.sin(k1 / 2) * s0
        v[_idx(0, 1 - sig, H)] += 1j * eps * np.sin(k1 / 2) * c0 - np.cos(k1 / 2) * s0
        cols.append(v)
    for sig, eps in ((DOWN, -1), (UP, 1)):
        # b~+_{-k, sigma, eps}, with k1 negated and k0 kept (see ledger)
        v = np.zeros(8, dtype=complex)
        v[_idx(1, sig, H)] += np.conj(np.cos(-k1 / 2) * c0 + 1j * eps * np.sin(-k1 / 2) * s0)
        v[_idx(1, 1 - sig, P)] += np.conj(-1j * eps * np.sin(-k1 / 2) * c0 - np.cos(-k1 / 2) * s0)
        cols.append(v)
    return np.stack(cols, axis=1)


def qsh_j_of_reference(k1):
    """i sigma3_BdG (x) (Id_spin (x) sigma3_ph cos k1 + sigma2_spin (x) sigma1_ph sin k1)."""
    inner = np.kron(ID2, SIGMA3) * np.cos(k1) + np.kron(SIGMA2, SIGMA1) * np.sin(k1)
    return 1j * np.kron(SIGMA3, inner)


def lift_to_qsh(ex1):
    """(1,1)-double every DIII fiber and apply the particle-hole basis change."""
    g1 = ex1.bundle.gens
    dctx = doubled_context(g1)
    U = LAYOUT_TO_BDG_SPIN_PH
    gens = build_generators(real_class(2), 4)
    fibers = [Subspace(U @ double_11(f, dctx).frame, gens.space) for f in ex1.bundle.fibers]
    return SampledBundle(ex1.bundle.space, fibers, gens, label="qsh_reference"), dctx


def build_diii_to_aii(resolution=32):
    """Class-AII bundle over S^2 by suspending the lifted DIII bundle."""
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    ex1 = build_d_to_diii(resolution)
    ref, _ = lift_to_qsh(ex1)
    _, _, K = qsh_operators()
    ctx = bott.make_context(ref.gens, K, bott.MOMENTUM)
    out = bott.suspend(ref, ctx, resolution)
    out.label = "diii_to_aii_qsh"
    return ExampleBundle("diii_to_aii_qsh", out, qsh_closed_form, ctx)


def diii_spin_sectors():
    """(u index, v index) per spin sector: {c_{-sigma}, c+_sigma} in BdG (x) spin."""
    return {"up": (1 - UP, 2 + UP), "down": (1 - DOWN, 2 + DOWN)}


def qsh_spin_sector_operator(sign=1):
    """Diagonal selector sigma3_spin (x) sigma3_ph on the creator block; `sign` picks the sector."""
    d = np.zeros(8)
    for s in (UP, DOWN):
        for ph in (P, H):
            d[_idx(1, s, ph)] = (1 if s == UP else -1) * (1 if ph == P else -1)
    return np.diag(sign * d)


EXAMPLES = {"kitaev-diii": build_d_to_diii, "qsh": build_diii_to_aii}
