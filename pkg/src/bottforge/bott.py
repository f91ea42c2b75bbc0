"""Diagonal (Bott) map, suspension of sampled bundles, and the squaring projection."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .clifford import GeneratorSet, membership, pseudo_residual
from .linalg_core import Subspace, tau_car

MOMENTUM = "momentum"
POSITION = "position"


@dataclass(eq=False)
class BottContext:
    """Generator data for beta_t: `gens` are the J's that survive, K drives the geodesic."""

    gens: GeneratorSet
    K: np.ndarray
    kind: str
    E_plus: Subspace
    E_minus: Subspace

    @property
    def space(self):
        return self.gens.space

    @property
    def s(self):
        """Number of surviving real generators, not counting I."""
        return self.gens.s - (1 if self.kind == MOMENTUM else 0)

    def transformed(self, U, space):
        """Same context after the bracket-preserving basis change U."""
        Ui = U.conj().T
        g = self.gens
        J = [U @ j @ Ui for j in g.J]
        gens = GeneratorSet(g.cls, g.n, space, J, list(g.flags), g.phys, list(g.labels))
        return make_context(gens, U @ self.K @ Ui, self.kind)


def _eig_i(K, sp, sign):
    # K is anti-Hermitian, so E_{+i}(K) is the (-1)-eigenspace of the Hermitian iK
    w, v = np.linalg.eigh(1j * K)
    return Subspace(v[:, sign * w < 0], sp, orthonormal=True)


def make_context(gens, K, kind=None):
    sp = gens.space
    K = np.asarray(K, dtype=complex)
    eye = np.eye(sp.dim)
    if np.abs(K @ K + eye).max() > 1e-10 or np.abs(K.conj().T @ K - eye).max() > 1e-10:
        raise ValueError("K must be unitary with K^2 = -Id")
    tk = tau_car(K, sp)
    if np.abs(tk + K).max() < 1e-10:
        found = MOMENTUM
    elif np.abs(tk - K).max() < 1e-10:
        found = POSITION
    else:
        raise ValueError("K neither preserves nor reverses the CAR bracket")
    if kind is not None and kind != found:
        raise ValueError(f"K is of {found} type, {kind} requested")
    return BottContext(gens, K, found, _eig_i(K, sp, 1), _eig_i(K, sp, -1))


def momentum_context(dctx):
    """From a (1,1) doubled context: gens = lifted J's and I, K imaginary."""
    big = dctx.big
    gens = GeneratorSet(
        big.cls, big.n, big.space, big.J[:-1], big.flags[:-1], big.phys, big.labels[:-1]
    )
    return make_context(gens, dctx.K, MOMENTUM)


def position_context(g):
    """K = J_s (real); beta maps R_s to R_{s-1} for the remaining J_1..J_{s-1}."""
    if g.s < 1:
        raise ValueError("position-type map needs at least one generator")
    gens = GeneratorSet(g.cls, g.n, g.space, g.J[:-1], g.flags[:-1], g.phys, g.labels[:-1])
    return make_context(gens, g.J[-1], POSITION)


def j_of(A):
    return 1j * (2 * A.projector - np.eye(A.ambient.dim))


def rotation(A, t, ctx):
    """exp((t pi/2) K J(A)) via the closed form; (K J(A))^2 = -Id."""
    X = ctx.K @ j_of(A)
    th = t * np.pi / 2
    return np.cos(th) * np.eye(X.shape[0]) + np.sin(th) * X


def rotation_expm(A, t, ctx):
    return sla.expm((t * np.pi / 2) * ctx.K @ j_of(A))


def check_k_symmetry(A, ctx, tol=1e-8):
    r = pseudo_residual(A, ctx.K)
    if r > tol or A.dim * 2 != A.ambient.dim:
        raise ValueError(f"subspace lacks the K pseudo-symmetry (residual {r:.2e}, dim {A.dim})")


def beta(A, t, ctx, check=True):
    if check:
        check_k_symmetry(A, ctx)
    return ctx.E_plus.apply(rotation(A, t, ctx))


def squaring_projection_on_geodesic(A, t, ctx, tol=1e-8):
    """p(beta_t(A)) = tau_car(sigma)^-1 sigma E_{+i}(K), sigma = exp((t pi/2) K J(A))."""
    if ctx.kind != MOMENTUM or ctx.s not in (2, 6):
        raise ValueError("squaring projection needs a momentum-type context with s in {2, 6}")
    m = membership(A, ctx.gens, extra=[("K", ctx.K)])
    if not m.in_Rs or m.residuals["K"] > tol:
        raise ValueError(f"input is not in R_(s+1,1): {m.residuals}")
    if not 0 <= t <= 0.5:
        raise ValueError("t must lie in [0, 1/2]")
    sigma = rotation(A, t, ctx)
    g = np.linalg.solve(tau_car(sigma, ctx.space), sigma)
    return ctx.E_plus.apply(g)


def suspend(bundle, ctx, resolution=None, check=True):
    """Sampled suspension F(k, t) = beta_t(A_k) over the suspended grid."""
    from .spaces import SampledBundle, check_bundle, suspension_space

    res = resolution or bundle.space.resolution
    if check:
        rep = check_bundle(bundle, extra=[("K", ctx.K)])
        if not rep.ok:
            raise ValueError("input bundle fails its checks: " + "; ".join(rep.failures[:5]))
    new = suspension_space(bundle.space, ctx.kind, res)
    fibers = []
    for k, t in new.origin:
        if k is None:
            fibers.append(ctx.E_plus if t == 0 else ctx.E_minus)
        else:
            fibers.append(beta(bundle.fibers[k], t, ctx, check=False))
    return SampledBundle(new, fibers, ctx.gens)


__all__ = [
    "BottContext", "make_context", "momentum_context", "position_context", "j_of",
    "rotation", "rotation_expm", "beta", "squaring_projection_on_geodesic", "suspend",
    "MOMENTUM", "POSITION",
]
