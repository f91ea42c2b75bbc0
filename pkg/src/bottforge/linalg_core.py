"""Nambu-space linear algebra: CAR bracket, Hermitian product, gamma, complements."""
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

DEFAULT_TOL = 1e-9
RANK_TOL = 1e-8


def subspace_tol():
    """Projector-distance tolerance; BOTTFORGE_TOL overrides the default."""
    raw = os.environ.get("BOTTFORGE_TOL")
    if raw:
        try:
            return float(raw)
        except ValueError:
            pass
    return DEFAULT_TOL


def standard_bracket(n):
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, eye], [eye, z]]).astype(complex)


@dataclass(frozen=True, eq=False)
class NambuSpace:
    """W = C^{2n}, ordered (c_1..c_n, c†_1..c†_n).

    `S` realizes {w, w'} = w^T S w'. Doubled spaces pass kron(I2, S).
    """

    n: int
    S: np.ndarray = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        S = standard_bracket(self.n) if self.S is None else np.asarray(self.S, dtype=complex)
        if S.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"bracket matrix has shape {S.shape}, expected {(2 * self.n,) * 2}")
        if np.abs(S - S.T).max(initial=0) > 1e-12:
            raise ValueError("bracket matrix is not symmetric")
        if np.abs(S @ S.conj() - np.eye(2 * self.n)).max(initial=0) > 1e-12:
            raise ValueError("bracket matrix does not satisfy S conj(S) = Id")
        object.__setattr__(self, "S", S)

    @property
    def dim(self):
        return 2 * self.n

    def doubled(self):
        return NambuSpace(2 * self.n, np.kron(np.eye(2), self.S))

    def __eq__(self, other):
        return isinstance(other, NambuSpace) and self.n == other.n and np.allclose(self.S, other.S)

    __hash__ = None


def orthonormalize(M, tol=RANK_TOL):
    """Orthonormal frame for the column span of M (pivoted QR, numerical rank)."""
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    Q, R, _ = sla.qr(M, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    scale = max(d[0], 1.0) if d.size else 1.0
    rank = int(np.sum(d > tol * scale))
    return Q[:, :rank]


class Subspace:
    """A complex subspace stored as an orthonormal frame."""

    __slots__ = ("frame", "ambient", "_proj")

    def __init__(self, frame, ambient, orthonormal=False):
        frame = np.asarray(frame, dtype=complex)
        if frame.ndim == 1:
            frame = frame[:, None]
        if frame.shape[0] != ambient.dim:
            raise ValueError(f"frame has {frame.shape[0]} rows, ambient dimension is {ambient.dim}")
        self.frame = frame if orthonormal else orthonormalize(frame)
        self.ambient = ambient
        self._proj = None

    @property
    def dim(self):
        return self.frame.shape[1]

    @property
    def projector(self):
        if self._proj is None:
            self._proj = self.frame @ self.frame.conj().T
        return self._proj

    def distance(self, other):
        _check_same(self, other)
        return float(np.linalg.norm(self.projector - other.projector))

    def equals(self, other, tol=None):
        return self.distance(other) < (subspace_tol() if tol is None else tol)

    def apply(self, M):
        """Image of the subspace under the matrix M, re-orthonormalized."""
        return Subspace(np.asarray(M) @ self.frame, self.ambient)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient.dim})"


def _check_same(a, b):
    if a.ambient.dim != b.ambient.dim:
        raise ValueError("subspaces live in different ambient spaces")


def _check_vec(w, sp):
    w = np.asarray(w, dtype=complex)
    if w.shape[0] != sp.dim:
        raise ValueError(f"vector length {w.shape[0]} does not match 2n = {sp.dim}")
    return w


def car_bracket(w, w2, sp):
    w = _check_vec(w, sp)
    w2 = _check_vec(w2, sp)
    return w.T @ sp.S @ w2


def hermitian_product(w, w2):
    return np.vdot(w, w2)


def gamma(w, sp):
    return sp.S @ np.conj(_check_vec(w, sp))


def gamma_subspace(A):
    return Subspace(A.ambient.S @ A.frame.conj(), A.ambient, orthonormal=True)


def full_space(sp):
    return Subspace(np.eye(sp.dim, dtype=complex), sp, orthonormal=True)


def zero_space(sp):
    return Subspace(np.zeros((sp.dim, 0), dtype=complex), sp, orthonormal=True)


def orth_complement(A):
    F = A.frame
    if F.shape[1] == 0:
        return full_space(A.ambient)
    U, s, _ = np.linalg.svd(F, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL))
    return Subspace(U[:, rank:], A.ambient, orthonormal=True)


def car_annihilator(A):
    # gamma maps A^c onto A^perp, which avoids a null-space solve
    return gamma_subspace(orth_complement(A))


def car_transpose(X, sp):
    X = np.asarray(X, dtype=complex)
    if X.shape != (sp.dim, sp.dim):
        raise ValueError("operator shape does not match ambient space")
    return np.linalg.solve(sp.S, X.T @ sp.S)


def tau_car(g, sp):
    g = np.asarray(g, dtype=complex)
    if np.linalg.cond(g) > 1e12:
        raise np.linalg.LinAlgError("tau_car needs an invertible operator")
    return car_transpose(np.linalg.inv(g), sp)


def is_real_car(X, sp, tol=1e-10):
    """True when X preserves the bracket (tau_car(X) = X)."""
    return np.abs(tau_car(X, sp) - X).max() < tol


@dataclass(frozen=True)
class OperatorFlags:
    is_real_car: bool
    squares_to: int


def operator_flags(X, sp):
    X = np.asarray(X, dtype=complex)
    sq = X @ X
    eye = np.eye(sp.dim)
    if np.abs(sq + eye).max() < 1e-10:
        squares = -1
    elif np.abs(sq - eye).max() < 1e-10:
        squares = 1
    else:
        raise ValueError("operator squares to neither +Id nor -Id")
    return OperatorFlags(is_real_car(X, sp), squares)


@dataclass(frozen=True, eq=False)
class ModifiedCar:
    u0: np.ndarray
    space: NambuSpace

    def bracket(self, w, w2):
        return car_bracket(self.u0 @ w, self.u0 @ w2, self.space)

    def tau(self, X):
        """Modified involution: conjugate tau_car by IK."""
        IK = self._ik
        return IK @ tau_car(X, self.space) @ np.linalg.inv(IK)

    @property
    def _ik(self):
        # u0 = (Id - IK)/sqrt2  =>  IK = Id - sqrt2 u0
        return np.eye(self.space.dim) - np.sqrt(2) * self.u0


def modified_car(sp, I, K, tol=1e-10):
    I = np.asarray(I, dtype=complex)
    K = np.asarray(K, dtype=complex)
    eye = np.eye(sp.dim)
    problems = []
    if np.abs(I @ I + eye).max() > tol or np.abs(K @ K + eye).max() > tol:
        problems.append("generators must square to -Id")
    if np.abs(I @ K + K @ I).max() > tol:
        problems.append("I and K must anticommute")
    if not is_real_car(I, sp, tol):
        problems.append("I must preserve the bracket")
    if np.abs(tau_car(K, sp) + K).max() > tol:
        problems.append("K must reverse the bracket")
    if problems:
        raise ValueError("; ".join(problems))
    u0 = (eye - I @ K) / np.sqrt(2)
    return ModifiedCar(u0, sp)
