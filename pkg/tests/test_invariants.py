import numpy as np
import pytest

from bottforge import examples, invariants
from bottforge.clifford import SymmetryClass, build_generators, membership, real_class
from bottforge.linalg_core import Subspace
from bottforge.spaces import SampledBundle, constant_bundle, make_sphere

PAULI = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def spin_bundle(res, sign):
    """Line bundle of the sign-eigenvector of n.sigma over the sampled 2-sphere (class A, n = 1)."""
    M = make_sphere(0, 2, res)
    g = build_generators(SymmetryClass("A"), 1)
    fibers = []
    for p in M.points:
        H = sum(x * s for x, s in zip(p, PAULI))
        w, v = np.linalg.eigh(H)
        fibers.append(Subspace(v[:, [0 if sign < 0 else 1]], g.space, orthonormal=True))
    return SampledBundle(M, fibers, g)


def test_winding_number_of_phases():
    th = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    assert invariants.winding_number(np.exp(3j * th)).value == 3
    assert invariants.winding_number(-2 * th).value == -2
    with pytest.raises(ValueError):
        invariants.winding_number(np.exp(25j * th))


def test_winding_of_unitary_loop():
    th = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    loop = np.array([np.diag([np.exp(1j * t), np.exp(-2j * t)]) for t in th])
    assert invariants.winding_number(loop).value == -1


@pytest.mark.parametrize("res", [8, 16])
def test_chern_of_spin_half_monopole(res):
    up = invariants.chern_number(spin_bundle(res, +1))
    down = invariants.chern_number(spin_bundle(res, -1))
    assert up.value == 1 and down.value == -1


def test_chern_of_gauge_transformed_monopole(rng):
    b = spin_bundle(8, 1)
    phases = np.exp(2j * np.pi * rng.random(b.space.size))
    g = SampledBundle(b.space, [Subspace(f.frame * ph, f.ambient, orthonormal=True) for f, ph in zip(b.fibers, phases)], b.gens)
    assert invariants.chern_number(g).value == 1


def test_class_d_per_sector_detects_kitaev(kitaev32):
    res = invariants.class_d_per_sector(kitaev32.bundle, examples.diii_spin_sectors())
    for r in res.values():
        assert r.value == 1
        assert sorted(r.diagnostics["fixed_types"]) == ["inf", "zero"]
        assert r.diagnostics["oddness_residual"] < 1e-9


def test_class_d_trivial_for_constant_vacuum(kitaev32):
    b = kitaev32.bundle
    const = constant_bundle(b.space, b.fibers[b.space.fixed[0]], b.gens)
    for r in invariants.class_d_per_sector(const, examples.diii_spin_sectors()).values():
        assert r.value == 0


def test_valence_block_dimension(qsh32):
    for f in qsh32.bundle.fibers[::17]:
        assert invariants.valence_block(f).dim == 2


def test_kane_mele_trivial_constant_bundle():
    g = build_generators(real_class(2), 4)
    filled = Subspace(np.eye(8)[:, 4:], g.space, orthonormal=True)
    assert membership(filled, g).in_Rs
    b = constant_bundle(make_sphere(0, 2, 8), filled, g)
    r = invariants.kane_mele_zero_locus(b)
    assert r.value == 0 and r.diagnostics["zeros"] == []


def test_kane_mele_qsh_nontrivial(qsh32):
    r = invariants.kane_mele_zero_locus(qsh32.bundle)
    assert r.value == 1 and r.nontrivial
    M = qsh32.bundle.space
    zeros = set(r.diagnostics["zeros"])
    # both poles vanish
    assert {0, M.size - 1} <= zeros


def test_spin_chern_parity_matches_kane_mele(qsh32):
    op = examples.qsh_spin_sector_operator()
    sc = invariants.spin_chern_z2(qsh32.bundle, op)
    assert sc.value == 1
    assert sc.diagnostics["chern_up"] == -sc.diagnostics["chern_down"]


def test_total_valence_chern_vanishes(qsh32):
    r = invariants.chern_number(qsh32.bundle, lambda A: invariants.valence_block(A).frame)
    assert r.value == 0
