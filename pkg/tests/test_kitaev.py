import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from cavitykitaev import kitaev as kt
from cavitykitaev import qops
from cavitykitaev.errors import CapacityError, ContractViolation, ShapeError, UnsupportedError

couplings = st.floats(-2.0, 2.0).filter(lambda v: abs(v) > 1e-3)


def hamiltonian(Jx, Jy, Jz, lattice, B=0.0):
    return kt.build_kitaev_hamiltonian(kt.KitaevHamiltonianSpec(kt.KitaevCouplings(Jx, Jy, Jz, B), lattice))


def spectrum(H):
    return np.linalg.eigvalsh(H.toarray())


# lattice --------------------------------------------------------------------


@pytest.mark.parametrize("L1, L2, boundary, n_sites, n_bonds, n_plaq", [
    (1, 1, "periodic", 2, 3, 0),
    (2, 2, "periodic", 8, 12, 4),
    (3, 2, "periodic", 12, 18, 6),
    (1, 1, "open", 2, 1, 0),
    (2, 2, "open", 8, 8, 0),
])
def test_lattice_counts(L1, L2, boundary, n_sites, n_bonds, n_plaq):
    lat = kt.build_lattice(L1, L2, boundary)
    assert lat.n_sites == n_sites
    assert len(lat.bonds) == n_bonds
    assert len(lat.plaquettes) == n_plaq


def test_periodic_lattice_has_one_bond_of_each_type_per_site():
    lat = kt.build_lattice(2, 2)
    for kind in "xyz":
        sites = [s for bond in lat.bonds_of_type(kind) for s in bond]
        assert sorted(sites) == list(range(lat.n_sites))


def test_open_single_cell_is_a_z_bond():
    assert kt.build_lattice(1, 1, "open").bonds == ((0, 1, "z"),)


def test_lattice_shape_errors():
    with pytest.raises(ShapeError):
        kt.build_lattice(0, 2)
    with pytest.raises(ShapeError):
        kt.build_lattice(2, 2, "twisted")


def test_large_lattice_warns_and_refuses_ed():
    with pytest.warns(RuntimeWarning, match="exact-diagonalization"):
        lat = kt.build_lattice(3, 3)
    assert lat.n_sites == 18
    with pytest.raises(CapacityError):
        hamiltonian(1.0, 1.0, 1.0, lat)


def test_relabel_keeps_geometry():
    lat = kt.build_lattice(2, 2)
    cyc = lat.relabel({"x": "y", "y": "z", "z": "x"})
    assert [(i, j) for i, j, _ in cyc.bonds] == [(i, j) for i, j, _ in lat.bonds]
    assert cyc.bonds_of_type("x") == lat.bonds_of_type("z")


# Hamiltonian ----------------------------------------------------------------


def test_pauli_string_matches_kron():
    expected = np.kron(np.kron(qops.SIGMA_X, np.eye(2)), qops.SIGMA_Y)
    assert_allclose(kt.pauli_string({0: "x", 2: "y"}, 3).toarray(), expected)
    with pytest.raises(ValueError):
        kt.pauli_string({0: "w"}, 1)


def test_single_z_bond_spectrum():
    H = hamiltonian(0.0, 0.0, 0.7, kt.build_lattice(1, 1, "open"))
    assert_allclose(spectrum(H), [-0.7, -0.7, 0.7, 0.7], atol=1e-15)


def test_field_on_two_free_spins():
    H = hamiltonian(0.0, 0.0, 0.0, kt.build_lattice(1, 1, "open"), B=0.5)
    assert_allclose(spectrum(H), [-1.0, 0.0, 0.0, 1.0], atol=1e-15)


def test_zero_couplings_give_zero_operator():
    assert hamiltonian(0.0, 0.0, 0.0, kt.build_lattice(2, 2)).norm() == 0.0


def test_non_finite_couplings_rejected():
    with pytest.raises(ContractViolation):
        kt.KitaevCouplings(1.0, np.nan, 1.0)


def test_bond_operator_needs_spin_space():
    with pytest.raises(ShapeError):
        kt.bond_operator(0, 1, "z", qops.compose([2, 3]))


def test_dimer_limit_ground_state():
    lat = kt.build_lattice(2, 2)
    info = kt.ed_ground_and_gap(hamiltonian(0.0, 0.0, 1.0, lat))
    assert_allclose(info.E0, -4.0, atol=1e-12)
    assert_allclose(info.gap, 2.0, atol=1e-12)
    assert info.degeneracy == 16


@settings(max_examples=15, deadline=None)
@given(couplings, couplings, couplings, st.floats(-5.0, 5.0))
def test_constant_offset_leaves_gap_unchanged(Jx, Jy, Jz, c):
    H = hamiltonian(Jx, Jy, Jz, kt.build_lattice(2, 2))
    a = kt.ed_ground_and_gap(H)
    b = kt.ed_ground_and_gap(H + c * qops.identity(H.space))
    assert_allclose(b.E0, a.E0 + c, atol=1e-10)
    assert_allclose(b.gap, a.gap, atol=1e-9)


@settings(max_examples=10, deadline=None)
@given(couplings, couplings, couplings)
def test_cyclic_relabelling_preserves_spectrum(Jx, Jy, Jz):
    # x -> y -> z -> x on both bonds and Pauli labels is a global spin rotation
    lat = kt.build_lattice(2, 2)
    cyc = lat.relabel({"x": "y", "y": "z", "z": "x"})
    a = spectrum(hamiltonian(Jx, Jy, Jz, lat))
    b = spectrum(hamiltonian(Jz, Jx, Jy, cyc))
    assert_allclose(a, b, atol=1e-10)


# plaquettes -----------------------------------------------------------------


@settings(max_examples=10, deadline=None)
@given(couplings, couplings, couplings)
def test_plaquettes_are_conserved(Jx, Jy, Jz):
    lat = kt.build_lattice(2, 2)
    H = hamiltonian(Jx, Jy, Jz, lat)
    W = kt.plaquette_operators(lat)
    I = qops.identity(lat.space())
    for Wp in W:
        assert qops.commutator(H, Wp).norm() < 1e-12
        assert (Wp @ Wp - I).norm() < 1e-12
        assert Wp.is_hermitian()
    for a in W:
        for b in W:
            assert qops.commutator(a, b).norm() < 1e-12


def test_field_breaks_plaquette_conservation():
    lat = kt.build_lattice(2, 2)
    H = hamiltonian(1.0, 1.0, 1.0, lat, B=0.3)
    assert max(qops.commutator(H, Wp).norm() for Wp in kt.plaquette_operators(lat)) > 0.1


def test_open_lattice_has_no_plaquette_operators():
    with pytest.raises(UnsupportedError):
        kt.plaquette_operators(kt.build_lattice(2, 2, "open"))


# Jordan-Wigner and Pfaffian oracles -----------------------------------------


def brute_ring(Jx, Jy, n):
    M = 0
    for j in range(n):
        kind, J = ("y", Jy) if j % 2 == 0 else ("x", Jx)
        M = M + J * kt.pauli_string({j: kind, (j + 1) % n: kind}, n)
    return np.linalg.eigvalsh(M.toarray())


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_jordan_wigner_ring_matches_brute_force(n):
    assert_allclose(kt.jw_ring_spectrum(0.6, 1.4, n), brute_ring(0.6, 1.4, n), atol=1e-10)


def test_jordan_wigner_ring_needs_even_sites():
    with pytest.raises(ContractViolation):
        kt.jw_ring_spectrum(1.0, 1.0, 5)


def test_strip_without_z_bonds_is_a_ring():
    H = hamiltonian(0.9, 0.4, 0.0, kt.build_lattice(2, 1))
    assert_allclose(spectrum(H), kt.jw_ring_spectrum(0.9, 0.4, 4), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_pfaffian_squares_to_determinant(m, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((2 * m, 2 * m))
    A = X - X.T
    assert_allclose(kt.pfaffian(A) ** 2, np.linalg.det(A), rtol=1e-9, atol=1e-12)


def test_pfaffian_small_cases():
    assert kt.pfaffian(np.array([[0.0, 2.5], [-2.5, 0.0]])) == 2.5
    assert kt.pfaffian(np.zeros((3, 3))) == 0.0


# free-fermion gap -----------------------------------------------------------


def test_isotropic_point_is_gapless():
    p = kt.freefermion_gap(1.0, 1.0, 1.0)
    assert p.gap < 1e-8 and p.classification == "gapless"


def test_anisotropic_point_gap():
    p = kt.freefermion_gap(0.5, 0.5, 2.0)
    assert_allclose(p.gap, 2.0, rtol=1e-12)
    assert p.classification == "gapped"


def test_coarse_grid_rejected():
    with pytest.raises(ContractViolation):
        kt.freefermion_gap(1.0, 1.0, 1.0, grid=32)


@settings(max_examples=25, deadline=None)
@given(couplings, couplings, couplings)
def test_gap_depends_only_on_magnitudes(Jx, Jy, Jz):
    ref = kt.freefermion_gap(abs(Jx), abs(Jy), abs(Jz)).gap
    assert_allclose(kt.freefermion_gap(Jx, Jy, Jz).gap, ref, atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_gap_vanishes_exactly_inside_the_triangle(Jx, Jy, Jz):
    a, b, c = sorted((Jx, Jy, Jz))
    gap = kt.freefermion_gap(Jx, Jy, Jz).gap
    # gapless iff the largest coupling does not exceed the sum of the others
    assert_allclose(gap, 2 * max(0.0, c - a - b), atol=1e-7)


def test_vortex_free_energy():
    assert_allclose(kt.vortex_free_energy_per_site(1.0, 1.0, 1.0), -0.7873, atol=1e-4)
    assert_allclose(kt.vortex_free_energy_per_site(0.0, 0.0, 1.0), -0.5, rtol=1e-14)


@pytest.mark.parametrize("L1, L2, bound", [(2, 2, 0.12), (3, 2, 0.05)])
def test_ed_energy_approaches_thermodynamic_value(L1, L2, bound):
    # finite clusters overbind: about 10% on 8 spins, under 4% on 12
    lat = kt.build_lattice(L1, L2)
    e = kt.ed_ground_and_gap(hamiltonian(1.0, 1.0, 1.0, lat)).E0 / lat.n_sites
    exact = kt.vortex_free_energy_per_site(1.0, 1.0, 1.0)
    assert e < exact
    assert abs(e - exact) / abs(exact) < bound


def test_classify_ed_gap():
    c = kt.KitaevCouplings(1.0, 1.0, 1.0)
    assert kt.classify_ed_gap(1e-4, c) == "gapless"
    assert kt.classify_ed_gap(0.5, c) == "gapped"
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert kt.classify_ed_gap(0.0, kt.KitaevCouplings(0.0, 0.0, 0.0)) == "gapless"
