import numpy as np
import pytest

from decoheat import (
    LatticeSpec,
    ValidationError,
    build_perturbed,
    build_ring_hamiltonian,
    build_spectral_cache,
    fermi_occupations,
    occupation_operator,
    solve_chemical_potential,
)


def test_ring_spectrum_three_sites():
    # -Omega cos(2 pi k / 3): one level at -1, two at +1/2
    eps = np.linalg.eigvalsh(build_ring_hamiltonian(3))
    assert np.allclose(eps, [-1.0, 0.5, 0.5], atol=1e-14)


def test_ring_spectrum_four_sites():
    eps = np.linalg.eigvalsh(build_ring_hamiltonian(4))
    assert np.allclose(eps, [-1.0, 0.0, 0.0, 1.0], atol=1e-14)


def test_ring_dispersion_large():
    L = 500
    eps = np.linalg.eigvalsh(build_ring_hamiltonian(L, hopping=2.0))
    expected = np.sort(-2.0 * np.cos(2.0 * np.pi * np.arange(L) / L))
    assert np.max(np.abs(eps - expected)) < 1e-12


def test_ring_rejects_tiny_and_nonpositive():
    with pytest.raises(ValidationError):
        build_ring_hamiltonian(2)
    with pytest.raises(ValidationError):
        build_ring_hamiltonian(10, hopping=0.0)


def test_perturbed_shifts_one_site():
    h0 = build_ring_hamiltonian(6)
    h1 = build_perturbed(h0, 0.7, site=3)
    diff = h1 - h0
    assert diff[2, 2] == pytest.approx(0.7)
    diff[2, 2] = 0.0
    assert np.all(diff == 0.0)
    with pytest.raises(ValidationError):
        build_perturbed(h0, 0.7, site=7)


@pytest.mark.parametrize("temperature", [0.0, 0.05, 0.5])
def test_half_filling_has_zero_chemical_potential(temperature):
    # particle-hole symmetry of the even ring pins mu to the band centre
    eps = np.linalg.eigvalsh(build_ring_hamiltonian(500))
    mu = solve_chemical_potential(eps, temperature, 250)
    assert abs(mu) < 1e-9
    occ = fermi_occupations(eps, temperature, mu)
    assert abs(float(np.sum(occ)) - 250.0) < 1e-8


def test_occupations_step_and_zero_modes():
    eps = np.array([-1.0, 0.0, 0.0, 1.0])
    occ = fermi_occupations(eps, 0.0, 0.0)
    # the two levels exactly at mu share half an electron each
    assert np.allclose(occ, [1.0, 0.5, 0.5, 0.0])
    assert float(np.sum(occ)) == pytest.approx(2.0)


def test_occupations_limits():
    eps = np.linspace(-1.0, 1.0, 11)
    hot = fermi_occupations(eps, 1e6, 0.0)
    assert np.max(np.abs(hot - 0.5)) < 1e-6
    cold = fermi_occupations(eps, 1e-9, 0.0)
    assert np.allclose(cold[eps < 0], 1.0)
    assert np.allclose(cold[eps > 0], 0.0)
    with pytest.raises(ValidationError):
        fermi_occupations(eps, -0.1, 0.0)


def test_chemical_potential_odd_ring_zero_t():
    eps = np.sort(np.linalg.eigvalsh(build_ring_hamiltonian(5)))
    mu = solve_chemical_potential(eps, 0.0, 2)
    assert eps[1] < mu < eps[2]


def test_occupation_operator_matches_spectral_sum():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(8, 8))
    eps, u = np.linalg.eigh(a + a.T)
    f = fermi_occupations(eps, 0.3, 0.1)
    n_op = occupation_operator(u, f)
    ref = sum(fk * np.outer(u[:, k], u[:, k].conj()) for k, fk in enumerate(f))
    assert np.max(np.abs(n_op - ref)) < 1e-13


def test_spec_defaults_and_validation():
    spec = LatticeSpec(sites=6, coupling=0.5, temperature=0.1)
    assert spec.filling == 3
    assert spec.beta == pytest.approx(10.0)
    assert LatticeSpec(sites=6, temperature=0.0).beta == np.inf
    with pytest.raises(ValidationError):
        LatticeSpec(sites=2)
    with pytest.raises(ValidationError):
        LatticeSpec(sites=6, temperature=-0.1)
    with pytest.raises(ValidationError):
        LatticeSpec(sites=6, filling=6)
    with pytest.raises(ValidationError):
        LatticeSpec(sites=6, impurity_site=0)


def test_spectral_cache_consistency():
    spec = LatticeSpec(sites=10, coupling=0.8, temperature=0.2)
    cache = build_spectral_cache(spec)
    assert np.all(np.diff(cache.h0_eigenvalues) >= -1e-14)
    assert abs(cache.mu) < 1e-9
    assert abs(float(np.sum(cache.occupations)) - 5.0) < 1e-8
    # overlap between the two eigenbases is unitary
    gram = cache.overlap.conj().T @ cache.overlap
    assert np.max(np.abs(gram - np.eye(10))) < 1e-12
