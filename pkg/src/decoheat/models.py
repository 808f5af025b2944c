"""Ready-made dephasing models used for cross-validation.

`lattice_dephasing_model` lifts the single-particle ring of lattice.py to
the full Fock space so the determinant engine can be checked against the
exact many-body treatment.  `angular_momentum_counterexample` is the
standard demonstration that an *unchanged* bath state does not imply an
unchanged qubit: with H_B proportional to the identity the thermal state
is maximally mixed and invariant under any conditioned unitary, yet the
coherence still decays because the two conditioned propagators differ.
"""

import numpy as np

from .dephasing import DEFAULT_DIMENSION_CAP, DephasingModel
from .errors import ValidationError
from .fock import fock_dimension, many_body_bilinear, site_number_operator, \
    total_number_operator
from .lattice import build_ring_hamiltonian, solve_chemical_potential

PLUS_STATE = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)


def lattice_dephasing_model(spec, ensemble="grand", dimension_cap=DEFAULT_DIMENSION_CAP):
    """Exact Fock-space model of the qubit-on-a-ring dephasing problem.

    The qubit state |1> shifts the impurity site energy by g, so the two
    conditioned bath Hamiltonians are the free ring and the ring with one
    impurity.  The initial qubit state is |+><+| (equal populations, which
    is what a Ramsey sequence prepares).

    :param spec: LatticeSpec; temperature must be > 0 (the Gibbs weights
        need a finite beta)
    :param ensemble: "grand" fixes the chemical potential so that
        <N> = spec.filling, matching the occupation-function determinant
        formulas mode for mode; "canonical" drops mu entirely and weights
        by exp(-beta H_B) on the whole Fock space (useful as a contrast,
        but it does not reproduce the determinant engine at finite L)
    :param dimension_cap: guard on the 2**L Fock dimension
    """
    if spec.temperature <= 0:
        raise ValidationError(
            "the many-body oracle needs T > 0; got T=%s" % spec.temperature)
    if ensemble not in ("grand", "canonical"):
        raise ValidationError("ensemble must be 'grand' or 'canonical'")
    fock_dimension(spec.sites, cap=dimension_cap)

    h0 = build_ring_hamiltonian(spec.sites, spec.hopping)
    bath_h = many_body_bilinear(h0)
    impurity = site_number_operator(spec.sites, spec.impurity_site)
    beta = 1.0 / spec.temperature

    mu = None
    nop = None
    if ensemble == "grand":
        eps0 = np.linalg.eigvalsh(h0)
        mu = solve_chemical_potential(eps0, spec.temperature, spec.filling)
        nop = total_number_operator(spec.sites)

    half = 0.5 * spec.qubit_splitting
    return DephasingModel(
        system_energies=(-half, +half),
        couplings=[(0.0, impurity), (spec.coupling, impurity)],
        bath_hamiltonian=bath_h,
        beta=beta,
        initial_system_state=PLUS_STATE,
        chemical_potential=mu,
        number_operator=nop,
        dimension_cap=dimension_cap,
    )


def angular_momentum_counterexample(coupling=1.0, beta=1.0):
    """Spin-1 bath with H_B = L^2 and conditioned couplings L_x, L_y.

    H_B = L^2 = 2 * identity on the triplet, so the thermal state is I/3 at
    any temperature and is left strictly invariant by the conditioned
    evolutions.  The coherence overlap Tr[e^{i g L_y t} e^{-i g L_x t}]/3
    still drops below 1: decoherence without any bath-state change.  The
    degeneracy of H_B also makes this model fail the static-noise
    preconditions on purpose.
    """
    sq = 1.0 / np.sqrt(2.0)
    lx = sq * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    ly = sq * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    l_squared = 2.0 * np.eye(3, dtype=complex)
    return DephasingModel(
        system_energies=(0.0, 0.0),
        couplings=[(coupling, lx), (coupling, ly)],
        bath_hamiltonian=l_squared,
        beta=beta,
        initial_system_state=PLUS_STATE,
    )
