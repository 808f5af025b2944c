"""Exact many-body reference for the thermodynamics of pure decoherence.

The system Hamiltonian is diagonal, H_S = sum_n eps_n |n><n|, and the
interaction commutes with it, H_SB = sum_n g_n |n><n| (x) V_n.  Each
system level n therefore conditions the bath on its own Hamiltonian

    H_n = H_B + g_n V_n,

and everything observable follows from the conditioned propagators:

  * coherences evolve as rho_S^{mn}(t) =
        exp(-i (eps_m - eps_n) t) <exp(+i H_n t) exp(-i H_m t)>_B rho_S^{mn}(0);
  * measuring the bath energy before and after (two-point measurement)
    gives, in branch n, heat atoms at w = E_j - E_k with weight
    p_k |<E_j| exp(-i H_n t_f) |E_k>|^2;
  * the mixture P(Q) = sum_n p_n P_n(Q) with p_n the initial populations.

Populations never move, so all heat is decoherence-driven.  This module
computes those objects by dense diagonalisation and is the oracle against
which the determinant engine is validated at small bath dimension.
"""

import numpy as np
from scipy.special import logsumexp

from .errors import CapacityError, NumericsError, ValidationError

DEFAULT_DIMENSION_CAP = 4096
DEFAULT_MERGE_TOL = 1e-9

_HERM_TOL = 1e-12
_COMM_TOL = 1e-12
_TRACE_TOL = 1e-12
_PSD_TOL = 1e-12
_WEIGHT_SUM_TOL = 1e-10
_DEGENERACY_GAP = 1e-10


def _require_hermitian(a, name, tol=_HERM_TOL):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("%s must be a square matrix" % name)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise ValidationError("%s is not Hermitian within %g" % (name, tol))
    return a


def _commutator_norm(a, b):
    return float(np.max(np.abs(a @ b - b @ a)))


class AtomicDistribution:
    """Normalised weighted sum of Dirac atoms on the real line.

    Atoms closer than `merge_tolerance` are coalesced (weights added, the
    merged position is the weight-averaged one).  Merging is greedy over
    sorted positions, so a chain of atoms each within tolerance of its
    neighbour collapses into one atom.
    """

    def __init__(self, values, weights, merge_tolerance=DEFAULT_MERGE_TOL,
                 require_normalized=True):
        values = np.asarray(values, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if values.shape != weights.shape:
            raise ValidationError("values and weights must have matching length")
        if values.size == 0:
            raise ValidationError("distribution needs at least one atom")
        if float(np.min(weights)) < -1e-12:
            raise ValidationError("negative atom weight %g" % float(np.min(weights)))
        weights = np.clip(weights, 0.0, None)
        total = float(np.sum(weights))
        if require_normalized and abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise NumericsError("atom weights sum to %.15g, not 1" % total)

        order = np.argsort(values, kind="stable")
        v = values[order]
        w = weights[order]
        if v.size > 1:
            starts = np.concatenate(([0], np.nonzero(np.diff(v) >= merge_tolerance)[0] + 1))
            wm = np.add.reduceat(w, starts)
            vw = np.add.reduceat(w * v, starts)
            counts = np.diff(np.concatenate((starts, [v.size])))
            vmean = np.add.reduceat(v, starts) / counts
            v = np.where(wm > 0, np.divide(vw, np.where(wm > 0, wm, 1.0)), vmean)
            w = wm
        self.values = v
        self.weights = w
        self.merge_tolerance = merge_tolerance

    @property
    def total_weight(self):
        return float(np.sum(self.weights))

    def moment(self, k):
        return float(np.sum(self.weights * self.values ** k))

    def mean(self):
        return self.moment(1)

    def weight_at(self, value, tol=None):
        """Summed weight of atoms within tol of the given position."""
        tol = self.merge_tolerance if tol is None else tol
        return float(np.sum(self.weights[np.abs(self.values - value) <= tol]))

    def characteristic(self, u):
        """sum_a w_a exp(i u v_a); u may be complex."""
        return complex(np.sum(self.weights * np.exp(1j * u * self.values)))

    def exp_average(self, rate):
        """sum_a w_a exp(-rate * v_a), the tilted average used by fluctuation relations."""
        return float(np.sum(self.weights * np.exp(-rate * self.values)))


class ConditionedHamiltonian:
    """One conditioned bath Hamiltonian H_n = H_B + g_n V_n with its eigensystem."""

    def __init__(self, level, matrix):
        self.level = level
        self.matrix = matrix
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(matrix)

    def propagator(self, t):
        """exp(-i H_n t) as a dense matrix (t may be any real number)."""
        q = self.eigenvectors
        return (q * np.exp(-1j * self.eigenvalues * t)) @ q.conj().T


class _BathBasis:
    """Bath eigenbasis with thermal weights, number-resolved if needed.

    When a chemical potential is supplied the Gibbs weights involve
    exp(-beta (E - mu N)).  H_B and the number operator commute, but a
    plain eigh of H_B may mix degenerate levels from different particle
    sectors, so the basis is built sector by sector: diagonalise N first,
    then H_B inside each (numerically clustered) N eigenspace.
    """

    def __init__(self, model):
        hb = model.bath_hamiltonian
        if model.chemical_potential is None:
            energies, vectors = np.linalg.eigh(hb)
            numbers = None
            log_gibbs = -model.beta * energies
        else:
            nop = model.number_operator
            nvals, nvecs = np.linalg.eigh(nop)
            # cluster the number spectrum; gaps below 1e-8 count as one sector
            splits = np.nonzero(np.diff(nvals) > 1e-8)[0] + 1
            blocks = np.split(np.arange(nvals.size), splits)
            energies = []
            numbers = []
            columns = []
            for idx in blocks:
                wb = nvecs[:, idx]
                hb_block = wb.conj().T @ hb @ wb
                e, q = np.linalg.eigh(0.5 * (hb_block + hb_block.conj().T))
                energies.append(e)
                numbers.append(np.full(e.size, float(np.mean(nvals[idx]))))
                columns.append(wb @ q)
            energies = np.concatenate(energies)
            numbers = np.concatenate(numbers)
            vectors = np.hstack(columns)
            log_gibbs = -model.beta * (energies - model.chemical_potential * numbers)
        log_z = logsumexp(log_gibbs)
        self.energies = energies
        self.vectors = vectors
        self.numbers = numbers
        self.log_weights = log_gibbs - log_z
        self.weights = np.exp(self.log_weights)


class DephasingModel:
    """Pure-dephasing system-bath model on an explicit finite bath space.

    :param system_energies: iterable of system level energies eps_n
    :param couplings: one (g_n, V_n) pair per level, in level order; a
        level that does not couple gets g_n = 0
    :param bath_hamiltonian: dense Hermitian H_B of dimension D
    :param beta: inverse bath temperature, finite and > 0
    :param initial_system_state: dimS x dimS density matrix rho_S(0)
    :param chemical_potential: if set, thermal weights use the
        grand-canonical exp(-beta (H_B - mu N)); requires number_operator
    :param number_operator: Hermitian N commuting with H_B and all V_n
    :param dimension_cap: refuse baths with D above this (dense
        diagonalisation cost grows as D^3)
    """

    def __init__(self, system_energies, couplings, bath_hamiltonian, beta,
                 initial_system_state, chemical_potential=None,
                 number_operator=None, dimension_cap=DEFAULT_DIMENSION_CAP):
        self.system_energies = np.asarray(system_energies, dtype=float).ravel()
        dim_s = self.system_energies.size
        if dim_s < 2:
            raise ValidationError("need at least two system levels")
        couplings = list(couplings)
        if len(couplings) != dim_s:
            raise ValidationError(
                "expected one (g, V) coupling per system level: got %d for %d levels"
                % (len(couplings), dim_s))

        self.bath_hamiltonian = _require_hermitian(bath_hamiltonian, "bath_hamiltonian")
        dim_b = self.bath_hamiltonian.shape[0]
        if dim_b > dimension_cap:
            raise CapacityError(
                "bath dimension %d exceeds the cap %d; raise dimension_cap to force"
                % (dim_b, dimension_cap))

        self.couplings = []
        for n, (g, v) in enumerate(couplings):
            v = _require_hermitian(v, "V_%d" % n)
            if v.shape[0] != dim_b:
                raise ValidationError("V_%d dimension does not match the bath" % n)
            self.couplings.append((float(g), v))

        if not (np.isfinite(beta) and beta > 0):
            raise ValidationError("beta must be finite and positive, got %s" % beta)
        self.beta = float(beta)

        rho = _require_hermitian(initial_system_state, "initial_system_state")
        if rho.shape[0] != dim_s:
            raise ValidationError("initial_system_state dimension does not match levels")
        if abs(np.trace(rho).real - 1.0) > _TRACE_TOL or abs(np.trace(rho).imag) > _TRACE_TOL:
            raise ValidationError("initial_system_state must have unit trace")
        if float(np.min(np.linalg.eigvalsh(rho))) < -_PSD_TOL:
            raise ValidationError("initial_system_state must be positive semidefinite")
        self.initial_system_state = rho.astype(complex)

        self.chemical_potential = None if chemical_potential is None else float(chemical_potential)
        self.number_operator = None
        if self.chemical_potential is not None:
            if number_operator is None:
                raise ValidationError("grand-canonical weights need a number operator")
            nop = _require_hermitian(number_operator, "number_operator")
            if nop.shape[0] != dim_b:
                raise ValidationError("number_operator dimension does not match the bath")
            scale = max(1.0, float(np.max(np.abs(self.bath_hamiltonian))))
            if _commutator_norm(self.bath_hamiltonian, nop) > _COMM_TOL * scale:
                raise ValidationError("number_operator does not commute with H_B")
            for n, (_, v) in enumerate(self.couplings):
                if _commutator_norm(v, nop) > _COMM_TOL * max(1.0, float(np.max(np.abs(v)))):
                    raise ValidationError(
                        "V_%d does not commute with the number operator; the "
                        "grand-canonical fluctuation relation would fail" % n)
            self.number_operator = nop

        self._bath_basis = None
        self._conditioned = {}

    # -- cached spectral data -------------------------------------------------

    @property
    def dim_system(self):
        return self.system_energies.size

    @property
    def bath_dimension(self):
        return self.bath_hamiltonian.shape[0]

    def level_populations(self):
        return np.real(np.diag(self.initial_system_state)).copy()

    def bath_basis(self):
        if self._bath_basis is None:
            self._bath_basis = _BathBasis(self)
        return self._bath_basis

    def conditioned_hamiltonian(self, level):
        self._check_level(level)
        if level not in self._conditioned:
            g, v = self.couplings[level]
            self._conditioned[level] = ConditionedHamiltonian(
                level, self.bath_hamiltonian + g * v)
        return self._conditioned[level]

    def _check_level(self, level):
        if not (0 <= level < self.dim_system):
            raise ValidationError(
                "level %s outside 0..%d" % (level, self.dim_system - 1))


# -- operations ---------------------------------------------------------------

def thermal_bath_state(model):
    """Gibbs state of the bare bath, exp(-beta (H_B - mu N)) / Z (mu optional)."""
    basis = model.bath_basis()
    return (basis.vectors * basis.weights) @ basis.vectors.conj().T


def coherence_overlap(model, m, n, t):
    """Bath overlap <exp(+i H_n t) exp(-i H_m t)>_B dressing element rho^{mn}.

    This is the decoherence function of the (m, n) coherence: modulus 1 at
    t = 0, and |overlap| <= 1 always since it is a thermal average of a
    product of unitaries.
    """
    model._check_level(m)
    model._check_level(n)
    rho_b = thermal_bath_state(model)
    un = model.conditioned_hamiltonian(n).propagator(-t)   # exp(+i H_n t)
    um = model.conditioned_hamiltonian(m).propagator(t)    # exp(-i H_m t)
    return complex(np.trace(un @ um @ rho_b))


def reduced_coherence(model, m, n, t):
    """Element rho_S^{mn}(t) of the reduced qubit/qudit state at time t."""
    eps = model.system_energies
    phase = np.exp(-1j * (eps[m] - eps[n]) * t)
    return phase * coherence_overlap(model, m, n, t) * model.initial_system_state[m, n]


def _branch_amplitudes(model, level, tf):
    """Matrix <E_j| exp(-i H_level tf) |E_k> in the bath eigenbasis."""
    basis = model.bath_basis()
    cond = model.conditioned_hamiltonian(level)
    prop = cond.propagator(tf)
    return basis.vectors.conj().T @ prop @ basis.vectors


def conditional_work_distribution(model, level, tf, merge_tolerance=DEFAULT_MERGE_TOL):
    """Two-point-measurement heat distribution conditioned on system level n.

    Atoms sit at w = E_j - E_k with weight p_k |<E_j|exp(-i H_n tf)|E_k>|^2,
    where p_k are the thermal weights of the bath eigenstates.
    """
    basis = model.bath_basis()
    amps = _branch_amplitudes(model, level, tf)
    prob = np.abs(amps) ** 2 * basis.weights[np.newaxis, :]
    gaps = basis.energies[:, np.newaxis] - basis.energies[np.newaxis, :]
    return AtomicDistribution(gaps.ravel(), prob.ravel(), merge_tolerance)


def mixture_heat_distribution(model, tf, merge_tolerance=DEFAULT_MERGE_TOL):
    """Unconditioned heat distribution P(Q) = sum_n p_n P_n(Q).

    Branches with zero initial population are skipped; their conditioned
    dynamics never occurs.
    """
    pops = model.level_populations()
    values = []
    weights = []
    for n, p in enumerate(pops):
        if p <= 0:
            continue
        branch = conditional_work_distribution(model, n, tf, merge_tolerance)
        values.append(branch.values)
        weights.append(p * branch.weights)
    return AtomicDistribution(
        np.concatenate(values), np.concatenate(weights), merge_tolerance)


def direct_characteristic_branch(model, level, tf, u):
    """Theta_n(u) = <e^{i H_n tf} e^{i u H_B} e^{-i H_n tf} e^{-i u H_B}>_B.

    For real u the four propagators are multiplied out and traced against
    the thermal state, a code path independent of the atomic distribution.
    For complex u that product mixes huge and tiny exponentials, so each
    term of the eigenbasis double sum is assembled with its Boltzmann
    weight folded into the exponent first (the combination
    |A_jk|^2 exp(i u (E_k - E_j) + log p_j) stays bounded on the strip
    0 <= Im u <= beta).
    """
    model._check_level(level)
    basis = model.bath_basis()
    if np.iscomplexobj(u) and u.imag != 0:
        amps = basis.vectors.conj().T @ model.conditioned_hamiltonian(level).propagator(-tf) \
            @ basis.vectors
        gaps = basis.energies[np.newaxis, :] - basis.energies[:, np.newaxis]
        exponent = 1j * u * gaps + basis.log_weights[:, np.newaxis]
        return complex(np.sum(np.abs(amps) ** 2 * np.exp(exponent)))
    u = float(np.real(u))
    rho_b = thermal_bath_state(model)
    basis_v = basis.vectors
    exp_iu = (basis_v * np.exp(1j * u * basis.energies)) @ basis_v.conj().T
    exp_miu = (basis_v * np.exp(-1j * u * basis.energies)) @ basis_v.conj().T
    cond = model.conditioned_hamiltonian(level)
    forward = cond.propagator(-tf)
    backward = cond.propagator(tf)
    return complex(np.trace(forward @ exp_iu @ backward @ exp_miu @ rho_b))


def direct_characteristic_function(model, tf, u):
    """Mixture characteristic function Theta(u) = sum_n p_n Theta_n(u)."""
    pops = model.level_populations()
    total = 0j
    for n, p in enumerate(pops):
        if p <= 0:
            continue
        total += p * direct_characteristic_branch(model, n, tf, u)
    return total


def bath_map_evolve(model, t, bath_state=None):
    """Apply the bath-side map rho -> sum_n p_n e^{-i H_n t} rho e^{+i H_n t}.

    Acts on the thermal state unless an explicit bath_state is given.  The
    map is a population-weighted mixture of unitaries: trace preserving,
    Hermiticity preserving and unital.  The thermal state itself is
    generally *not* a fixed point once the conditioned Hamiltonians differ
    from H_B, which is what lets a dephasing qubit heat the bath.
    """
    if bath_state is None:
        bath_state = thermal_bath_state(model)
    rho = _require_hermitian(bath_state, "bath_state")
    if rho.shape[0] != model.bath_dimension:
        raise ValidationError("bath_state dimension does not match the bath")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValidationError("bath_state must have unit trace")
    pops = model.level_populations()
    out = np.zeros_like(rho, dtype=complex)
    for n, p in enumerate(pops):
        if p <= 0:
            continue
        prop = model.conditioned_hamiltonian(n).propagator(t)
        out += p * (prop @ rho @ prop.conj().T)
    return out


def static_noise_overlap(model, m, n, t):
    """Coherence overlap computed as classical static phase noise.

    Requires every V_n to commute with H_B and H_B to be nondegenerate.
    Each bath eigenstate |E_j> is then an eigenstate of every g_n V_n with
    eigenvalue v_n(E_j), and the overlap reduces to the phase average

        sum_j p(E_j) exp(i (v_n(E_j) - v_m(E_j)) t),

    i.e. dephasing by a random static level shift drawn from the thermal
    distribution.  Degenerate H_B (e.g. H_B proportional to the identity)
    breaks the reduction even though the bath state is unaffected by the
    dynamics, which is why degeneracy is rejected rather than averaged over.
    """
    model._check_level(m)
    model._check_level(n)
    hb = model.bath_hamiltonian
    scale = max(1.0, float(np.max(np.abs(hb))))
    for k, (_, v) in enumerate(model.couplings):
        if _commutator_norm(v, hb) > _COMM_TOL * scale:
            raise ValidationError(
                "V_%d does not commute with H_B; static-noise reduction invalid" % k)
    basis = model.bath_basis()
    order = np.argsort(basis.energies)
    sorted_e = basis.energies[order]
    if sorted_e.size > 1 and float(np.min(np.diff(sorted_e))) <= _DEGENERACY_GAP:
        raise ValidationError(
            "H_B has degeneracies below gap %g; static-noise reduction invalid"
            % _DEGENERACY_GAP)
    g_m, v_m = model.couplings[m]
    g_n, v_n = model.couplings[n]
    vecs = basis.vectors
    shift_m = g_m * np.real(np.einsum("ij,jk,ki->i", vecs.conj().T, v_m, vecs))
    shift_n = g_n * np.real(np.einsum("ij,jk,ki->i", vecs.conj().T, v_n, vecs))
    return complex(np.sum(basis.weights * np.exp(1j * (shift_n - shift_m) * t)))
