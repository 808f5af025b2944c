"""Single-particle description of the fermionic bath.

The bath is a tight-binding ring of L sites with hopping amplitude
Omega/2, so the dispersion is eps_k = -Omega*cos(2*pi*k/L).  The qubit
couples to the occupation of one site, which shifts that site's energy
by g in the conditioned Hamiltonian.  Everything downstream (determinant
engine, heat statistics) consumes the eigensystems assembled here.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# absolute tolerance (relative to the spectral scale) below which an
# eigenvalue counts as sitting exactly at the Fermi level at T = 0
_ZERO_MODE_TOL = 1e-12


def build_ring_hamiltonian(sites, hopping=1.0):
    """Dense L x L Hamiltonian of a periodic tight-binding ring.

    Matrix elements are -hopping/2 on every nearest-neighbour bond,
    including the bond closing the ring.  For sites < 3 the wrap-around
    bond coincides with the interior bond (a double bond between the
    same pair), so small rings are rejected rather than silently built
    with doubled hopping.

    :param sites: number of lattice sites L, must be >= 3
    :param hopping: bandwidth parameter Omega > 0
    :return: real symmetric (L, L) array
    """
    if int(sites) != sites or sites < 3:
        raise ValidationError(
            "ring needs at least 3 sites; for L < 3 the periodic wrap bond "
            "degenerates into a double bond between one pair of sites (L=%s)" % sites)
    if not (hopping > 0):
        raise ValidationError("hopping must be positive, got %s" % hopping)
    sites = int(sites)
    h = np.zeros((sites, sites))
    for j in range(sites):
        k = (j + 1) % sites
        h[j, k] = -0.5 * hopping
        h[k, j] = -0.5 * hopping
    return h


def build_perturbed(h0, coupling, site):
    """Conditioned single-particle Hamiltonian h1 = h0 + g |site><site|.

    :param h0: unperturbed single-particle matrix
    :param coupling: impurity strength g added to one diagonal entry
    :param site: 1-based site index, 1 <= site <= L
    """
    h0 = np.asarray(h0)
    L = h0.shape[0]
    if not (1 <= site <= L):
        raise ValidationError("impurity site %s outside 1..%d" % (site, L))
    h1 = h0.copy()
    h1[site - 1, site - 1] += coupling
    return h1


def fermi_occupations(eigenvalues, temperature, mu):
    """Fermi-Dirac occupations of the given single-particle levels.

    Written as (1 - tanh(x/2))/2 which is overflow-free for any ratio
    (eps - mu)/T.  At T = 0 the occupations are a sharp step, except that
    levels degenerate with the Fermi level itself (|eps - mu| below
    1e-12 of the spectral scale) receive occupation 1/2.  That rule keeps
    the half-filled even-L ring, whose two zero modes sit exactly at
    mu = 0, at total occupation N.
    """
    eps = np.asarray(eigenvalues, dtype=float)
    if temperature < 0:
        raise ValidationError("temperature must be >= 0, got %s" % temperature)
    if temperature == 0:
        scale = max(1.0, float(np.max(np.abs(eps)))) if eps.size else 1.0
        occ = np.where(eps < mu, 1.0, 0.0)
        occ[np.abs(eps - mu) < _ZERO_MODE_TOL * scale] = 0.5
        return occ
    return 0.5 * (1.0 - np.tanh((eps - mu) / (2.0 * temperature)))


def solve_chemical_potential(eigenvalues, temperature, filling):
    """Chemical potential mu fixing sum_k f(eps_k) = filling.

    The total occupation is monotone in mu, so plain bisection on the
    bracket [min eps - 40 T, max eps + 40 T] converges unconditionally.
    At T = 0 the midpoint between the N-th and (N+1)-th sorted level is
    returned; a degenerate shell straddling that midpoint is handled by
    fermi_occupations, which assigns it half weight.
    """
    eps = np.sort(np.asarray(eigenvalues, dtype=float))
    n_modes = eps.size
    if not (0 < filling < n_modes):
        raise ValidationError(
            "filling must satisfy 0 < N < number of modes, got N=%s of %d" % (filling, n_modes))
    if int(filling) != filling:
        raise ValidationError("filling must be an integer, got %s" % filling)
    filling = int(filling)
    if temperature < 0:
        raise ValidationError("temperature must be >= 0, got %s" % temperature)
    if temperature == 0:
        return 0.5 * (eps[filling - 1] + eps[filling])

    lo = eps[0] - 40.0 * temperature
    hi = eps[-1] + 40.0 * temperature
    scale = max(1.0, float(np.max(np.abs(eps))))
    tol = 1e-12 * scale

    def excess(mu):
        return float(np.sum(fermi_occupations(eps, temperature, mu))) - filling

    f_lo = excess(lo)
    f_hi = excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise ValidationError("chemical potential bracket failed; filling unreachable")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def occupation_operator(eigenvectors, occupations):
    """Single-particle thermal occupation matrix sum_k f_k |phi_k><phi_k|."""
    u = np.asarray(eigenvectors)
    f = np.asarray(occupations, dtype=float)
    return (u * f) @ u.conj().T


@dataclass(frozen=True)
class LatticeSpec:
    """Parameter bundle for the dephasing ring model.

    sites           number of bath sites L (>= 3)
    hopping         bandwidth Omega > 0; all energies quoted in these units
    coupling        impurity strength g felt when the qubit is in |1>
    temperature     bath temperature T >= 0
    filling         particle number N, defaults to half filling L // 2
    qubit_splitting bare qubit energy splitting (pure phase, default 0)
    impurity_site   1-based site the qubit couples to (default 1)
    """
    sites: int = 500
    hopping: float = 1.0
    coupling: float = 1.0
    temperature: float = 0.0
    filling: int = None
    qubit_splitting: float = 0.0
    impurity_site: int = 1

    def __post_init__(self):
        if self.filling is None:
            object.__setattr__(self, "filling", self.sites // 2)
        if int(self.sites) != self.sites or self.sites < 3:
            raise ValidationError("sites must be an integer >= 3, got %s" % (self.sites,))
        if not (self.hopping > 0):
            raise ValidationError("hopping must be > 0, got %s" % (self.hopping,))
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0, got %s" % (self.temperature,))
        if not (0 < self.filling < self.sites):
            raise ValidationError(
                "filling must satisfy 0 < N < L, got N=%s, L=%s" % (self.filling, self.sites))
        if not (1 <= self.impurity_site <= self.sites):
            raise ValidationError(
                "impurity_site %s outside 1..%s" % (self.impurity_site, self.sites))
        if not np.isfinite(self.coupling):
            raise ValidationError("coupling must be finite, got %s" % (self.coupling,))

    @property
    def beta(self):
        """Inverse temperature; inf at T = 0."""
        return np.inf if self.temperature == 0 else 1.0 / self.temperature


@dataclass(frozen=True)
class SpectralCache:
    """Immutable eigendata shared by every determinant evaluation.

    Holds both conditioned single-particle eigensystems, the chemical
    potential fixing <N> = filling, and the Fermi occupations of the
    unperturbed levels.  Consumers treat it as read-only; evaluations at
    different times or counting fields share one cache freely.
    """
    spec: LatticeSpec
    h0_eigenvalues: np.ndarray
    h0_eigenvectors: np.ndarray
    h1_eigenvalues: np.ndarray
    h1_eigenvectors: np.ndarray
    mu: float
    occupations: np.ndarray
    # overlap U0^dag U1 between the two eigenbases, filled in by the factory
    overlap: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        for name, u in (("h0", self.h0_eigenvectors), ("h1", self.h1_eigenvectors)):
            gram = u.conj().T @ u
            if np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-10:
                raise ValidationError("%s eigenvector matrix not unitary to 1e-10" % name)
        occ = self.occupations
        if np.min(occ) < -1e-12 or np.max(occ) > 1 + 1e-12:
            raise ValidationError("occupations outside [0, 1]")
        if abs(float(np.sum(occ)) - self.spec.filling) > 1e-8:
            raise ValidationError("occupations do not sum to the filling N")
        if self.overlap is None:
            object.__setattr__(
                self, "overlap", self.h0_eigenvectors.conj().T @ self.h1_eigenvectors)


def build_spectral_cache(spec):
    """Diagonalise h0 and h1 for the given lattice and fix mu.

    :param spec: LatticeSpec
    :return: SpectralCache
    """
    h0 = build_ring_hamiltonian(spec.sites, spec.hopping)
    h1 = build_perturbed(h0, spec.coupling, spec.impurity_site)
    eps0, u0 = np.linalg.eigh(h0)
    eps1, u1 = np.linalg.eigh(h1)
    mu = solve_chemical_potential(eps0, spec.temperature, spec.filling)
    occ = fermi_occupations(eps0, spec.temperature, mu)
    return SpectralCache(
        spec=spec,
        h0_eigenvalues=eps0,
        h0_eigenvectors=u0,
        h1_eigenvalues=eps1,
        h1_eigenvectors=u1,
        mu=mu,
        occupations=occ,
    )
