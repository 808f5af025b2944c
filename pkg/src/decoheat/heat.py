"""Heat statistics assembled from the characteristic function.

Moments come from central finite differences of Theta(u) at u = 0 with one
Richardson step; the full distribution comes from Fourier inversion against
a Gaussian window.  The distribution of a finite lattice is purely atomic,
so what the inversion returns is the physical density convolved with a
Gaussian of width sigma, plus one genuinely singular piece: the elastic
atom at Q = 0, whose weight survives as the long-|u| plateau of Theta_1 and
is estimated and removed before transforming.

Every routine here takes the characteristic function as a callable
u -> Theta(u), so the same code runs against the determinant evaluator and
against the brute-force oracle.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .determinant import _map_ordered, characteristic_evaluator, \
    conditioned_propagator
from .errors import NumericsError, RangeError, ResolutionError, ValidationError
from .lattice import SpectralCache, build_spectral_cache

DEFAULT_POPULATIONS = (0.5, 0.5)

# offsets (in units of the step) and weights of the second-order central
# stencils for the first four derivatives
_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}

# a moment is real; its finite-difference estimate keeps a small imaginary
# residue that is discarded below this much and refused above it
_RESIDUE_TOL = 1e-6


def _rotated_real(refined, order):
    rotated = (-1j) ** order * refined
    if not (abs(rotated.imag) <= _RESIDUE_TOL):
        raise NumericsError(
            "moment k=%d kept an imaginary residue %.3g > %g; the evaluator "
            "returned inconsistent values" %
            (order, abs(rotated.imag), _RESIDUE_TOL))
    return float(rotated.real)


def _symmetric_samples(theta, magnitudes):
    """Evaluate theta at u >= 0 only; negative u follow by conjugation.

    Theta(-u) = conj Theta(u) holds exactly for the characteristic function
    of a real variable.  Sampling both signs instead leaves the evaluator's
    +-u asymmetry (~1e-15 from the eigensolver) in the stencils, where the
    h^-k amplification would swamp the third and fourth moments.
    """
    values = {m: complex(theta(m)) for m in magnitudes}

    def at(u):
        v = values[abs(u)]
        return v if u >= 0 else v.conjugate()

    return at


def heat_moment(theta, order, delta_u=1e-4):
    """k-th moment <Q^k> = (-i)^k d^k Theta / du^k at u = 0.

    Second-order central differences at steps delta_u and delta_u / 2 are
    combined with one Richardson step, removing the leading h^2 error.  The
    default step (in inverse energy units) balances truncation against the
    ~1e-14 noise floor of the determinant values for k <= 2; third and
    fourth moments are exposed but inherently noisier at this step size.

    :param theta: callable u -> Theta(u) for real u near 0
    :param order: moment order k in 1..4
    :param delta_u: finite-difference step
    """
    if not callable(theta):
        raise ValidationError("theta must be a callable u -> Theta(u)")
    if order not in _STENCILS:
        raise ValidationError("moment order must be in 1..4, got %s" % order)
    if not (delta_u > 0):
        raise ValidationError("delta_u must be positive")

    offsets = _STENCILS[order]
    magnitudes = {abs(o) * h for o, _ in offsets
                  for h in (delta_u, delta_u / 2)}
    at = _symmetric_samples(theta, sorted(magnitudes))

    def derivative(h):
        acc = 0j
        for o, c in offsets:
            acc += c * at(o * h)
        return acc / h ** order

    refined = (4.0 * derivative(delta_u / 2) - derivative(delta_u)) / 3.0
    return _rotated_real(refined, order)


def first_two_moments(theta, delta_u=1e-4):
    """(mean, variance) of Q from one shared set of Theta evaluations.

    The k = 1 and k = 2 stencils share the samples at 0, h/2 and h, so
    sweeping protocols gets both moments for the price of one.
    """
    if not callable(theta):
        raise ValidationError("theta must be a callable u -> Theta(u)")
    if not (delta_u > 0):
        raise ValidationError("delta_u must be positive")
    at = _symmetric_samples(theta, (0.0, delta_u / 2, delta_u))

    def derivative(order, h):
        acc = 0j
        for o, c in _STENCILS[order]:
            acc += c * at(o * h)
        return acc / h ** order

    moments = []
    for order in (1, 2):
        coarse = derivative(order, delta_u)
        fine = derivative(order, delta_u / 2)
        moments.append(_rotated_real((4.0 * fine - coarse) / 3.0, order))
    mean, second = moments
    return mean, second - mean ** 2


def first_moment_trace(cache, tf, populations=DEFAULT_POPULATIONS):
    """<Q> from the one-body trace tr[n (h0(tf) - h0)], h0(tf) Heisenberg-evolved.

    Independent of the characteristic function; used to cross-check the
    finite-difference first moment, never as the primary path.
    """
    forward = conditioned_propagator(cache, tf).conj().T  # exp(+i h1 tf)
    eps = cache.h0_eigenvalues
    evolved = np.real(np.einsum("km,m,km->k", forward, eps, forward.conj()))
    return float(populations[1] * np.sum(cache.occupations * (evolved - eps)))


def fluctuation_residual(theta, beta):
    """|Theta(i beta) - 1|: deviation from the integral fluctuation relation.

    :param theta: callable u -> Theta(u) accepting complex u
    :param beta: inverse temperature of the bath preparation
    """
    if not (np.isfinite(beta) and beta > 0):
        raise ValidationError("beta must be finite and positive, got %s" % beta)
    return abs(complex(theta(1j * beta)) - 1.0)


@dataclass(frozen=True)
class HeatDensity:
    """Gaussian-broadened heat density plus the elastic atom at Q = 0.

    `density` integrates (trapezoid) to 1 - zero_atom_weight; together they
    carry unit probability.  The kernel adds sigma^2 of spurious variance
    to the continuous part, which `variance(kernel_corrected=True)` removes.
    """
    q_grid: np.ndarray
    density: np.ndarray
    zero_atom_weight: float
    sigma: float

    def __post_init__(self):
        if self.q_grid.ndim != 1 or self.q_grid.size < 2:
            raise ValidationError("q_grid must be a 1-d array with >= 2 points")
        if not np.all(np.diff(self.q_grid) > 0):
            raise ValidationError("q_grid must be strictly increasing")
        if not (0.0 - 1e-12 <= self.zero_atom_weight <= 1.0 + 1e-12):
            raise ValidationError("zero_atom_weight outside [0, 1]")
        if not (self.sigma > 0):
            raise ValidationError("sigma must be positive")
        if float(np.min(self.density)) < -1e-9:
            raise NumericsError(
                "density dips to %g < -1e-9" % float(np.min(self.density)))
        total = self.zero_atom_weight + float(np.trapezoid(self.density, self.q_grid))
        if abs(total - 1.0) > 1e-6:
            raise NumericsError(
                "zero atom + density integral = %.8f, off unity beyond 1e-6" % total)

    def moment(self, k):
        """Raw k-th moment of the broadened density (elastic atom included)."""
        if k == 0:
            return self.zero_atom_weight + float(np.trapezoid(self.density, self.q_grid))
        return float(np.trapezoid(self.density * self.q_grid ** k, self.q_grid))

    def mean(self):
        return self.moment(1)

    def variance(self, kernel_corrected=True):
        var = self.moment(2) - self.mean() ** 2
        if kernel_corrected:
            var -= self.sigma ** 2 * (1.0 - self.zero_atom_weight)
        return var


def invert_to_density(theta, q_max, sigma, p0=0.5, points_per_sigma=4,
                      threads=None):
    """Fourier-invert the coupled-branch characteristic function.

    theta is sampled on u in [0, 8/sigma] with spacing pi / q_max; negative
    u follows by Hermitian symmetry of a real distribution.  The branch's
    own elastic weight is estimated as the mean of Re Theta over the upper
    half of the u range, where the inelastic part has decayed; the mean is
    taken over whole 2 pi periods of u so that the oscillations of
    commensurate atoms cancel exactly instead of biasing the plateau.  It
    is subtracted before the transform so only the broadened continuum is
    inverted.  The uncoupled branch contributes no heat, so its weight p0
    goes entirely into the zero atom and scales the returned density by
    1 - p0.

    :param theta: callable u -> Theta_1(u) for real u >= 0
    :param q_max: half-width of the Q grid; must cover the spectral support
    :param sigma: Gaussian broadening width (same units as Q)
    :param p0: population of the uncoupled qubit branch
    :param points_per_sigma: Q-grid resolution, grid step = sigma / this
    :return: HeatDensity on a uniform grid over [-q_max, q_max]
    """
    if not (q_max > 0 and sigma > 0):
        raise ValidationError("q_max and sigma must be positive")
    if not (0.0 <= p0 <= 1.0):
        raise ValidationError("p0 must lie in [0, 1], got %s" % p0)
    p1 = 1.0 - p0
    du = np.pi / q_max
    u_max = 8.0 / sigma
    n_u = int(np.ceil(u_max / du))
    if n_u < 8:
        raise ResolutionError(
            "only %d counting samples; decrease sigma or increase q_max" % n_u)
    u = du * np.arange(n_u + 1)

    values = np.asarray(_map_ordered(lambda x: complex(theta(x)), u, threads))
    window = np.exp(-0.5 * (u * sigma) ** 2)

    tail = np.flatnonzero(u >= 0.5 * u[-1])
    # one 2 pi period of u spans 2 q_max samples; truncating the tail to
    # whole periods makes the mean exact for integer-commensurate atoms
    period = int(round(2.0 * q_max))
    count = tail.size
    if period >= 1 and count >= period:
        count = (count // period) * period
    elastic = float(np.mean(values[tail[-count:]].real))
    elastic = min(max(elastic, 0.0), 1.0)

    dq = sigma / points_per_sigma
    n_q = int(np.ceil(q_max / dq))
    q = dq * np.arange(-n_q, n_q + 1)

    u_full = np.concatenate((-u[:0:-1], u))
    vals_full = np.concatenate((np.conj(values[:0:-1]), values))
    win_full = np.concatenate((window[:0:-1], window))
    integrand = (vals_full - elastic) * win_full
    kernel = np.exp(-1j * np.outer(u_full, q))
    rho = (du / (2.0 * np.pi)) * (integrand @ kernel)

    im_peak = float(np.max(np.abs(rho.imag)))
    re_peak = max(float(np.max(np.abs(rho.real))), np.finfo(float).tiny)
    if im_peak > 1e-9 * re_peak:
        raise NumericsError(
            "inverted density has imaginary residue %g of the real peak" %
            (im_peak / re_peak))
    density = p1 * rho.real
    zero_atom = p0 + p1 * elastic

    total = zero_atom + float(np.trapezoid(density, q))
    if abs(total - 1.0) > 1e-4:
        raise ResolutionError(
            "inversion lost probability: total %.6f; increase q_max or the "
            "counting range (smaller sigma widens it)" % total)
    return HeatDensity(q_grid=q, density=density, zero_atom_weight=zero_atom,
                       sigma=sigma)


def _von_neumann(rho):
    w = np.linalg.eigvalsh(rho)
    w = np.clip(w, 0.0, None)
    return float(-np.sum(xlogy(w, w)))


@dataclass(frozen=True)
class EntropyLedger:
    """Second-law bookkeeping for one dephasing protocol, in nats.

    sigma = delta_s + heat_flux by construction; for pure decoherence both
    pieces are separately nonnegative, which the constructor enforces.
    """
    delta_s: float
    heat_flux: float
    sigma: float

    def __post_init__(self):
        if self.delta_s < -1e-10:
            raise NumericsError(
                "system entropy change %.3g < -1e-10" % self.delta_s)
        if self.heat_flux < -1e-10:
            raise NumericsError("heat flux %.3g < -1e-10" % self.heat_flux)
        if self.sigma != self.delta_s + self.heat_flux:
            raise ValidationError("sigma must equal delta_s + heat_flux")


def entropy_ledger(nu, mean_q, beta, rho_s0):
    """EntropyLedger for a qubit whose coherence was scaled by nu.

    :param nu: decoherence function value at the protocol end (complex ok;
        only its modulus moves the entropy)
    :param mean_q: average heat absorbed by the bath
    :param beta: inverse bath temperature
    :param rho_s0: 2 x 2 initial system state
    """
    if abs(nu) > 1.0 + 1e-6:
        raise RangeError("|nu| = %.8f exceeds 1; not a decoherence value" % abs(nu))
    rho0 = np.asarray(rho_s0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ValidationError("entropy ledger expects a qubit (2 x 2) state")
    rho_t = rho0.copy()
    rho_t[1, 0] = nu * rho0[1, 0]
    rho_t[0, 1] = np.conj(nu) * rho0[0, 1]
    delta_s = _von_neumann(rho_t) - _von_neumann(rho0)
    flux = float(beta) * float(mean_q)
    return EntropyLedger(delta_s=delta_s, heat_flux=flux, sigma=delta_s + flux)


@dataclass(frozen=True)
class LongTimeHeat:
    """Windowed long-time average of <Q>(tf) with its spread."""
    value: float
    spread: float
    saturated: bool


def long_time_mean_heat(spec, window=None, samples=50, delta_u=None,
                        populations=DEFAULT_POPULATIONS, threads=None):
    """Mean of <Q>(tf) over a late-time window, reported with its spread.

    The first moment keeps oscillating at finite L, so the saturated value
    is defined as the window average.  If the sample standard deviation
    exceeds 20% of the mean's magnitude the result is flagged unsaturated
    and a warning is emitted.

    :param spec: LatticeSpec, or a prebuilt SpectralCache to reuse
    :param window: (start, stop) in time units, default (500, 1000)/hopping
    :param samples: number of evenly spaced protocol durations, >= 2
    """
    cache = spec if isinstance(spec, SpectralCache) else build_spectral_cache(spec)
    hopping = cache.spec.hopping
    if window is None:
        window = (500.0 / hopping, 1000.0 / hopping)
    start, stop = window
    if not (0 < start < stop):
        raise ValidationError("window must satisfy 0 < start < stop")
    if samples < 2:
        raise ValidationError("need at least 2 window samples")
    if delta_u is None:
        delta_u = 1e-4 / hopping
    tfs = np.linspace(start, stop, int(samples))

    def mean_at(tf):
        theta = characteristic_evaluator(cache, tf, populations)
        return heat_moment(theta, 1, delta_u)

    means = np.array(_map_ordered(mean_at, tfs, threads))
    value = float(np.mean(means))
    spread = float(np.std(means))
    saturated = spread <= 0.2 * abs(value)
    if not saturated:
        warnings.warn(
            "windowed <Q> spread %.3g exceeds 20%% of the mean %.3g; "
            "the window may predate saturation" % (spread, value))
    return LongTimeHeat(value=value, spread=spread, saturated=saturated)
