"""Functional-determinant evaluation of decoherence and heat statistics.

For a quadratic bath in a Gaussian (grand-canonical) state, thermal traces
of products of exponentials of bilinears reduce to L x L determinants over
the single-particle space:

    nu(t)      = det[ 1 - n + n e^{+i h0 t} e^{-i h1 t} ]
    Theta_1(u) = det[ 1 - n + n e^{+i h1 tf} e^{+i u h0} e^{-i h1 tf} e^{-i u h0} ]

with n = (exp(beta (h0 - mu)) + 1)^(-1).  Everything here works in the h0
eigenbasis, where n is diagonal with entries f_k and the counting factors
exp(+-i u h0) are diagonal too.

Real parameters keep every factor unitary, so a single LU determinant is
stable no matter how small |nu| gets (the log-magnitude and phase are
accumulated from the pivots).  Imaginary counting fields u = i v are a
different story: assembling the product head-on mixes entries of size
exp(+-v eps) with the order-one Fermi terms and the determinant's value is
lost to rounding long before anything overflows.  The cure is to pair the
Gibbs weights with the counting exponentials analytically and regroup the
determinant into manifestly positive form,

    Theta_1(iv) = prod_k f_k e^{v eps_k} * det[ C^2 + B B^dag ],

where B carries the counting scales as exact column scalings of the
unitary propagator and C is diagonal.  C^2 + B B^dag is the Gram matrix
of [B | C], so its determinant is read off the pivots of one QR
factorisation: scales hundreds of orders of magnitude apart multiply in
log space instead of being added, and the fluctuation identity
Theta(i beta) = 1 holds to ~1e-12 even at beta * bandwidth = 100.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericsError, RangeError, ValidationError

# largest exponent fed to exp() before raising instead of overflowing
_EXP_LIMIT = 709.0


@dataclass(frozen=True)
class DeterminantValue:
    """One determinant evaluation: complex value plus (log|.|, phase).

    The log-magnitude stays meaningful far below the underflow threshold
    of the plain value (|nu| ~ 1e-320 and smaller).  A determinant that is
    singular to working precision reports log_magnitude = -inf and
    phase_reliable = False instead of raising.
    """
    value: complex
    log_magnitude: float
    phase: float
    phase_reliable: bool = True


def _from_slogdet(sign, log_abs):
    if sign == 0:
        return DeterminantValue(0j, -np.inf, 0.0, phase_reliable=False)
    phase = float(np.angle(sign))
    with np.errstate(over="ignore", under="ignore"):
        value = complex(np.exp(log_abs) * sign)
    return DeterminantValue(value, float(log_abs), phase)


def conditioned_propagator(cache, t):
    """exp(-i h1 t) expressed in the h0 eigenbasis."""
    r = cache.overlap
    return (r * np.exp(-1j * cache.h1_eigenvalues * t)) @ r.conj().T


def decoherence_function(cache, t, propagator=None):
    """Decoherence function nu(t) of the coupled coherence.

    :param cache: SpectralCache of the lattice
    :param t: time (units of 1/hopping)
    :param propagator: optional precomputed conditioned_propagator(cache, t)
    :return: DeterminantValue; .value is nu(t)
    """
    f = cache.occupations
    if propagator is None:
        propagator = conditioned_propagator(cache, t)
    m = np.exp(1j * cache.h0_eigenvalues * t)[:, np.newaxis] * propagator
    mat = f[:, np.newaxis] * m
    mat[np.diag_indices_from(mat)] += 1.0 - f
    return _from_slogdet(*np.linalg.slogdet(mat))


def _theta_branch_real(cache, u, forward):
    """Direct determinant for real counting field u (all factors unitary)."""
    eps = cache.h0_eigenvalues
    f = cache.occupations
    m = (forward * np.exp(1j * u * eps)) @ forward.conj().T
    m *= np.exp(-1j * u * eps)[np.newaxis, :]
    mat = f[:, np.newaxis] * m
    mat[np.diag_indices_from(mat)] += 1.0 - f
    return _from_slogdet(*np.linalg.slogdet(mat))


def _theta_branch_imag(cache, v, forward):
    """Branch characteristic function at purely imaginary u = i v.

    Pairing the Gibbs weights with the counting exponentials analytically,

        Theta_1(iv) = prod_k f_k e^{v eps_k} * det[ C^2 + B B^dag ]

    with B = G e^{-v eps / 2} (columns of the propagator, exactly scaled)
    and C = diag(e^{(x - v eps)/2}), x = beta (eps - mu).  C^2 + B B^dag is
    Hermitian positive definite by construction: it is the Gram matrix of
    the L x 2L block [B | C], so its determinant is the squared product of
    the R-factor pivots of one QR of [B | C]^dag.  Every scale enters
    through an exactly-scaled column and ends up in its own pivot; scales
    hundreds of orders of magnitude apart are multiplied in log space, not
    added, which keeps the fluctuation identity Theta(i beta) = 1 at
    ~1e-12 even for beta * bandwidth in the hundreds.
    """
    temperature = cache.spec.temperature
    if temperature <= 0:
        raise RangeError(
            "imaginary counting fields need T > 0: the Gibbs pairing "
            "exp(-beta(eps-mu)) is degenerate at T = 0")
    eps = cache.h0_eigenvalues
    beta = 1.0 / temperature
    x = beta * (eps - cache.mu)
    half_b = -0.5 * v * eps
    half_c = 0.5 * (x - v * eps)
    worst = max(float(np.max(np.abs(half_b))), float(np.max(np.abs(half_c))))
    if worst > _EXP_LIMIT:
        raise RangeError(
            "counting exponent max(|v eps|, |beta(eps-mu) - v eps|)/2 = %.3g "
            "exceeds the representable range (%g)" % (worst, _EXP_LIMIT))

    b = forward * np.exp(half_b)[np.newaxis, :]
    stacked = np.vstack([b.conj().T, np.diag(np.exp(half_c).astype(complex))])
    r = scipy.linalg.qr(stacked, mode="r", pivoting=True)[0]
    pivots = np.abs(np.diag(r))
    if not np.all(pivots > 0):
        return DeterminantValue(0j, -np.inf, 0.0, phase_reliable=False)

    # log prod f_k e^{v eps_k} = sum (v eps - logaddexp(0, x))
    log_mag = float(np.sum(v * eps - np.logaddexp(0.0, x))
                    + 2.0 * np.sum(np.log(pivots)))
    with np.errstate(over="ignore", under="ignore"):
        value = complex(np.exp(log_mag))
    return DeterminantValue(value, log_mag, 0.0)


def heat_characteristic_branch(cache, tf, u, propagator=None):
    """Characteristic function Theta_1(u) of the coupled-branch heat.

    :param cache: SpectralCache
    :param tf: protocol duration
    :param u: counting field; real values take the direct unitary path,
        purely imaginary values (tilted averages such as the
        fluctuation-relation point u = i beta) take the stabilised
        Gibbs-paired path; mixed complex values are not supported
    :param propagator: optional precomputed conditioned_propagator(cache, tf)
    :return: DeterminantValue; .value is Theta_1(u)
    """
    if propagator is None:
        propagator = conditioned_propagator(cache, tf)
    forward = propagator.conj().T  # exp(+i h1 tf)
    u = complex(u)
    if u.imag == 0.0:
        return _theta_branch_real(cache, u.real, forward)
    if u.real != 0.0:
        raise ValidationError(
            "counting field must be real or purely imaginary, got %s" % u)
    return _theta_branch_imag(cache, u.imag, forward)


def _checked_populations(populations):
    p0, p1 = populations
    if p0 < -1e-12 or p1 < -1e-12 or abs(p0 + p1 - 1.0) > 1e-9:
        raise ValidationError("populations must be nonnegative and sum to 1")
    return float(p0), float(p1)


def full_characteristic_function(cache, tf, u, populations=(0.5, 0.5)):
    """Mixture characteristic function Theta(u) = p0 + p1 Theta_1(u).

    The uncoupled branch conditions the bath on h0 itself, so its heat is
    identically zero and it contributes the constant p0.  The default
    populations are the equal-weight Ramsey preparation.
    """
    p0, p1 = _checked_populations(populations)
    return p0 + p1 * heat_characteristic_branch(cache, tf, u).value


def characteristic_evaluator(cache, tf, populations=(0.5, 0.5)):
    """Bind a protocol duration into a reusable u -> Theta(u) callable.

    The conditioned propagator is factorised once, so counting-field sweeps
    (finite-difference moments, density inversion) cost one determinant per
    point.  Use populations=(0, 1) to expose the coupled branch Theta_1
    alone.  theta(0) is exactly 1 by normalization.
    """
    p0, p1 = _checked_populations(populations)
    propagator = conditioned_propagator(cache, tf)

    def theta(u):
        if u == 0:
            return complex(1.0)
        branch = heat_characteristic_branch(cache, tf, u, propagator=propagator)
        return p0 + p1 * branch.value

    return theta


@dataclass(frozen=True)
class ComplexSeries:
    """A complex-valued function sampled on a strictly increasing grid.

    Carries the plain values together with (log-magnitude, phase) so that
    decades below the underflow threshold remain usable.
    """
    grid: np.ndarray
    values: np.ndarray
    log_magnitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise ValidationError("series grid must be a nonempty 1-d array")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValidationError("series grid must be strictly increasing")
        if not (self.values.shape == self.grid.shape
                == self.log_magnitudes.shape == self.phases.shape):
            raise ValidationError("series arrays must share the grid shape")


def _series_from(grid, dets):
    return ComplexSeries(
        grid=np.asarray(grid, dtype=float),
        values=np.array([d.value for d in dets]),
        log_magnitudes=np.array([d.log_magnitude for d in dets]),
        phases=np.array([d.phase for d in dets]),
    )


def _map_ordered(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def decoherence_series(cache, times, threads=None):
    """nu(t) on a time grid, evaluated point-independently.

    Each grid point is a fresh determinant; with `threads` > 1 the points
    are farmed out to a thread pool (the heavy lifting is BLAS, which
    releases the GIL) and reassembled in grid order, so the result does
    not depend on the thread count.
    """
    times = np.asarray(times, dtype=float)
    dets = _map_ordered(lambda t: decoherence_function(cache, t), times, threads)
    series = _series_from(times, dets)
    if float(np.max(np.abs(series.values))) > 1.0 + 1e-9:
        raise NumericsError("|nu| exceeded 1 + 1e-9; thermal average of unitaries broken")
    origin = np.nonzero(times == 0.0)[0]
    if origin.size and abs(series.values[origin[0]] - 1.0) > 1e-12:
        raise NumericsError("nu(0) differs from 1 beyond 1e-12")
    return series


def characteristic_series(cache, tf, u_grid, threads=None):
    """Theta_1(u) for one protocol duration on a grid of real u."""
    u_grid = np.asarray(u_grid, dtype=float)
    forward = conditioned_propagator(cache, tf).conj().T
    dets = _map_ordered(
        lambda u: _theta_branch_real(cache, float(u), forward), u_grid, threads)
    series = _series_from(u_grid, dets)
    origin = np.nonzero(u_grid == 0.0)[0]
    if origin.size and abs(series.values[origin[0]] - 1.0) > 1e-12:
        raise NumericsError("Theta_1(0) differs from 1 beyond 1e-12")
    return series
