"""Cross-checks of the determinant engine against the many-body oracle.

Small rings are solved exactly in the full Fock space and compared entry by
entry with the determinant formulas; large rings are checked against the
integral fluctuation relation, whose value is known (exactly 1) without any
reference computation.
"""

from dataclasses import dataclass

import numpy as np

from .dephasing import coherence_overlap, direct_characteristic_branch
from .determinant import decoherence_function, full_characteristic_function, \
    heat_characteristic_branch
from .lattice import LatticeSpec, build_spectral_cache
from .models import lattice_dephasing_model


@dataclass(frozen=True)
class Check:
    """One named scalar comparison with its pass/fail verdict."""
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return self.value <= self.tolerance


def run_oracle_equivalence(sizes=(4, 5, 6), couplings=(0.1, 0.5, 1.0),
                           temperatures=(0.05, 0.5), times=None, u_values=None,
                           tolerance=1e-10):
    """Compare determinant nu(t) and Theta_1(tf, u) with the exact Fock-space
    values on every (size, coupling, temperature) combination.

    Returns one Check per combination and quantity, reporting the worst
    absolute deviation across the sampled grid.
    """
    if times is None:
        times = np.geomspace(0.5, 8.0, 5)
    if u_values is None:
        u_values = np.linspace(0.4, 3.0, 5)
    tf = float(times[len(times) // 2])

    checks = []
    for sites in sizes:
        for g in couplings:
            for temp in temperatures:
                spec = LatticeSpec(sites=sites, coupling=g, temperature=temp)
                cache = build_spectral_cache(spec)
                model = lattice_dephasing_model(spec)

                dev_nu = 0.0
                for t in times:
                    det = decoherence_function(cache, t).value
                    exact = coherence_overlap(model, 1, 0, t)
                    dev_nu = max(dev_nu, abs(det - exact))
                checks.append(Check(
                    "nu L=%d g=%g T=%g" % (sites, g, temp), dev_nu, tolerance))

                dev_th = 0.0
                for u in u_values:
                    det = heat_characteristic_branch(cache, tf, u).value
                    exact = direct_characteristic_branch(model, 1, tf, u)
                    dev_th = max(dev_th, abs(det - exact))
                checks.append(Check(
                    "theta L=%d g=%g T=%g" % (sites, g, temp), dev_th, tolerance))
    return checks


def run_fluctuation_suite(sites=500, couplings=(0.1, 0.5, 1.0),
                          temperatures=(0.01, 0.1, 1.0), durations=(1.0, 10.0, 100.0),
                          tolerance=1e-8):
    """|Theta(i beta) - 1| for every combination, at the given lattice size."""
    checks = []
    for g in couplings:
        for temp in temperatures:
            spec = LatticeSpec(sites=sites, coupling=g, temperature=temp)
            cache = build_spectral_cache(spec)
            beta = spec.beta
            for tf in durations:
                value = abs(full_characteristic_function(cache, tf, 1j * beta) - 1.0)
                checks.append(Check(
                    "ift L=%d g=%g T=%g tf=%g" % (sites, g, temp, tf),
                    value, tolerance))
    return checks
