"""Command line driver: run one experiment sweep, write one CSV.

CSV columns follow the convention that energies (g, T, Q, moments, sigma)
are reported in units of the hopping and times in units of its inverse, so
the files are dimensionless and directly comparable across lattices.

Exit codes: 0 success, 1 bad input (arguments, config, capacity), 2 numerical
consistency failure, 3 output I/O failure.
"""

import argparse
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import EXPERIMENTS, RunConfig, config_pairs, load_config, \
    validate_config
from .determinant import _map_ordered, characteristic_evaluator, \
    decoherence_series
from .errors import NumericsError, OutputError, ValidationError
from .heat import first_two_moments, invert_to_density, long_time_mean_heat
from .lattice import LatticeSpec, build_spectral_cache
from .validation import run_fluctuation_suite, run_oracle_equivalence

_UNITS_NOTE = "energies in units of the hopping, times in units of 1/hopping"


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the normal error path
    (exit code 1) instead of its own exit(2)."""

    def error(self, message):
        raise ValidationError(message)


def _build_parser():
    parser = _Parser(
        prog="decoheat",
        description="Dephasing qubit on a fermionic ring: decoherence, heat "
                    "statistics and consistency checks, written as CSV.")
    parser.add_argument("experiment", nargs="?", default=None,
                        help="one of: %s (default: from config)" % ", ".join(EXPERIMENTS))
    parser.add_argument("--config", metavar="PATH",
                        help="key=value configuration file")
    parser.add_argument("--output", metavar="PATH", help="output CSV path")
    parser.add_argument("--threads", type=int, metavar="N",
                        help="evaluate grid points on N threads (0 = auto)")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the generated= header line so reruns are "
                             "byte-identical")
    return parser


def _spec_for(config, coupling, temperature):
    return LatticeSpec(sites=config.sites, hopping=config.hopping,
                       coupling=coupling, temperature=temperature,
                       filling=config.filling,
                       qubit_splitting=config.qubit_splitting,
                       impurity_site=config.impurity_site)


def _time_grid(config):
    kind, start, stop, points = config.resolved_time_grid()
    if kind == "log":
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _format_cell(value):
    if isinstance(value, str):
        return value
    return "%.12g" % value


def _write_csv(path, config, extra_pairs, columns, rows):
    lines = ["# decoheat=%s" % __version__,
             "# units=%s" % _UNITS_NOTE]
    lines.extend("# %s=%s" % pair for pair in config_pairs(config))
    lines.extend("# %s=%s" % pair for pair in extra_pairs)
    if config.timestamp:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        lines.append("# generated=%s" % stamp)
    lines.append(",".join(columns))
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError("cannot write %s: %s" % (path, exc)) from exc


def _sweep_caches(config):
    for coupling in config.couplings:
        for temperature in config.temperatures:
            yield coupling, temperature, \
                build_spectral_cache(_spec_for(config, coupling, temperature))


def _run_decoherence(config, path):
    om = config.hopping
    grid = _time_grid(config)
    threads = config.resolved_threads()
    rows = []
    for coupling, temperature, cache in _sweep_caches(config):
        series = decoherence_series(cache, grid, threads=threads)
        for i, t in enumerate(grid):
            rows.append((t * om, coupling / om, temperature / om,
                         abs(series.values[i]), series.phases[i],
                         series.log_magnitudes[i]))
    _write_csv(path, config, [],
               ["t", "g", "T", "abs_nu", "arg_nu", "log_abs_nu"], rows)
    return 0


def _run_heat_vs_time(config, path):
    om = config.hopping
    grid = _time_grid(config)
    delta_u = config.resolved_delta_u()
    threads = config.resolved_threads()
    rows = []
    for coupling, temperature, cache in _sweep_caches(config):

        def moments_at(tf):
            return first_two_moments(
                characteristic_evaluator(cache, tf), delta_u)

        moments = _map_ordered(moments_at, grid, threads)
        for t, (mean, var) in zip(grid, moments):
            rows.append((t * om, coupling / om, temperature / om,
                         mean / om, var / om ** 2))
    _write_csv(path, config, [], ["tf", "g", "T", "mean_Q", "var_Q"], rows)
    return 0


def _run_heat_distribution(config, path):
    om = config.hopping
    q_max = config.resolved_q_max()
    sigma = config.resolved_sigma()
    tf = config.resolved_duration()
    threads = config.resolved_threads()
    rows = []
    for coupling, temperature, cache in _sweep_caches(config):
        theta = characteristic_evaluator(cache, tf, populations=(0.0, 1.0))
        result = invert_to_density(theta, q_max, sigma, p0=0.5,
                                   points_per_sigma=config.points_per_sigma,
                                   threads=threads)
        for q, value in zip(result.q_grid, result.density):
            rows.append((q / om, coupling / om, temperature / om, tf * om,
                         value * om, result.zero_atom_weight,
                         result.sigma / om))
    _write_csv(path, config, [("q_max", "%.12g" % (q_max / om))],
               ["Q", "g", "T", "tf", "density", "zero_atom_weight", "sigma"],
               rows)
    return 0


def _run_heat_vs_temperature(config, path):
    om = config.hopping
    window = config.resolved_window()
    delta_u = config.resolved_delta_u()
    threads = config.resolved_threads()
    rows = []
    for coupling, temperature, cache in _sweep_caches(config):
        result = long_time_mean_heat(cache, window, config.window_samples,
                                     delta_u, threads=threads)
        rows.append((temperature / om, coupling / om,
                     result.value / om, result.spread / om))
    _write_csv(path, config, [("window", "%g..%g" % (window[0] * om,
                                                     window[1] * om))],
               ["T", "g", "mean_Q_longtime", "stddev_over_window"], rows)
    return 0


def _run_validate(config, path):
    checks = run_oracle_equivalence()
    checks += run_fluctuation_suite(sites=config.sites)
    rows = []
    for check in checks:
        status = "pass" if check.passed else "FAIL"
        print("%-4s %-28s %.3e <= %.1e" %
              (status, check.name, check.value, check.tolerance))
        rows.append((check.name, "%.6e" % check.value,
                     "%.1e" % check.tolerance, status))
    _write_csv(path, config, [], ["check", "value", "tolerance", "status"], rows)
    failed = sum(1 for check in checks if not check.passed)
    if failed:
        print("%d of %d checks failed" % (failed, len(checks)), file=sys.stderr)
        return 2
    print("all %d checks passed" % len(checks))
    return 0


_RUNNERS = {
    "decoherence": _run_decoherence,
    "heat-vs-time": _run_heat_vs_time,
    "heat-distribution": _run_heat_distribution,
    "heat-vs-temperature": _run_heat_vs_temperature,
    "validate": _run_validate,
}


def run_experiment(config, path=None):
    """Run config.experiment, write its CSV, return the process exit code."""
    path = path or config.output or (config.experiment + ".csv")
    code = _RUNNERS[config.experiment](config, path)
    print("wrote %s" % path)
    return code


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            try:
                config = load_config(args.config)
            except OSError as exc:
                raise ValidationError(
                    "cannot read config %s: %s" % (args.config, exc)) from exc
        else:
            config = RunConfig()
        overrides = {}
        if args.experiment is not None:
            if args.experiment not in EXPERIMENTS:
                raise ValidationError(
                    "unknown experiment %r (choose from %s)" %
                    (args.experiment, ", ".join(EXPERIMENTS)))
            overrides["experiment"] = args.experiment
        if args.output is not None:
            overrides["output"] = args.output
        if args.threads is not None:
            overrides["threads"] = args.threads
        if args.no_timestamp:
            overrides["timestamp"] = False
        config = validate_config(replace(config, **overrides))
        return run_experiment(config)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except NumericsError as exc:
        print("numerical consistency failure: %s" % exc, file=sys.stderr)
        return 2
    except (OutputError, OSError) as exc:
        print("output failure: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
