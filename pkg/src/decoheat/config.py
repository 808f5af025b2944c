"""Run configuration: a flat key = value text format and its validation.

The format is deliberately dumb: one assignment per line, dotted keys,
comma-separated lists, # comments.  Unknown and duplicate keys are hard
errors; validation collects every violated field before raising so a bad
file is fixed in one round trip.

Scale-dependent fields (time grid, sigma, duration, window, delta_u) left
unset default to the reference values measured in units of the hopping, so
the same config means the same physics at any hopping.
"""

import os
from dataclasses import dataclass, fields, replace

from .errors import ValidationError

EXPERIMENTS = ("decoherence", "heat-vs-time", "heat-distribution",
               "heat-vs-temperature", "validate")

# per-experiment time-grid fallbacks: (kind, start, stop, points) with the
# times in units of 1/hopping; decoherence wants log axes, heat growth a
# dense linear ramp
_TIME_DEFAULTS = {
    "heat-vs-time": ("linear", 0.0, 100.0, 400),
}
_TIME_FALLBACK = ("log", 0.1, 1000.0, 200)


def _parse_float(text):
    return float(text)


def _parse_int(text):
    return int(text, 10)


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError("not a boolean: %r" % text)


def _parse_float_list(text):
    items = [part.strip() for part in text.split(",")]
    if any(not part for part in items):
        raise ValueError("empty list entry")
    return tuple(float(part) for part in items)


def _parse_str(text):
    return text.strip()


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment run needs, with sweep defaults matching the
    reference decoherence scan (L = 500 ring, three couplings, three
    temperatures)."""
    experiment: str = "decoherence"
    sites: int = 500
    hopping: float = 1.0
    filling: int = None
    impurity_site: int = 1
    qubit_splitting: float = 0.0
    couplings: tuple = (0.1, 0.5, 1.0)
    temperatures: tuple = (0.0, 0.01, 0.1)
    time_kind: str = None
    time_start: float = None
    time_stop: float = None
    time_points: int = None
    q_max: float = None
    sigma: float = None
    duration: float = None
    points_per_sigma: int = 4
    window_start: float = None
    window_stop: float = None
    window_samples: int = 50
    delta_u: float = None
    output: str = None
    timestamp: bool = True
    threads: int = 0

    def resolved_q_max(self):
        """Counting grid half-width: configured value or the spectral bound
        2 * hopping plus the largest coupling."""
        if self.q_max is not None:
            return self.q_max
        return 2.0 * self.hopping + max(abs(g) for g in self.couplings)

    def resolved_sigma(self):
        return self.sigma if self.sigma is not None else 0.01 * self.hopping

    def resolved_duration(self):
        return self.duration if self.duration is not None else 100.0 / self.hopping

    def resolved_window(self):
        start = self.window_start
        stop = self.window_stop
        if start is None:
            start = 500.0 / self.hopping
        if stop is None:
            stop = 1000.0 / self.hopping
        return start, stop

    def resolved_delta_u(self):
        return self.delta_u if self.delta_u is not None else 1e-4 / self.hopping

    def resolved_time_grid(self):
        """(kind, start, stop, points) after filling per-experiment defaults."""
        kind, start, stop, points = _TIME_DEFAULTS.get(
            self.experiment, _TIME_FALLBACK)
        start /= self.hopping
        stop /= self.hopping
        if self.time_kind is not None:
            kind = self.time_kind
        if self.time_start is not None:
            start = self.time_start
        if self.time_stop is not None:
            stop = self.time_stop
        if self.time_points is not None:
            points = self.time_points
        return kind, start, stop, points

    def resolved_threads(self):
        """Worker count for parallel maps; 0 means one per CPU."""
        if self.threads == 0:
            return os.cpu_count() or 1
        return self.threads


_KEYS = {
    "experiment": ("experiment", _parse_str),
    "lattice.sites": ("sites", _parse_int),
    "lattice.hopping": ("hopping", _parse_float),
    "lattice.filling": ("filling", _parse_int),
    "lattice.impurity_site": ("impurity_site", _parse_int),
    "lattice.qubit_splitting": ("qubit_splitting", _parse_float),
    "sweep.couplings": ("couplings", _parse_float_list),
    "sweep.temperatures": ("temperatures", _parse_float_list),
    "time.kind": ("time_kind", _parse_str),
    "time.start": ("time_start", _parse_float),
    "time.stop": ("time_stop", _parse_float),
    "time.points": ("time_points", _parse_int),
    "counting.q_max": ("q_max", _parse_float),
    "counting.sigma": ("sigma", _parse_float),
    "counting.duration": ("duration", _parse_float),
    "counting.points_per_sigma": ("points_per_sigma", _parse_int),
    "window.start": ("window_start", _parse_float),
    "window.stop": ("window_stop", _parse_float),
    "window.samples": ("window_samples", _parse_int),
    "moments.delta_u": ("delta_u", _parse_float),
    "output.path": ("output", _parse_str),
    "output.timestamp": ("timestamp", _parse_bool),
    "threads": ("threads", _parse_int),
}


def validate_config(config):
    """Raise one ValidationError naming every violated field, or return the
    config unchanged."""
    problems = []

    def check(ok, message):
        if not ok:
            problems.append(message)

    check(config.experiment in EXPERIMENTS,
          "experiment must be one of %s, got %r" %
          (", ".join(EXPERIMENTS), config.experiment))
    check(config.sites >= 3, "lattice.sites must be >= 3")
    check(config.hopping > 0, "lattice.hopping must be positive")
    if config.filling is not None:
        check(0 <= config.filling <= config.sites,
              "lattice.filling must lie in 0..sites")
    check(1 <= config.impurity_site <= config.sites,
          "lattice.impurity_site must lie in 1..sites")
    check(len(config.couplings) > 0, "sweep.couplings must be non-empty")
    check(len(config.temperatures) > 0, "sweep.temperatures must be non-empty")
    check(all(t >= 0 for t in config.temperatures),
          "sweep.temperatures must be nonnegative")
    if config.experiment in EXPERIMENTS and config.hopping > 0:
        kind, start, stop, points = config.resolved_time_grid()
        check(kind in ("log", "linear"),
              "time.kind must be log or linear, got %r" % kind)
        check(points >= 2, "time.points must be >= 2")
        check(start < stop, "time.start must be below time.stop")
        if kind == "log":
            check(start > 0, "log time grids need time.start > 0")
    if config.q_max is not None:
        check(config.q_max > 0, "counting.q_max must be positive")
    if config.sigma is not None:
        check(config.sigma > 0, "counting.sigma must be positive")
    if config.duration is not None:
        check(config.duration > 0, "counting.duration must be positive")
    check(config.points_per_sigma >= 1, "counting.points_per_sigma must be >= 1")
    if config.hopping > 0:
        start, stop = config.resolved_window()
        check(0 < start < stop, "window must satisfy 0 < start < stop")
    check(config.window_samples >= 2, "window.samples must be >= 2")
    if config.delta_u is not None:
        check(config.delta_u > 0, "moments.delta_u must be positive")
    check(config.threads >= 0, "threads must be >= 0 (0 = auto)")

    if problems:
        raise ValidationError("invalid configuration:\n  " + "\n  ".join(problems))
    return config


def parse_config(text):
    """Parse the key = value format into a validated RunConfig."""
    assignments = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            errors.append("line %d: expected key=value, got %r" % (lineno, line))
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            errors.append("line %d: unknown key %r (known: %s)" %
                          (lineno, key, ", ".join(sorted(_KEYS))))
            continue
        attr, convert = _KEYS[key]
        if attr in assignments:
            errors.append("line %d: duplicate key %r" % (lineno, key))
            continue
        try:
            assignments[attr] = convert(value)
        except ValueError as exc:
            errors.append("line %d: bad value for %r: %s" % (lineno, key, exc))
    if errors:
        raise ValidationError("invalid configuration:\n  " + "\n  ".join(errors))
    return validate_config(replace(RunConfig(), **assignments))


def load_config(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def config_pairs(config):
    """(key, value) pairs in file order, for echoing into output headers."""
    by_attr = {attr: key for key, (attr, _) in _KEYS.items()}
    pairs = []
    for item in fields(config):
        value = getattr(config, item.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = ",".join("%g" % entry for entry in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = "%g" % value
        pairs.append((by_attr[item.name], str(value)))
    return pairs
