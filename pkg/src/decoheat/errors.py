"""Exception taxonomy shared across the package.

Every failure mode maps onto one of four categories so the command line
runner can translate them into stable exit codes:

  ValidationError   -> bad inputs, malformed models, malformed config (exit 1)
  CapacityError     -> problem size exceeds a configured cap (exit 1)
  NumericsError     -> internal consistency or resolution failure (exit 2)
  OutputError       -> filesystem / I-O trouble (exit 3)
"""


class ValidationError(ValueError):
    """Input or model failed a precondition."""


class CapacityError(ValidationError):
    """Requested problem size exceeds the configured cap."""


class NumericsError(RuntimeError):
    """A numerical invariant that should hold to tolerance does not."""


class ResolutionError(NumericsError):
    """Grid or window resolution is too coarse for the requested quantity."""


class RangeError(NumericsError):
    """A parameter drives exponentials outside representable range."""


class OutputError(OSError):
    """Writing results to disk failed."""
