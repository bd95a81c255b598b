"""Exception hierarchy.

Every estimator failure carries a short ``code`` that the sweep harness
writes into the ``status`` column instead of propagating the exception.
"""


class ActimeError(Exception):
    code = "error"


class DegenerateSeries(ActimeError):
    """Series has zero variance or too few points for a variance."""

    code = "degenerate"


class BadLength(ActimeError, ValueError):
    code = "bad-length"


class TooShort(ActimeError):
    code = "too-short"


class FailedEstimate(ActimeError):
    """The method could not produce an estimate on this input."""

    code = "failed"


class SingularSystem(ActimeError):
    code = "singular"


class Unstable(ActimeError):
    code = "unstable"


class NearUnitRoot(ActimeError):
    code = "near-unit-root"


class TooManyRejections(ActimeError):
    code = "too-many-rejections"


class NonStationaryParam(ActimeError, ValueError):
    code = "non-stationary-param"


class Overflow(ActimeError):
    code = "overflow"


class ConfigError(ActimeError, ValueError):
    code = "config"
