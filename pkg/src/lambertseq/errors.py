"""Exception hierarchy shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; anything else is allowed to surface as a plain ValueError from
the offending layer.
"""


class LambertSeqError(Exception):
    """Base class for package errors."""


class ConfigError(LambertSeqError):
    """Invalid parameter or malformed input specification."""


class DomainError(LambertSeqError):
    """Mathematically invalid operation (division by a zero-containing
    ball, sqrt/log of a possibly-nonpositive ball, |z| >= 1, ...)."""


class PrecisionError(LambertSeqError):
    """The requested decision cannot be certified at the working
    precision.  Callers may retry at higher precision; the library
    itself never retries silently."""


class ConstructionError(LambertSeqError):
    """A congruence-ladder invariant failed to verify."""


class SupplyError(LambertSeqError):
    """A sequence cannot supply the next required term (exhausted
    explicit list, or an empty residue class)."""

    def __init__(self, what: str, detail: str = ""):
        self.what = what
        msg = f"supply exhausted: {what}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
