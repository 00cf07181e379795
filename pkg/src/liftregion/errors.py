"""Exception types. Every error carries a machine-readable ``code``."""


class LiftError(Exception):
    """Base class; ``code`` is one of the upper-case error identifiers."""

    code = "ERROR"

    def __init__(self, message="", code=None, **details):
        if code is not None:
            self.code = code
        self.details = details
        super().__init__(message or self.code)

    def to_json(self):
        payload = {"error": self.code, "message": str(self)}
        if self.details:
            payload["details"] = self.details
        return payload


class SingularMatrixError(LiftError):
    code = "SINGULAR"


class CapExceededError(LiftError):
    """Raised instead of silently truncating an enumeration."""

    code = "BOX_TOO_LARGE"


class ValidationError(LiftError):
    """Input body or point fails a structural check."""

    code = "VALIDATION_FAILED"


class HypothesisViolated(LiftError):
    code = "HYPOTHESIS_VIOLATED"
