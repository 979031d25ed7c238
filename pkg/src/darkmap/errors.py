"""Exception taxonomy. Every error carries the CLI exit code it maps to."""


class DarkmapError(Exception):
    exit_code = 3


class ValidationError(DarkmapError):
    """Input is well-formed but violates a model constraint."""

    exit_code = 2


class SchemaError(ValidationError):
    """Malformed JSON or a document that does not match the input schema."""


class InconsistentDetunings(ValidationError):
    def __init__(self, violations):
        self.violations = list(violations)
        parts = ", ".join(
            f"({v.r},{v.r_prime},{v.n}) residual={v.residual:.6g}" for v in self.violations
        )
        super().__init__(f"loop resonance violated: {parts}")


class MissingDetuning(ValidationError):
    pass


class EmptyUpper(ValidationError):
    pass


class LowerTooSmall(ValidationError):
    pass


class UnknownLevel(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotProportional(ValidationError):
    pass


class BadKindParameters(ValidationError):
    pass


class ZeroDenominatorCoupling(ValidationError):
    pass


class ExcitationExceedsAtoms(ValidationError):
    pass


class NumericalError(DarkmapError):
    exit_code = 3


class NonHermitianInput(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass
