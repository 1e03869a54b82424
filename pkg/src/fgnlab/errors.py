"""Exception hierarchy shared by all fgnlab modules."""


class FgnLabError(Exception):
    """Base class for every error raised by fgnlab."""


class ValidationError(FgnLabError, ValueError):
    """A parameter violates a documented precondition."""


class NumericalFailure(FgnLabError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy answer."""


class IllConditioned(NumericalFailure):
    pass


class NotContractive(NumericalFailure):
    pass


class MaxTermsExceeded(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class NoStabilization(NumericalFailure):
    pass


class EmbeddingNotPSD(NumericalFailure):
    pass


class CholeskyFailure(NumericalFailure):
    pass


class MissingDn(NumericalFailure):
    pass
