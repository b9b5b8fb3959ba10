"""Exception types raised across the package."""


class FgadynError(Exception):
    """Base class for all errors raised by fgadyn."""


class RankMismatch(FgadynError, ValueError):
    pass


class TrivialClass(FgadynError, ValueError):
    """The word is trivial after cyclic reduction, so it has no class."""


class EmptyPattern(FgadynError, ValueError):
    pass


class InverseFailed(FgadynError, ValueError):
    """Claimed inverse images do not invert the automorphism."""


class ParseError(FgadynError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonComposable(FgadynError, ValueError):
    pass


class CapExceeded(FgadynError, RuntimeError):
    def __init__(self, length_cap, message=None, partial=None):
        self.length_cap = length_cap
        self.partial = partial
        super().__init__(message or f"length cap {length_cap} exceeded")


class LengthCapExceeded(CapExceeded):
    pass


class EmptyPath(FgadynError, ValueError):
    pass


class OnlyMarkedEdge(FgadynError, ValueError):
    pass


class InvalidGraph(FgadynError, ValueError):
    pass


class InducedClassMismatch(FgadynError, ValueError):
    pass


class NotIrreducible(FgadynError, ValueError):
    pass


class NoConvergence(FgadynError, RuntimeError):
    def __init__(self, max_iters):
        self.max_iters = max_iters
        super().__init__(f"power iteration did not converge in {max_iters} iterations")


class NotNested(FgadynError, ValueError):
    pass


class NoProvenance(FgadynError, ValueError):
    pass


class WindowMismatch(FgadynError, ValueError):
    pass


class NotEmpiricallyAtoroidal(FgadynError, RuntimeError):
    def __init__(self, message, verdict=None):
        self.verdict = verdict
        super().__init__(message)


class NotEmpiricallyAtoroidalOnA(NotEmpiricallyAtoroidal):
    pass


class MarkedClassNotFixed(FgadynError, RuntimeError):
    pass


class FactorNotInvariant(FgadynError, ValueError):
    """The automorphism representative does not preserve the chosen free factor."""


class BudgetExceeded(FgadynError, RuntimeError):
    def __init__(self, budget, partial=None):
        self.budget = budget
        self.partial = partial
        super().__init__(f"work budget of {budget} letters exhausted")
