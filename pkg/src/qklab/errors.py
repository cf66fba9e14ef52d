"""Exception types shared across qklab."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConeViolation(DomainError):
    """Curvature vector is not in the required Garding cone."""

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class InvalidJet(DomainError):
    pass


class WindowViolation(DomainError):
    """A sampled function leaves the admissible window at some node."""

    def __init__(self, message, node, radius, value):
        super().__init__(message)
        self.node = node
        self.radius = radius
        self.value = value


class SingularDenominator(ZeroDivisionError):
    """A denominator vanished; ``value`` is the offending quantity."""

    def __init__(self, message, value=None, where=None):
        super().__init__(message)
        self.value = value
        self.where = where


class IntegrationError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
