"""Exception types raised by symtd."""


class SymtdError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(SymtdError, ValueError):
    pass


class SymmetryViolation(SymtdError, ValueError):
    def __init__(self, asymmetry, tol):
        super().__init__(f"max asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")
        self.asymmetry = asymmetry
        self.tol = tol


class NonConvergence(SymtdError, RuntimeError):
    pass


class WhiteningFailure(SymtdError):
    """No positive semi-definite slice combination was found within budget."""

    def __init__(self, attempts):
        super().__init__(f"no p.s.d. slice combination found after {attempts} attempts")
        self.attempts = attempts


class ZeroTensor(SymtdError, ValueError):
    pass


class InvalidSpec(SymtdError, ValueError):
    pass


class FormatError(SymtdError, ValueError):
    pass
