"""
Exception types raised by the Leibniz algebra kernel
"""


class LeibnizKernelError(Exception):
    """Base class for every error the kernel raises on bad input"""


class FieldMismatchError(LeibnizKernelError, ValueError):
    pass


class DimensionMismatchError(LeibnizKernelError, ValueError):
    pass


class UnsupportedEnumerationError(LeibnizKernelError):
    pass


class BudgetExceededError(LeibnizKernelError):
    pass


class InvalidAlgebraError(LeibnizKernelError, ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvalidBimoduleError(LeibnizKernelError, ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotASubalgebraError(LeibnizKernelError, ValueError):
    pass


class NotAnIdealError(LeibnizKernelError, ValueError):
    pass


class NotContainedError(LeibnizKernelError, ValueError):
    pass


class HypothesisViolationError(LeibnizKernelError):
    """A theorem check was asked to run on an input outside its hypotheses"""


class EmptyModuleError(LeibnizKernelError, ValueError):
    pass


class PreconditionError(LeibnizKernelError):
    pass


class AlgebraMismatchError(LeibnizKernelError, ValueError):
    pass


class ParseError(LeibnizKernelError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class KernelInvariantError(AssertionError):
    """A proven fact failed to hold; this always indicates an implementation bug"""
