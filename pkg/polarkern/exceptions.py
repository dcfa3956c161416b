class PolarKernError(Exception):
    """
    Base class of all errors raised by the package.
    """


class Gf2Error(PolarKernError, ValueError):
    pass


class SingularMatrixError(Gf2Error):
    pass


class DependentRowsError(Gf2Error):
    pass


class EnumerationLimitError(Gf2Error):
    pass


class KernelFormatError(PolarKernError, ValueError):
    pass


class UnsupportedSizeError(PolarKernError, ValueError):
    pass


class IllegalActionError(PolarKernError, ValueError):
    pass


class InvalidInitializationError(PolarKernError, ValueError):
    pass


class DegenerateFitError(PolarKernError, ValueError):
    pass


class NonPolarizingKernelError(PolarKernError, ValueError):
    pass


class InvalidCodeError(PolarKernError, ValueError):
    pass
