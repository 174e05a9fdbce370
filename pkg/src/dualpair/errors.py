"""Exception hierarchy.

Every error raised by the library derives from :class:`DualPairError`.
:class:`NumericalFailure` marks conditions that signal a numerically broken
input or a degraded eigensolver (the CLI maps those to exit code 3); the
remaining classes are plain domain violations.
"""


class DualPairError(ValueError):
    pass


class NumericalFailure(DualPairError):
    pass


# matrix kernel
class NotHermitian(DualPairError):
    pass


class NotUnitary(DualPairError):
    pass


# phase spaces
class CoincidentAngles(DualPairError):
    pass


class NotInC(DualPairError):
    pass


class NotInSimplex(DualPairError):
    pass


class NotOnOverlap(DualPairError):
    pass


class NotInChamber(DualPairError):
    pass


class NotInteriorChamber(NotInChamber):
    pass


class ZeroZ(DualPairError):
    pass


class OnBoundary(DualPairError):
    pass


# gauge fixing / projections
class GaugeFixFailure(NumericalFailure):
    pass


class DegenerateTorusSpectrum(NumericalFailure):
    pass


class PatternMismatch(NumericalFailure):
    pass


class OffShell(NumericalFailure):
    pass


# dynamics
class CollisionGuard(NumericalFailure):
    pass


# verification / cli
class SampleRejection(DualPairError):
    pass


class NoPath(DualPairError):
    pass


class DocumentError(DualPairError):
    pass
