"""Exception types raised by the verification engine."""


class ContactRollError(Exception):
    """Base class for every error raised by this package."""


class JetError(ContactRollError):
    pass


class JetPoleError(JetError):
    def __init__(self, value):
        super().__init__(f"jet pole: reciprocal of near-zero value {value!r}")
        self.value = value


class JetBranchPointError(JetError):
    def __init__(self, value):
        super().__init__(f"jet branch point: sqrt of near-zero value {value!r}")
        self.value = value


class SingularMatrixError(ContactRollError):
    pass


class DegenerateFrameError(SingularMatrixError):
    def __init__(self, det=None):
        msg = "degenerate frame"
        if det is not None:
            msg += f" (det={det:.3e})"
        super().__init__(msg)
        self.det = det


class NotInO3Error(ContactRollError):
    def __init__(self, asym):
        super().__init__(f"not in o3: antisymmetry defect {asym:.3e}")
        self.asym = asym


class DomainError(ContactRollError):
    pass


class DegenerateMetricError(ContactRollError):
    def __init__(self, value):
        super().__init__(f"degenerate metric: |x_u x x_v|^2 = {value!r}")
        self.value = value


class NotIsometricError(ContactRollError):
    pass


class RegularityError(ContactRollError):
    """A denominator of the leaf equations vanished."""


class DevelopableSeedError(ContactRollError):
    def __init__(self, K):
        super().__init__(f"developable seed excluded (K={K!r})")
        self.K = K


class ZeroMError(ContactRollError):
    def __init__(self, m2):
        super().__init__(f"m=0 excluded (m^2={m2!r})")
        self.m2 = m2


class FrameDenominatorError(ContactRollError):
    def __init__(self, quantity, value):
        super().__init__(f"zero denominator {quantity} = {value!r}")
        self.quantity = quantity
        self.value = value


class C4PoleError(ContactRollError):
    def __init__(self, value):
        super().__init__(f"c4 pole: m^T(C4^1 + c2 C124^1) = {value!r}")
        self.value = value


class FSystemSingular(ContactRollError):
    def __init__(self, det, scale):
        super().__init__(f"F-system singular: det = {det!r} (scale {scale:.3e})")
        self.det = det
        self.scale = scale


class InterpolationError(ContactRollError):
    pass


class ConfigError(ContactRollError):
    pass
