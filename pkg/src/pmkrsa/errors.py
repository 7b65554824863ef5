"""Exception hierarchy shared across the package."""


class PMKRSAError(Exception):
    """Base class for every error raised by pmkrsa."""


class ArithmeticDomainError(PMKRSAError, ValueError):
    pass


class NotInvertible(ArithmeticDomainError):
    """gcd(a, N) != 1: bad key material, unlucky blind, or tampering."""


class EvenModulus(ArithmeticDomainError):
    pass


class ZeroModulus(ArithmeticDomainError):
    pass


class NotCoprime(ArithmeticDomainError):
    pass


class MessageTooLarge(PMKRSAError, ValueError):
    pass


class InvalidConfig(PMKRSAError, ValueError):
    pass


class MalformedKeyFile(PMKRSAError, ValueError):
    pass


class DecryptionError(PMKRSAError):
    pass


class LayoutMismatch(DecryptionError):
    pass


class SentinelViolation(DecryptionError):
    pass


class TaskFailed(PMKRSAError):
    """A parallel task raised; ``index`` is the lowest failing item index."""

    def __init__(self, index, cause):
        super().__init__(f"task for item {index} failed: {cause!r}")
        self.index = index
        self.cause = cause


class ContainerError(PMKRSAError, ValueError):
    """Ciphertext container could not be parsed; ``offset`` locates the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class BadMagic(ContainerError):
    pass


class UnsupportedVersion(ContainerError):
    pass


class InvalidHeader(ContainerError):
    pass


class TruncatedBody(ContainerError):
    pass


class TrailingGarbage(ContainerError):
    pass


class SelfTestFailed(PMKRSAError):
    def __init__(self, failed):
        super().__init__("self-test failed: " + ", ".join(failed))
        self.failed = list(failed)


class MismatchedConfigs(PMKRSAError, ValueError):
    pass


class TrendViolation(PMKRSAError):
    def __init__(self, message, ratios=None):
        super().__init__(message)
        self.ratios = dict(ratios or {})
