"""Exception hierarchy shared by every layer of the stack."""


class EcsvcError(Exception):
    """Base class for all library errors."""


class GenerationError(EcsvcError):
    pass


class NoRequiredAttributeError(EcsvcError):
    """A policy without any Required entry has no message to split."""


class AttributeRangeError(EcsvcError, ValueError):
    pass


class StageError(EcsvcError):
    """A ciphertext was handed to an algorithm out of pipeline order."""


class PaddingError(EcsvcError):
    pass


class LengthError(EcsvcError, ValueError):
    pass


class DecodeError(EcsvcError):
    pass


class ProtocolStateError(EcsvcError):
    pass


class FragmentError(EcsvcError):
    pass


class ExtrapolationError(EcsvcError):
    pass


class ConfigError(EcsvcError):
    pass


class StallError(EcsvcError):
    def __init__(self, stuck):
        self.stuck = sorted(stuck)
        super().__init__("simulation stalled; incomplete sessions: " + ", ".join(self.stuck))
