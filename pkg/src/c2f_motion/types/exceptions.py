from pathlib import Path

class ReconException(Exception): ...

class NonFiniteInputError(ReconException):
    def __init__(self, operation: str):
        super().__init__(f"Non-finite input to {operation}")
        self.operation = operation

class ShapeMismatchError(ReconException):
    def __init__(self, what: str, expected: tuple[int, ...], actual: tuple[int, ...]):
        super().__init__(f"Shape mismatch for {what}: expected {expected}, got {actual}")
        self.what = what
        self.expected = expected
        self.actual = actual

class InvalidMaskError(ReconException):
    def __init__(self, reason: str):
        super().__init__(f"Invalid sampling mask: {reason}")
        self.reason = reason

class InvalidSensitivityMapsError(ReconException):
    def __init__(self, reason: str):
        super().__init__(f"Invalid sensitivity maps: {reason}")
        self.reason = reason

class MotionFreeStateError(ReconException):
    def __init__(self, max_displacement: float):
        super().__init__(f"State 0 is motion-free but its field reaches {max_displacement:.3g} px")
        self.max_displacement = max_displacement

class TimestepOutOfRangeError(ReconException):
    def __init__(self, t: int, steps: int, lowest: int = 0):
        super().__init__(f"Timestep {t} outside [{lowest}, {steps}]")
        self.t = t
        self.steps = steps
        self.lowest = lowest

class EmptyCorpusError(ReconException):
    def __init__(self):
        super().__init__("Cannot estimate a power spectrum from an empty corpus")

class MissingFieldError(ReconException):
    def __init__(self, state: int):
        super().__init__(f"No displacement field for motion state {state}")
        self.state = state

class ZeroReferenceError(ReconException):
    def __init__(self):
        super().__init__("Reference image has zero norm")

class AccelerationTooHighError(ReconException):
    def __init__(self, acceleration: float, limit: float):
        super().__init__(f"Acceleration {acceleration:g} exceeds {limit:g} allowed by the forced centre")
        self.acceleration = acceleration
        self.limit = limit

class InsufficientSamplesError(ReconException):
    def __init__(self, available: int, required: int):
        super().__init__(f"Mask has {available} samples, at least {required} required")
        self.available = available
        self.required = required

class IoException(Exception): ...

class CflFormatError(IoException):
    def __init__(self, path: Path, reason: str):
        super().__init__(f"Malformed CFL pair {path}: {reason}")
        self.path = path
        self.reason = reason

class ConfigError(IoException):
    def __init__(self, reason: str):
        super().__init__(f"Invalid configuration: {reason}")
        self.reason = reason

__all__ = [
    "ReconException",
    "NonFiniteInputError",
    "ShapeMismatchError",
    "InvalidMaskError",
    "InvalidSensitivityMapsError",
    "MotionFreeStateError",
    "TimestepOutOfRangeError",
    "EmptyCorpusError",
    "MissingFieldError",
    "ZeroReferenceError",
    "AccelerationTooHighError",
    "InsufficientSamplesError",

    "IoException",
    "CflFormatError",
    "ConfigError",
]
