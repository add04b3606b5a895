"""Exception types shared across the package."""


class BeaconcastError(Exception):
    """Base class for all beaconcast errors."""


class InvalidMessageError(BeaconcastError):
    """Message payload is empty or otherwise unusable."""


class MessageTooLargeError(BeaconcastError):
    """Message needs more fragments than the 2-byte sequence number allows."""


class TruncatedFieldError(BeaconcastError):
    """Vendor field shorter than header plus one data byte."""


class OversizeFieldError(BeaconcastError):
    """Vendor field longer than the 253-byte limit."""


class UnknownTagError(BeaconcastError):
    """Tag byte outside the defined {0, 1, 2, 3} set."""


class InconsistentTagError(BeaconcastError):
    """Sequence number and tag disagree (e.g. FIRST with seq != 0)."""


class ConflictingTotalError(BeaconcastError):
    """Reassembly saw fragments implying two different message lengths."""


class ScenarioValidationError(BeaconcastError):
    """Scenario document violates the schema; `field` names the offender."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UndefinedMetricError(BeaconcastError):
    """Metric has an empty denominator (no vehicle entered coverage)."""


class CaptureFormatError(BeaconcastError):
    """Beacon capture file is malformed."""
