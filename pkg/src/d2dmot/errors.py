"""Exception hierarchy shared by the toolkit."""


class NocError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


class SizeUnsupported(NocError, ValueError):
    code = "size_unsupported"


class InvalidAugmentation(NocError, ValueError):
    code = "invalid_augmentation"


class AlreadyAttached(NocError):
    code = "already_attached"


class Disconnected(NocError):
    code = "disconnected"


class AddressMismatch(NocError, KeyError):
    code = "address_mismatch"

    def __str__(self):
        return Exception.__str__(self)


class RoutingIncomplete(NocError):
    code = "routing_incomplete"


class LivelockDetected(NocError):
    code = "livelock_detected"


class ConfigInvalid(NocError, ValueError):
    code = "config_invalid"


class SaturationAbort(NocError):
    """Raised when the source backlog outgrows ``SimConfig.max_backlog``."""

    code = "saturation_abort"

    def __init__(self, message, time=None, backlog=None):
        super().__init__(message)
        self.time = time
        self.backlog = backlog


class SimulationDeadlock(NocError):
    """Wormhole run where no flit could move although packets were in flight."""

    code = "simulation_deadlock"


class MalformedMatrix(NocError, ValueError):
    code = "malformed_matrix"
