"""Exception hierarchy; every error carries the CLI exit code it maps to."""
from typing import Any, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_INTEGRITY = 3
EXIT_POLICY = 4
EXIT_TRANSPORT = 5

EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_USAGE: "usage error",
    EXIT_FORMAT: "format/parse error",
    EXIT_INTEGRITY: "integrity mismatch",
    EXIT_POLICY: "policy denied",
    EXIT_TRANSPORT: "transport error",
}


class StashkitError(Exception):
    """Base class for all stashkit errors."""
    exit_code = EXIT_USAGE

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message or self.__class__.__name__)
        self.context = context
        # Partial BootReport attached by bootsim when a step fails
        self.report: Optional[Any] = None


class ConfigError(StashkitError):
    """Unreadable or invalid configuration file."""
    exit_code = EXIT_USAGE


# Archive

class ArchiveError(StashkitError):
    exit_code = EXIT_FORMAT


class DuplicateName(ArchiveError):
    pass


class InvalidName(ArchiveError):
    pass


class BodyTooLarge(ArchiveError):
    pass


class BadMagic(ArchiveError):
    pass


class TruncatedStream(ArchiveError):
    pass


class HeaderFieldNotHex(ArchiveError):
    pass


class MissingTrailer(ArchiveError):
    pass


# Stash

class StashError(StashkitError):
    exit_code = EXIT_USAGE


class PayloadTooLarge(StashError):
    pass


class ZeroSeed(StashError):
    pass


class EmptyPattern(StashError):
    pass


class PatternTooLong(StashError):
    pass


class CrcMismatch(StashError):
    exit_code = EXIT_INTEGRITY


class OutOfBounds(StashError):
    exit_code = EXIT_INTEGRITY


class FooterNotFound(StashError):
    exit_code = EXIT_INTEGRITY


class ManifestFormatError(StashError):
    exit_code = EXIT_FORMAT


# Boot simulation

class BootError(StashkitError):
    exit_code = EXIT_USAGE


class StagingNotEmpty(BootError):
    pass


class ChrootEscape(BootError):
    pass


class PolicyDenied(BootError):
    exit_code = EXIT_POLICY


# Gestures

class GestureError(StashkitError):
    exit_code = EXIT_FORMAT


class TruncatedRecord(GestureError):
    pass


class UnorderedEvents(GestureError):
    pass


# Tether

class TetherError(StashkitError):
    exit_code = EXIT_USAGE


class BadEndpoint(TetherError):
    pass


class BadCidr(TetherError):
    pass


class NotUp(TetherError):
    pass


class InvalidTransition(TetherError):
    pass


class MalformedRequest(TetherError):
    exit_code = EXIT_FORMAT


class FrameTooLarge(TetherError):
    exit_code = EXIT_FORMAT


class Truncated(TetherError):
    exit_code = EXIT_TRANSPORT


class TransportClosed(TetherError):
    exit_code = EXIT_TRANSPORT


class Timeout(TetherError):
    exit_code = EXIT_TRANSPORT


class RemoteError(TetherError):
    exit_code = EXIT_TRANSPORT
