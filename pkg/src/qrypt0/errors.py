"""Exception hierarchy shared by all qrypt0 modules.

Every error raised by this package derives from Qrypt0Error. The CLI maps
the three intermediate bases onto its exit-code classes: CorruptionError
(tampering, damage, replay) is exit 1, UsageError is exit 2, and
StorageError (state or file I/O) is exit 3.
"""


class Qrypt0Error(Exception):
    """Base class for all qrypt0 errors."""


class CorruptionError(Qrypt0Error):
    """Input failed authentication or is structurally damaged."""


class UsageError(Qrypt0Error):
    """The caller violated a precondition (bad argument, oversize body)."""


class StorageError(Qrypt0Error):
    """Persistent state or file I/O failed."""


# --- envelope ---

class BodyTooLong(UsageError):
    """Message body exceeds the profile's maximum."""


class BadLength(CorruptionError):
    """Byte string has the wrong length for its declared layout."""


class BadPadding(CorruptionError):
    """A padding byte is nonzero; the envelope is corrupt."""


class BadBodyLen(CorruptionError):
    """Encoded body length exceeds what the envelope can hold."""


# --- crypto suite ---

class EmptyPassphrase(UsageError):
    """Key derivation requires a non-empty passphrase."""


class BadChannelId(UsageError):
    """Channel id is empty, non-ASCII, or contains a forbidden character."""


class BadMagic(CorruptionError):
    """Frame does not start with the expected magic bytes."""


class UnsupportedVersion(CorruptionError):
    """Frame declares a wire version or ciphersuite this build cannot read."""


class AuthFailure(CorruptionError):
    """MAC verification failed; the frame is rejected before decryption."""


class EntropyUnavailable(StorageError):
    """The operating system's secure random source is unavailable."""


# --- Reed-Solomon / QR ---

class TooManyErrors(CorruptionError):
    """Corruption exceeds the Reed-Solomon correction capacity."""


class PayloadTooLarge(UsageError):
    """Payload does not fit any QR version at the requested EC level."""


class NoSymbolFound(CorruptionError):
    """The image contains no recognizable QR symbol."""


class FormatInfoUnreadable(CorruptionError):
    """Neither format-information copy decodes within 3 bit errors."""


class VersionInfoUnreadable(CorruptionError):
    """Neither version-information copy decodes within 3 bit errors."""


class StructureMismatch(CorruptionError):
    """Decoded symbol content contradicts its declared structure."""


class MalformedImageFile(CorruptionError):
    """Image file does not parse as the expected PBM layout."""


class IoFailure(StorageError):
    """File read or write failed."""


# --- channel state ---

class StateIoFailure(StorageError):
    """Channel state file could not be read or written."""


class CorruptState(CorruptionError):
    """Channel state file is malformed; refusing to reset counters."""


class AlreadyExists(UsageError):
    """Channel is already initialized."""


class NotARegularFile(UsageError):
    """Secure erase only operates on regular files."""
