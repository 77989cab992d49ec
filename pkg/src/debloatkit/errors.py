"""Exception hierarchy shared by every debloatkit module."""


class DebloatError(Exception):
    """Base class for all errors raised by debloatkit."""


# --- ELF model -------------------------------------------------------------

class ElfError(DebloatError):
    pass


class BadMagic(ElfError):
    pass


class Truncated(ElfError):
    pass


class UnsupportedArch(ElfError):
    pass


class MalformedElf(ElfError):
    """Header fields are inconsistent (bad class/data byte, entry sizes...)."""


class UnmappedAddress(ElfError):
    pass


class AmbiguousAddress(ElfError):
    pass


# --- patching --------------------------------------------------------------

class PatchError(DebloatError):
    pass


class OutOfBounds(PatchError):
    pass


class MisalignedRegion(PatchError):
    pass


class OverlappingRegions(PatchError):
    pass


class NonExecutableTarget(PatchError):
    pass


class LengthMismatch(PatchError):
    pass


class PlanTargetMismatch(PatchError):
    pass


class PlanFormatError(DebloatError):
    """A plan or signature file does not follow its JSON schema."""


# --- source slimming -------------------------------------------------------

class SlimError(DebloatError):
    pass


class UnsupportedLanguage(SlimError):
    pass


class LineOutOfRange(SlimError):
    pass


# --- metrics ---------------------------------------------------------------

class MetricsError(DebloatError, ValueError):
    pass


class ZeroOriginal(MetricsError):
    pass


class ZeroTotal(MetricsError):
    pass


class EmptyInput(MetricsError):
    pass


# --- scanning --------------------------------------------------------------

class ScanError(DebloatError):
    pass


class DuplicateSignatureId(ScanError):
    pass


class AuthError(ScanError):
    pass


class QuotaExceeded(ScanError):
    pass


class PendingTimeout(ScanError):
    pass


class ProtocolError(ScanError):
    pass


# --- pipeline --------------------------------------------------------------

class ConfigError(DebloatError):
    pass


class PlanNotFound(DebloatError):
    pass
