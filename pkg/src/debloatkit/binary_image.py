"""Read-only ELF model: header, sections, load segments and architecture.

Only what is needed to translate addresses and to pick a NOP encoding is
decoded.  The raw bytes are kept untouched so that the model can always be
written back bit-for-bit.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from typing import Optional

from .errors import (
    AmbiguousAddress,
    BadMagic,
    MalformedElf,
    Truncated,
    UnmappedAddress,
    UnsupportedArch,
)

ELF_MAGIC = b"\x7fELF"

ELFCLASS32 = 1
ELFCLASS64 = 2
ELFDATA2LSB = 1
ELFDATA2MSB = 2

PT_LOAD = 1
PF_X = 0x1
PF_W = 0x2

SHT_NULL = 0
SHT_NOBITS = 8
SHN_XINDEX = 0xFFFF

EF_ARM_BE8 = 0x00800000


class ArchName(enum.Enum):
    X86_32 = "x86_32"
    X86_64 = "x86_64"
    MIPS32 = "mips32"
    ARM32 = "arm32"
    SPARC32 = "sparc32"
    M68K32 = "m68k32"

    @classmethod
    def parse(cls, text: str) -> "ArchName":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise UnsupportedArch(f"unknown architecture name {text!r}") from None


class Endianness(enum.Enum):
    LITTLE = "little"
    BIG = "big"


class WordSize(enum.Enum):
    ELF32 = "elf32"
    ELF64 = "elf64"


# name -> (e_machine, instruction width, NOP as an integer word, default order)
_ARCH_TABLE: dict[ArchName, tuple[int, int, int, Endianness]] = {
    ArchName.X86_32: (3, 1, 0x90, Endianness.LITTLE),
    ArchName.X86_64: (62, 1, 0x90, Endianness.LITTLE),
    ArchName.MIPS32: (8, 4, 0x00000000, Endianness.BIG),  # sll $zero,$zero,0
    ArchName.ARM32: (40, 4, 0xE1A00000, Endianness.LITTLE),  # mov r0, r0
    ArchName.SPARC32: (2, 4, 0x01000000, Endianness.BIG),  # sethi 0, %g0
    ArchName.M68K32: (4, 2, 0x4E71, Endianness.BIG),
}

_BY_MACHINE = {entry[0]: name for name, entry in _ARCH_TABLE.items()}


@dataclass(frozen=True)
class Architecture:
    """An instruction set plus the byte order its instructions are stored in.

    ``endianness`` is the *instruction* storage order.  It equals the ELF
    data encoding except for BE8 ARM images, whose code is little-endian.
    """

    name: ArchName
    endianness: Endianness

    @classmethod
    def default(cls, name: ArchName | str) -> "Architecture":
        if isinstance(name, str):
            name = ArchName.parse(name)
        return cls(name, _ARCH_TABLE[name][3])

    @classmethod
    def from_machine(cls, machine: int, endianness: Endianness) -> "Architecture":
        try:
            return cls(_BY_MACHINE[machine], endianness)
        except KeyError:
            raise UnsupportedArch(f"unsupported e_machine {machine}") from None

    @property
    def machine(self) -> int:
        return _ARCH_TABLE[self.name][0]

    @property
    def instruction_width(self) -> int:
        return _ARCH_TABLE[self.name][1]

    @property
    def fixed_width(self) -> bool:
        return self.instruction_width > 1

    @property
    def nop_pattern(self) -> bytes:
        word = _ARCH_TABLE[self.name][2]
        return word.to_bytes(self.instruction_width, self.endianness.value)

    def __str__(self) -> str:
        return self.name.value


def nop_for(arch: Architecture | ArchName | str) -> bytes:
    """Canonical single NOP instruction for ``arch`` in its storage order."""
    if not isinstance(arch, Architecture):
        arch = Architecture.default(arch)
    return arch.nop_pattern


@dataclass(frozen=True)
class Section:
    name: str
    file_offset: int
    file_size: int
    vaddr: int
    flags: int
    sh_type: int = 0

    @property
    def executable(self) -> bool:
        return bool(self.flags & 0x4)

    @property
    def writable(self) -> bool:
        return bool(self.flags & 0x1)

    @property
    def alloc(self) -> bool:
        return bool(self.flags & 0x2)

    @property
    def end(self) -> int:
        return self.file_offset + self.file_size


@dataclass(frozen=True)
class LoadSegment:
    file_offset: int
    file_size: int
    vaddr: int
    mem_size: int
    flags: int = 0

    @property
    def executable(self) -> bool:
        return bool(self.flags & PF_X)

    @property
    def end(self) -> int:
        return self.file_offset + self.file_size


@dataclass(frozen=True)
class ElfImage:
    raw: bytes
    arch: Architecture
    word_size: WordSize
    data_endianness: Endianness
    entry: int
    e_flags: int
    sections: tuple[Section, ...]
    load_segments: tuple[LoadSegment, ...]

    def __len__(self) -> int:
        return len(self.raw)

    def to_bytes(self) -> bytes:
        return self.raw

    def executable_ranges(self) -> list[tuple[int, int]]:
        """File ranges ``[start, end)`` holding code.

        Executable sections are used when the image has any; otherwise the
        executable load segments (stripped or section-less binaries).
        """
        secs = [(s.file_offset, s.end) for s in self.sections if s.executable and s.file_size]
        if secs:
            return secs
        return [(g.file_offset, g.end) for g in self.load_segments if g.executable and g.file_size]

    def section_at(self, offset: int) -> Optional[Section]:
        for s in self.sections:
            if s.file_size and s.file_offset <= offset < s.end:
                return s
        return None


class _Reader:
    def __init__(self, raw: bytes, order: str):
        self.raw = raw
        self.order = order

    def unpack(self, fmt: str, offset: int, what: str) -> tuple:
        size = struct.calcsize(self.order + fmt)
        if offset < 0 or offset + size > len(self.raw):
            raise Truncated(f"{what} at offset {offset:#x} exceeds file length {len(self.raw)}")
        return struct.unpack_from(self.order + fmt, self.raw, offset)


def _cstring(raw: bytes, offset: int) -> str:
    if offset < 0 or offset >= len(raw):
        return ""
    end = raw.find(b"\x00", offset)
    if end < 0:
        end = len(raw)
    return raw[offset:end].decode("ascii", "replace")


def parse_elf(raw: bytes) -> ElfImage:
    """Parse a complete ELF file image.

    Raises BadMagic, Truncated, UnsupportedArch or MalformedElf.
    """
    raw = bytes(raw)
    head = raw[:4]
    if head != ELF_MAGIC[: len(head)] or not head:
        raise BadMagic("missing \\x7fELF signature")
    if len(raw) < 16:
        raise Truncated(f"{len(raw)} bytes cannot hold an ELF identification block")

    ei_class, ei_data = raw[4], raw[5]
    if ei_class == ELFCLASS32:
        word_size = WordSize.ELF32
    elif ei_class == ELFCLASS64:
        word_size = WordSize.ELF64
    else:
        raise MalformedElf(f"invalid EI_CLASS {ei_class}")
    if ei_data == ELFDATA2LSB:
        data_order, order = Endianness.LITTLE, "<"
    elif ei_data == ELFDATA2MSB:
        data_order, order = Endianness.BIG, ">"
    else:
        raise MalformedElf(f"invalid EI_DATA {ei_data}")

    rd = _Reader(raw, order)
    is64 = word_size is WordSize.ELF64
    if is64:
        (_, machine, _, entry, phoff, shoff, e_flags, _, phentsize, phnum,
         shentsize, shnum, shstrndx) = rd.unpack("HHIQQQIHHHHHH", 16, "ELF header")
    else:
        (_, machine, _, entry, phoff, shoff, e_flags, _, phentsize, phnum,
         shentsize, shnum, shstrndx) = rd.unpack("HHIIIIIHHHHHH", 16, "ELF header")

    arch_name = _BY_MACHINE.get(machine)
    if arch_name is None:
        raise UnsupportedArch(f"unsupported e_machine {machine}")
    if is64 and arch_name is not ArchName.X86_64:
        raise UnsupportedArch(f"64-bit {arch_name.value} images are not supported")
    code_order = data_order
    if arch_name is ArchName.ARM32 and data_order is Endianness.BIG and e_flags & EF_ARM_BE8:
        code_order = Endianness.LITTLE
    arch = Architecture(arch_name, code_order)

    segments = _parse_segments(rd, is64, phoff, phentsize, phnum)
    sections = _parse_sections(rd, is64, shoff, shentsize, shnum, shstrndx)

    return ElfImage(
        raw=raw,
        arch=arch,
        word_size=word_size,
        data_endianness=data_order,
        entry=entry,
        e_flags=e_flags,
        sections=tuple(sections),
        load_segments=tuple(segments),
    )


def _parse_segments(rd: _Reader, is64: bool, phoff: int, phentsize: int, phnum: int) -> list[LoadSegment]:
    if phnum == 0:
        return []
    expected = 56 if is64 else 32
    if phentsize != expected:
        raise MalformedElf(f"e_phentsize {phentsize}, expected {expected}")
    if phoff + phnum * phentsize > len(rd.raw):
        raise Truncated("program header table exceeds file length")
    segments = []
    for i in range(phnum):
        at = phoff + i * phentsize
        if is64:
            p_type, p_flags, p_offset, p_vaddr, _, p_filesz, p_memsz, _ = rd.unpack("IIQQQQQQ", at, "program header")
        else:
            p_type, p_offset, p_vaddr, _, p_filesz, p_memsz, p_flags, _ = rd.unpack("IIIIIIII", at, "program header")
        if p_type != PT_LOAD:
            continue
        if p_offset + p_filesz > len(rd.raw):
            raise Truncated(f"load segment {i} [{p_offset:#x}+{p_filesz:#x}] exceeds file length")
        if p_filesz > p_memsz:
            raise MalformedElf(f"load segment {i} has p_filesz > p_memsz")
        segments.append(LoadSegment(p_offset, p_filesz, p_vaddr, p_memsz, p_flags))
    return segments


def _parse_sections(rd: _Reader, is64: bool, shoff: int, shentsize: int, shnum: int,
                    shstrndx: int) -> list[Section]:
    if shoff == 0:
        return []
    expected = 64 if is64 else 40
    if shentsize != expected:
        raise MalformedElf(f"e_shentsize {shentsize}, expected {expected}")
    fmt = "IIQQQQIIQQ" if is64 else "IIIIIIIIII"

    headers = []
    first = rd.unpack(fmt, shoff, "section header 0")
    if shnum == 0:
        shnum = first[5]  # extended numbering keeps the count in sh_size
    if shstrndx == SHN_XINDEX:
        shstrndx = first[6]
    if shoff + shnum * shentsize > len(rd.raw):
        raise Truncated("section header table exceeds file length")
    for i in range(shnum):
        headers.append(rd.unpack(fmt, shoff + i * shentsize, "section header"))

    strtab_off = None
    if 0 < shstrndx < len(headers):
        strtab_off = headers[shstrndx][4]

    sections = []
    for i, (sh_name, sh_type, sh_flags, sh_addr, sh_offset, sh_size, *_rest) in enumerate(headers):
        if i == 0 and sh_type == SHT_NULL:
            continue
        file_size = 0 if sh_type == SHT_NOBITS else sh_size
        if file_size and sh_offset + file_size > len(rd.raw):
            raise Truncated(f"section {i} [{sh_offset:#x}+{file_size:#x}] exceeds file length")
        name = _cstring(rd.raw, strtab_off + sh_name) if strtab_off is not None else ""
        sections.append(Section(name, sh_offset, file_size, sh_addr, sh_flags, sh_type))
    return sections


def vaddr_to_offset(image: ElfImage, vaddr: int) -> int:
    """Translate a virtual address to a file offset via the load segments.

    Only the file-backed part of a segment is mappable; the zero-filled tail
    (``mem_size > file_size``) has no bytes to patch.
    """
    hits = [g for g in image.load_segments if g.vaddr <= vaddr < g.vaddr + g.file_size]
    if not hits:
        raise UnmappedAddress(f"no load segment backs vaddr {vaddr:#x}")
    if len(hits) > 1:
        raise AmbiguousAddress(f"vaddr {vaddr:#x} is covered by {len(hits)} load segments")
    seg = hits[0]
    return seg.file_offset + (vaddr - seg.vaddr)


def segment_for_vaddr(image: ElfImage, vaddr: int) -> LoadSegment:
    vaddr_to_offset(image, vaddr)
    return next(g for g in image.load_segments if g.vaddr <= vaddr < g.vaddr + g.file_size)
