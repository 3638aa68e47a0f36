"""Global address map, instruction ROM, and data SRAM.

The 32-bit address space is split into five fixed regions; everything
else is unmapped.  Both memories are 32 KB (8192 words), single-port,
zero-initialized, and serviced in one cycle per access.
"""

from __future__ import annotations

import enum

from .bits import u32

INST_BASE = 0x0000_0000
INST_END = 0x0000_7FFF
DATA_BASE = 0x0000_8000
DATA_END = 0x0000_FFFF
CONV_BASE = 0x0100_0000
CONV_END = 0x0100_00FF
DOT_BASE = 0x0100_0100
DOT_END = 0x0100_01FF
RESERVED_BASE = 0x0100_0200
RESERVED_END = 0x0100_02FF

MEM_WORDS = 8192  # 32 KB per memory


class Region(enum.Enum):
    INST_MEM = "inst_mem"
    DATA_MEM = "data_mem"
    CONV_REGS = "conv_regs"
    DOT_REGS = "dot_regs"
    RESERVED = "reserved"
    UNMAPPED = "unmapped"


_REGIONS = (
    (INST_BASE, INST_END, Region.INST_MEM),
    (DATA_BASE, DATA_END, Region.DATA_MEM),
    (CONV_BASE, CONV_END, Region.CONV_REGS),
    (DOT_BASE, DOT_END, Region.DOT_REGS),
    (RESERVED_BASE, RESERVED_END, Region.RESERVED),
)


class MisalignedAddressError(Exception):
    """Bus-level access whose byte address is not word-aligned."""

    def __init__(self, addr):
        self.addr = addr
        super().__init__(f"misaligned bus address 0x{addr:08x}")


class MemoryAccessError(Exception):
    """Out-of-range or otherwise invalid memory access."""


def decode_address(addr):
    """Map a word-aligned byte address to (Region, region-local offset)."""
    addr = u32(addr)
    if addr % 4 != 0:
        raise MisalignedAddressError(addr)
    for base, end, region in _REGIONS:
        if base <= addr <= end:
            return region, addr - base
    return Region.UNMAPPED, addr


class Rom:
    """Single-port 32 KB instruction ROM; writable only through load()."""

    def __init__(self, base=INST_BASE):
        self.base = base
        self.words = [0] * MEM_WORDS

    def load(self, words, word_offset=0):
        if word_offset + len(words) > MEM_WORDS:
            raise MemoryAccessError("ROM image does not fit")
        for i, w in enumerate(words):
            self.words[word_offset + i] = u32(w)

    def read_word(self, byte_offset):
        idx = byte_offset >> 2
        if byte_offset % 4 != 0:
            raise MisalignedAddressError(self.base + byte_offset)
        if not 0 <= idx < MEM_WORDS:
            raise MemoryAccessError(f"ROM read out of range: offset 0x{byte_offset:x}")
        return self.words[idx]


class Sram:
    """Single-port 32 KB data SRAM; word reads/writes with byte strobes."""

    def __init__(self, base=DATA_BASE):
        self.base = base
        self.words = [0] * MEM_WORDS

    def _index(self, byte_offset):
        if byte_offset % 4 != 0:
            raise MisalignedAddressError(self.base + byte_offset)
        idx = byte_offset >> 2
        if not 0 <= idx < MEM_WORDS:
            raise MemoryAccessError(f"SRAM access out of range: offset 0x{byte_offset:x}")
        return idx

    def read_word(self, byte_offset):
        return self.words[self._index(byte_offset)]

    def write_word(self, byte_offset, value, strobe=0b1111):
        idx = self._index(byte_offset)
        value = u32(value)
        if strobe == 0b1111:
            self.words[idx] = value
        else:
            old = self.words[idx]
            merged = 0
            for lane in range(4):
                src = value if strobe & (1 << lane) else old
                merged |= src & (0xFF << (8 * lane))
            self.words[idx] = merged
        return self.words[idx]


class HexwordsError(Exception):
    """Malformed memory image file."""


def parse_hexwords(text):
    """Parse a hexwords image into a list of (byte address, word) pairs.

    Grammar: `@XXXXXXXX` moves the load cursor to that byte address, any
    other non-empty line is exactly 8 hex digits stored at the cursor
    (cursor advances by 4).  `#` starts a comment line.
    """
    cursor = 0
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            body = line[1:]
            if len(body) != 8:
                raise HexwordsError(f"line {lineno}: cursor needs 8 hex digits")
            try:
                cursor = int(body, 16)
            except ValueError:
                raise HexwordsError(f"line {lineno}: bad cursor {line!r}") from None
            continue
        if len(line) != 8:
            raise HexwordsError(f"line {lineno}: word needs exactly 8 hex digits")
        try:
            word = int(line, 16)
        except ValueError:
            raise HexwordsError(f"line {lineno}: bad word {line!r}") from None
        out.append((cursor, word))
        cursor += 4
    return out


def dump_hexwords(words, base):
    """Render a word list as a hexwords image starting at `base`."""
    lines = [f"@{u32(base):08X}"]
    lines.extend(f"{u32(w):08X}" for w in words)
    return "\n".join(lines) + "\n"


def load_image(text, rom, sram):
    """Load a hexwords image into ROM/SRAM, routed by decoded region."""
    for addr, word in parse_hexwords(text):
        region, offset = decode_address(addr)
        if region is Region.INST_MEM:
            rom.words[offset >> 2] = u32(word)
        elif region is Region.DATA_MEM:
            sram.write_word(offset, word)
        else:
            raise HexwordsError(f"image word at 0x{addr:08x} targets {region.value}")
