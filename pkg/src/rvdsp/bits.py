"""Two's-complement helpers for 32/64-bit integer views."""

MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF


def u32(x):
    return x & MASK32


def s32(x):
    x &= MASK32
    return x - 0x1_0000_0000 if x & 0x8000_0000 else x


def u64(x):
    return x & MASK64


def s64(x):
    x &= MASK64
    return x - 0x1_0000_0000_0000_0000 if x >> 63 else x


def sext(value, bits):
    """Sign-extend the low `bits` bits of value to a Python int."""
    value &= (1 << bits) - 1
    if value & (1 << (bits - 1)):
        value -= 1 << bits
    return value
