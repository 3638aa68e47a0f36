"""Shared multiply-accumulate arithmetic for both accelerators.

Operands are signed 32-bit; the product is the exact 64-bit signed
value (no intermediate truncation) and accumulation wraps at 64 bits.
"""

import enum

from .bits import s32, s64, u32

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1


class Truncation(enum.Enum):
    WRAP = "wrap"
    SATURATE = "saturate"


def mac(accum, a, b):
    """accum + a*b with signed 32-bit operands, wrapped to signed 64-bit."""
    return s64(accum + s32(a) * s32(b))


def truncate_accumulator(accum, policy):
    """Narrow a signed 64-bit accumulator to a 32-bit word."""
    if policy is Truncation.SATURATE:
        return u32(max(INT32_MIN, min(INT32_MAX, accum)))
    return u32(accum)
