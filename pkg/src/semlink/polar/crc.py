"""CRC attachment and checking for list-decoded blocks.

Two generator polynomials are supported, the 11-bit and 24-bit "C" variants
used by 5G-NR uplink polar coding:

    g11(D) = D^11 + D^10 + D^9 + D^5 + 1
    g24(D) = D^24 + D^23 + D^21 + D^20 + D^17 + D^15 + D^13 + D^12
             + D^8  + D^4  + D^2  + D    + 1

Bits are processed most significant first; the appended remainder makes the
whole sequence divisible by the generator.
"""

from __future__ import annotations

import numpy as np

from ..core import BitBlock, ParameterError

_POLY_EXPONENTS = {
    11: (11, 10, 9, 5, 0),
    24: (24, 23, 21, 20, 17, 15, 13, 12, 8, 4, 2, 1, 0),
}

_POLYS = {width: sum(1 << e for e in exps) for width, exps in _POLY_EXPONENTS.items()}

SUPPORTED_WIDTHS = (0, 11, 24)


def _remainder(bits: np.ndarray, width: int) -> int:
    poly = _POLYS[width]
    top = 1 << width
    reg = 0
    for bit in bits:
        reg = (reg << 1) | int(bit)
        if reg & top:
            reg ^= poly
    # Flush `width` zero bits (equivalent to multiplying by D^width).
    for _ in range(width):
        reg <<= 1
        if reg & top:
            reg ^= poly
    return reg


def crc_attach(block: BitBlock, width: int) -> BitBlock:
    """Append a ``width``-bit CRC; ``width`` 0 returns the block unchanged."""
    if width not in SUPPORTED_WIDTHS:
        raise ParameterError(f"unsupported CRC width {width}, expected one of {SUPPORTED_WIDTHS}")
    if width == 0:
        return block
    rem = _remainder(block.bits, width)
    tail = np.array([(rem >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)
    return BitBlock(np.concatenate([block.bits, tail]))


def crc_check(block: BitBlock, width: int) -> bool:
    """True when the trailing ``width`` bits are a valid CRC for the rest."""
    if width not in SUPPORTED_WIDTHS:
        raise ParameterError(f"unsupported CRC width {width}, expected one of {SUPPORTED_WIDTHS}")
    if width == 0:
        return True
    if len(block) < width:
        return False
    reg = 0
    poly = _POLYS[width]
    top = 1 << width
    for bit in block.bits:
        reg = (reg << 1) | int(bit)
        if reg & top:
            reg ^= poly
    return reg == 0
