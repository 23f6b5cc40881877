"""Shared interchange types, error taxonomy, and bit packing.

Bit order convention used everywhere in this package: the first bit of a
block is the most significant bit of the first byte.  ``pack_bits`` and
``unpack_bits`` are the single source of truth for that convention; the
modulator, the tensor bridge, and the wire protocol all build on it.

LLR sign convention: positive LLR means bit 0 is more likely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LinkError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(LinkError, ValueError):
    """A configuration or argument value is out of contract."""


class LengthError(LinkError, ValueError):
    """An input has the wrong length for the requested operation."""


class InputError(LinkError, ValueError):
    """Input data is malformed (non-finite values, bad symbols)."""


class CapacityError(ParameterError):
    """Data does not fit the fixed-width fields of a serialized layout."""


class FrameError(LinkError):
    """A received frame failed structural validation."""


class TransportError(LinkError):
    """Communication with an external codec process failed."""


def _as_bit_array(bits) -> np.ndarray:
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ParameterError(f"bit vector must be 1-D, got shape {arr.shape}")
    if arr.size and int(arr.max()) > 1:
        raise ParameterError("bit values must be 0 or 1")
    return arr


@dataclass(frozen=True, eq=False)
class BitBlock:
    """Immutable 1-D vector of hard bits (uint8 values 0/1)."""

    bits: np.ndarray

    def __post_init__(self):
        arr = _as_bit_array(self.bits)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitBlock):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


@dataclass(frozen=True, eq=False)
class LlrBlock:
    """Immutable 1-D vector of log-likelihood ratios (float64, finite).

    Positive values favour bit 0.
    """

    llrs: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.llrs, dtype=np.float64)
        if arr.ndim != 1:
            raise ParameterError(f"LLR vector must be 1-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("LLR vector contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "llrs", arr)

    def __len__(self) -> int:
        return self.llrs.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, LlrBlock):
            return NotImplemented
        return np.array_equal(self.llrs, other.llrs)


@dataclass(frozen=True, eq=False)
class SymbolFrame:
    """Immutable 1-D vector of complex channel symbols."""

    symbols: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.symbols, dtype=np.complex128)
        if arr.ndim != 1:
            raise ParameterError(f"symbol vector must be 1-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return self.symbols.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolFrame):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)


@dataclass(frozen=True, eq=False)
class HiddenTensor:
    """Immutable 2-D float32 tensor produced or consumed by a semantic codec.

    Both dimensions must be at least 1.  Values are not range-checked here:
    squashing guarantees [-1, 1], but the raw deserialization path can
    legitimately carry non-finite values (that fragility is part of what the
    simulator measures).
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float32)
        if arr.ndim != 2:
            raise ParameterError(f"tensor must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError(f"tensor dimensions must be >= 1, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, HiddenTensor):
            return NotImplemented
        if self.values.shape != other.values.shape:
            return False
        # NaN-aware equality: raw-mode tensors may carry NaN payloads.
        return bool(
            np.array_equal(
                self.values.view(np.uint32), other.values.view(np.uint32)
            )
        )


def pack_bits(block: BitBlock | np.ndarray) -> bytes:
    """Pack bits into bytes, first bit to the most significant position.

    The final byte is zero-padded on the right when the bit count is not a
    multiple of eight.
    """
    bits = block.bits if isinstance(block, BitBlock) else _as_bit_array(block)
    return np.packbits(bits).tobytes()


def unpack_bits(data: bytes, bit_count: int) -> BitBlock:
    """Unpack ``bit_count`` bits from bytes, MSB of each byte first."""
    if bit_count < 0:
        raise ParameterError("bit_count must be non-negative")
    if bit_count > 8 * len(data):
        raise LengthError(
            f"requested {bit_count} bits but only {8 * len(data)} are available"
        )
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=bit_count)
    return BitBlock(arr)
