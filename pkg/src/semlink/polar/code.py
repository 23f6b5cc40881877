"""Polar code construction, encoding, and decoding.

Conventions (shared with the kernels):

* Encoding is ``x = u F^{(x)n}`` in natural bit order, no interleaving.
* ``k_info`` counts every non-frozen position.  When ``crc_width`` is
  non-zero the CRC bits ride inside those positions, so the payload per
  block is ``k_info - crc_width`` bits.
* LLR inputs follow the package-wide sign convention (positive favours
  bit 0) and are clipped to ``LLR_CLIP`` before decoding to keep list
  metrics bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..core import BitBlock, InputError, LengthError, LlrBlock, ParameterError
from .crc import SUPPORTED_WIDTHS, crc_attach, crc_check
from .reliability import nr_ordering
from .. import _kernels

LLR_CLIP = 40.0

_VALID_LIST_SIZES = (1, 2, 4, 8, 16, 32)


@dataclass(frozen=True, eq=False)
class PolarCodeSpec:
    """Frozen description of one (N, K) polar code."""

    n_codeword: int
    k_info: int
    frozen_set: np.ndarray
    info_set: np.ndarray
    crc_width: int = 0

    def __post_init__(self):
        frozen = np.ascontiguousarray(self.frozen_set, dtype=np.int64)
        info = np.ascontiguousarray(self.info_set, dtype=np.int64)
        frozen.setflags(write=False)
        info.setflags(write=False)
        object.__setattr__(self, "frozen_set", frozen)
        object.__setattr__(self, "info_set", info)

    @property
    def payload_bits(self) -> int:
        """Caller-visible bits per block (CRC excluded)."""
        return self.k_info - self.crc_width

    @property
    def code_rate(self) -> float:
        return self.k_info / self.n_codeword

    @cached_property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_codeword, dtype=np.uint8)
        mask[self.frozen_set] = 1
        mask.setflags(write=False)
        return mask


def construct_code(n_codeword: int, k_info: int, ordering=None,
                   crc_width: int = 0) -> PolarCodeSpec:
    """Build a code spec by freezing the least reliable positions.

    ``ordering`` is a length-N permutation listing bit indices in ascending
    reliability; the first ``N - K`` entries become frozen.  ``None`` selects
    the embedded NR ordering.
    """
    n_levels = n_codeword.bit_length() - 1
    if n_codeword < 2 or (1 << n_levels) != n_codeword:
        raise ParameterError(f"code length must be a power of two >= 2, got {n_codeword}")
    if not 1 <= k_info <= n_codeword:
        raise ParameterError(f"k_info must be in [1, {n_codeword}], got {k_info}")
    if crc_width not in SUPPORTED_WIDTHS:
        raise ParameterError(f"unsupported CRC width {crc_width}")
    if crc_width >= k_info:
        raise ParameterError(f"CRC width {crc_width} leaves no payload in k_info={k_info}")
    if ordering is None:
        order = nr_ordering(n_codeword)
    else:
        order = np.ascontiguousarray(ordering, dtype=np.int64)
        if order.shape != (n_codeword,) or not np.array_equal(
                np.sort(order), np.arange(n_codeword)):
            raise ParameterError("ordering must be a permutation of range(n_codeword)")
    frozen = np.sort(order[:n_codeword - k_info])
    info = np.sort(order[n_codeword - k_info:])
    return PolarCodeSpec(n_codeword, k_info, frozen, info, crc_width)


def encode_batch(spec: PolarCodeSpec, payload: np.ndarray) -> np.ndarray:
    """Encode (B, payload_bits) hard bits into (B, N) codewords."""
    payload = np.ascontiguousarray(payload, dtype=np.uint8)
    if payload.ndim != 2 or payload.shape[1] != spec.payload_bits:
        raise LengthError(
            f"expected (batch, {spec.payload_bits}) payload bits, got {payload.shape}")
    if spec.crc_width:
        with_crc = np.empty((payload.shape[0], spec.k_info), dtype=np.uint8)
        for i, row in enumerate(payload):
            with_crc[i] = crc_attach(BitBlock(row), spec.crc_width).bits
    else:
        with_crc = payload
    u = np.zeros((payload.shape[0], spec.n_codeword), dtype=np.uint8)
    u[:, spec.info_set] = with_crc
    return _kernels.encode_blocks(u)


def _clip_llrs(llrs: np.ndarray, n_codeword: int) -> np.ndarray:
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.ndim != 2 or llrs.shape[1] != n_codeword:
        raise LengthError(f"expected (batch, {n_codeword}) LLRs, got {llrs.shape}")
    if not np.all(np.isfinite(llrs)):
        raise InputError("LLR input contains non-finite values")
    return np.clip(llrs, -LLR_CLIP, LLR_CLIP)


def decode_sc_batch(spec: PolarCodeSpec, llrs: np.ndarray) -> np.ndarray:
    """Successive-cancellation decode; returns (B, payload_bits) hard bits."""
    lam = _clip_llrs(llrs, spec.n_codeword)
    uhat = _kernels.sc_decode_blocks(lam, spec.frozen_mask)
    info = uhat[:, spec.info_set]
    if spec.crc_width:
        return np.ascontiguousarray(info[:, :spec.payload_bits])
    return info


def decode_scl_batch(spec: PolarCodeSpec, llrs: np.ndarray,
                     list_size: int = 8) -> np.ndarray:
    """List decode; CRC-aided path selection when the code carries a CRC.

    Picks the best-metric path whose CRC checks, falling back to the best
    metric overall when none does (or when the code has no CRC).
    """
    if list_size not in _VALID_LIST_SIZES:
        raise ParameterError(f"list size must be one of {_VALID_LIST_SIZES}, got {list_size}")
    lam = _clip_llrs(llrs, spec.n_codeword)
    out = np.empty((lam.shape[0], spec.payload_bits), dtype=np.uint8)
    for b in range(lam.shape[0]):
        paths, _metrics = _kernels.scl_decode(lam[b], spec.frozen_mask, list_size)
        info_paths = paths[:, spec.info_set]
        chosen = info_paths[0]
        if spec.crc_width:
            for cand in info_paths:
                if crc_check(BitBlock(cand), spec.crc_width):
                    chosen = cand
                    break
        out[b] = chosen[:spec.payload_bits]
    return out


def polar_encode(spec: PolarCodeSpec, info: BitBlock) -> BitBlock:
    """Encode one payload block of ``spec.payload_bits`` bits."""
    if len(info) != spec.payload_bits:
        raise LengthError(f"expected {spec.payload_bits} payload bits, got {len(info)}")
    return BitBlock(encode_batch(spec, info.bits[None, :])[0])


def polar_decode_sc(spec: PolarCodeSpec, llrs: LlrBlock) -> BitBlock:
    """Successive-cancellation decode of one block."""
    return BitBlock(decode_sc_batch(spec, llrs.llrs[None, :])[0])


def polar_decode_scl(spec: PolarCodeSpec, llrs: LlrBlock,
                     list_size: int = 8) -> BitBlock:
    """CRC-aided list decode of one block."""
    return BitBlock(decode_scl_batch(spec, llrs.llrs[None, :], list_size)[0])
