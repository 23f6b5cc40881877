"""Gray-labelled 16-QAM mapping and soft demapping.

Label convention: four bits (b0, b1, b2, b3), first bit arriving first,
index the constellation as ``idx = 8*b0 + 4*b1 + 2*b2 + b3``.  The point
for a label is

    (1/sqrt(10)) * [ (1-2*b0) * (2 - (1-2*b2)) + 1j * (1-2*b1) * (2 - (1-2*b3)) ]

which is the NR 16-QAM layout: b0/b1 select the quadrant, b2/b3 the inner
or outer amplitude per axis, and neighbouring points always differ in
exactly one bit.  Average symbol energy is 1.

Demapping returns one LLR per bit, positive favouring bit 0, clipped to
``LLR_CLIP`` to keep downstream decoder path metrics bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BitBlock,
    InputError,
    LengthError,
    LlrBlock,
    ParameterError,
    SymbolFrame,
)

LLR_CLIP = 40.0


@dataclass(frozen=True, eq=False)
class ConstellationSpec:
    """A unit-energy constellation with integer labels equal to point index."""

    order: int
    bits_per_symbol: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.complex128)
        if pts.shape != (self.order,):
            raise ParameterError(f"expected {self.order} points, got shape {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def _build_qam16() -> ConstellationSpec:
    labels = np.arange(16)
    b0 = (labels >> 3) & 1
    b1 = (labels >> 2) & 1
    b2 = (labels >> 1) & 1
    b3 = labels & 1
    re = (1 - 2 * b0) * (2 - (1 - 2 * b2))
    im = (1 - 2 * b1) * (2 - (1 - 2 * b3))
    return ConstellationSpec(16, 4, (re + 1j * im) / np.sqrt(10.0))


QAM16 = _build_qam16()

# Index sets with bit i equal to 0 / 1, precomputed per bit position.
_BIT0_SETS = tuple(
    np.flatnonzero(((np.arange(16) >> (3 - i)) & 1) == 0) for i in range(4)
)
_BIT1_SETS = tuple(
    np.flatnonzero(((np.arange(16) >> (3 - i)) & 1) == 1) for i in range(4)
)

_WEIGHTS = np.array([8, 4, 2, 1], dtype=np.uint8)


def map_symbols(bits: BitBlock, spec: ConstellationSpec = QAM16) -> SymbolFrame:
    """Map hard bits to symbols, ``bits_per_symbol`` bits per symbol."""
    bps = spec.bits_per_symbol
    if len(bits) % bps:
        raise LengthError(f"bit count {len(bits)} is not a multiple of {bps}")
    idx = bits.bits.reshape(-1, bps) @ _WEIGHTS[-bps:]
    return SymbolFrame(spec.points[idx])


def _logsumexp_neg(d2: np.ndarray) -> np.ndarray:
    # log(sum(exp(-d2))) along the last axis, stable for large distances.
    m = d2.min(axis=-1)
    return -m + np.log(np.exp(m[..., None] - d2).sum(axis=-1))


def demap_llr(received: SymbolFrame, csi, noise_var: float,
              spec: ConstellationSpec = QAM16, method: str = "exact") -> LlrBlock:
    """Per-bit LLRs from received symbols under Gaussian noise.

    ``csi`` is the complex channel gain: ``None`` or a scalar for a flat
    channel, or one coefficient per symbol.  ``method`` is "exact" for the
    full log-sum-exp metric or "maxlog" for the nearest-point approximation.
    """
    if method not in ("exact", "maxlog"):
        raise ParameterError(f"unknown demapping method {method!r}")
    if not noise_var > 0:
        raise ParameterError(f"noise_var must be positive, got {noise_var}")
    y = received.symbols
    if csi is None:
        h = np.ones(1, dtype=np.complex128)
    else:
        h = np.atleast_1d(np.asarray(csi, dtype=np.complex128))
        if h.size not in (1, y.size):
            raise LengthError(f"csi length {h.size} does not match {y.size} symbols")
        if not np.all(np.isfinite(h.view(np.float64))):
            raise InputError("csi contains non-finite values")
    if y.size and not np.all(np.isfinite(y.view(np.float64))):
        raise InputError("received symbols contain non-finite values")

    d2 = np.abs(y[:, None] - h[:, None] * spec.points[None, :]) ** 2 / noise_var
    bps = spec.bits_per_symbol
    llr = np.empty((y.size, bps), dtype=np.float64)
    for i in range(bps):
        if method == "exact":
            llr[:, i] = _logsumexp_neg(d2[:, _BIT0_SETS[i]]) - _logsumexp_neg(
                d2[:, _BIT1_SETS[i]])
        else:
            llr[:, i] = d2[:, _BIT1_SETS[i]].min(axis=1) - d2[:, _BIT0_SETS[i]].min(axis=1)
    return LlrBlock(np.clip(llr.reshape(-1), -LLR_CLIP, LLR_CLIP))
