"""AWGN and Rayleigh channels with counter-based, reproducible noise.

Randomness policy: every stochastic operation draws from a Philox generator
seeded through ``make_rng``.  Philox is counter-based, so streams derived
from the same key material are identical across platforms, processes, and
worker counts.  Substreams mix the user seed with integer stream indices via
``numpy.random.SeedSequence`` entropy lists: ``make_rng(seed, a, b, c)`` is
the documented mixing function used throughout the package.

Eb/N0 accounting assumes unit-energy symbols:

    Es/N0 = 10^(ebno_db/10) * code_rate * bits_per_symbol
    noise_var = N0 = 1 / (Es/N0)

The complex noise is CN(0, noise_var), i.e. variance ``noise_var/2`` per
real dimension.  Rayleigh fading draws per-symbol coefficients h ~ CN(0, 1)
(Jakes-free block model: one coefficient per ``fading_block`` symbols) and
returns them as perfect receiver CSI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InputError, ParameterError, SymbolFrame

CHANNEL_KINDS = ("awgn", "rayleigh")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed`` mixed with integer stream indices."""
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    entropy = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *stream: int) -> int:
    """Collapse (seed, stream indices) into one 63-bit child seed."""
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    entropy = [int(seed)] + [int(s) for s in stream]
    state = np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0]
    return int(state >> np.uint64(1))


def ebno_to_noise_var(ebno_db: float, code_rate: float, bits_per_symbol: int) -> float:
    """Complex noise variance for unit-energy symbols at the given Eb/N0."""
    if not np.isfinite(ebno_db):
        raise ParameterError(f"ebno_db must be finite, got {ebno_db}")
    if not 0.0 < code_rate <= 1.0:
        raise ParameterError(f"code_rate must be in (0, 1], got {code_rate}")
    if bits_per_symbol < 1:
        raise ParameterError(f"bits_per_symbol must be >= 1, got {bits_per_symbol}")
    es_over_n0 = 10.0 ** (ebno_db / 10.0) * code_rate * bits_per_symbol
    return 1.0 / es_over_n0


@dataclass(frozen=True)
class ChannelConfig:
    """One channel realization setting for a transmission."""

    kind: str
    ebno_db: float
    code_rate: float
    bits_per_symbol: int
    seed: int
    fading_block: int = 1

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ParameterError(f"unknown channel kind {self.kind!r}")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")
        if self.fading_block < 1:
            raise ParameterError(f"fading_block must be >= 1, got {self.fading_block}")
        ebno_to_noise_var(self.ebno_db, self.code_rate, self.bits_per_symbol)

    @property
    def noise_var(self) -> float:
        return ebno_to_noise_var(self.ebno_db, self.code_rate, self.bits_per_symbol)


def _check_frame(frame: SymbolFrame) -> np.ndarray:
    x = frame.symbols
    if x.size and not np.all(np.isfinite(x.view(np.float64))):
        raise InputError("symbol frame contains non-finite values")
    return x


def apply_awgn(frame: SymbolFrame, noise_var: float,
               rng: np.random.Generator) -> SymbolFrame:
    """y = x + n with n ~ CN(0, noise_var).  noise_var 0 is a clean pass."""
    x = _check_frame(frame)
    if noise_var < 0:
        raise ParameterError(f"noise_var must be >= 0, got {noise_var}")
    if noise_var == 0 or x.size == 0:
        return SymbolFrame(x)
    # Fixed draw order: one (S, 2) block, real parts first per symbol.
    g = rng.standard_normal((x.size, 2))
    noise = np.sqrt(noise_var / 2.0) * (g[:, 0] + 1j * g[:, 1])
    return SymbolFrame(x + noise)


def apply_rayleigh(frame: SymbolFrame, noise_var: float, rng: np.random.Generator,
                   fading_block: int = 1, h_override=None) -> tuple[SymbolFrame, np.ndarray]:
    """y = h*x + n with h ~ CN(0, 1); returns (received, csi).

    The fading coefficients are drawn first, then the noise, so a given rng
    state always produces the same channel realization.  ``h_override``
    substitutes deterministic coefficients (degenerate test hook).
    """
    x = _check_frame(frame)
    if noise_var < 0:
        raise ParameterError(f"noise_var must be >= 0, got {noise_var}")
    if fading_block < 1:
        raise ParameterError(f"fading_block must be >= 1, got {fading_block}")
    if x.size == 0:
        return SymbolFrame(x), np.empty(0, dtype=np.complex128)
    if h_override is not None:
        h = np.ascontiguousarray(np.broadcast_to(
            np.asarray(h_override, dtype=np.complex128), (x.size,)))
    else:
        n_coef = -(-x.size // fading_block)
        gh = rng.standard_normal((n_coef, 2))
        h_blocks = (gh[:, 0] + 1j * gh[:, 1]) / np.sqrt(2.0)
        h = np.repeat(h_blocks, fading_block)[:x.size]
    y = h * x
    if noise_var > 0:
        g = rng.standard_normal((x.size, 2))
        y = y + np.sqrt(noise_var / 2.0) * (g[:, 0] + 1j * g[:, 1])
    return SymbolFrame(y), h
