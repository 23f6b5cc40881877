"""End-to-end transmission of one sentence over the coded link.

Chain: codec.encode -> tensor serialization -> polar encoding -> 16-QAM ->
channel -> soft demapping -> polar decoding -> tensor reassembly ->
codec.decode -> scoring.  Every stochastic step derives from the seed in
the channel config, so a LinkReport is a pure function of its inputs.

Failure semantics: codec and adapter problems raise ``TransportError``
(infrastructure, distinct from channel damage).  A structurally broken
frame after decoding (mangled header) is channel damage: the report counts
every block as errored and the decoded text comes from a zeroed one-value
tensor so downstream scoring still sees a sentence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .bridge import FrameError, bits_to_tensor, tensor_to_bits
from .channel import ChannelConfig, apply_awgn, apply_rayleigh, make_rng
from .client import ExternalCodecClient
from .core import (
    BitBlock,
    HiddenTensor,
    LinkError,
    ParameterError,
    TransportError,
)
from .metrics import EmbeddingProvider, ScoreReport, bleu, semantic_similarity
from .modem import QAM16, demap_llr, map_symbols
from .polar import PolarCodeSpec, construct_code, decode_sc_batch, decode_scl_batch, encode_batch

ADAPTER_ENV_VAR = "SEMLINK_ADAPTER"


@runtime_checkable
class SemanticCodec(Protocol):
    """Sentence <-> tensor transform at the two ends of the link."""

    def encode(self, sentence: str) -> HiddenTensor: ...

    def decode(self, tensor: HiddenTensor) -> str: ...


class ReferenceByteCodec:
    """Trivial invertible codec: UTF-8 bytes scaled into [-1, 1].

    Byte b maps to float32 ``b / 127.5 - 1``; decode rounds back with
    ``round((v + 1) * 127.5)`` clamped to [0, 255] (NaN decodes as byte 0)
    and interprets the bytes as UTF-8 with replacement.  No semantics, full
    reversibility: exactly what a channel-code benchmark needs.
    """

    def encode(self, sentence: str) -> HiddenTensor:
        if not sentence:
            raise ParameterError("cannot encode an empty sentence")
        data = np.frombuffer(sentence.encode("utf-8"), dtype=np.uint8)
        values = (data.astype(np.float32) / np.float32(127.5)) - np.float32(1.0)
        return HiddenTensor(values[None, :])

    def decode(self, tensor: HiddenTensor) -> str:
        vals = tensor.values.astype(np.float64).reshape(-1)
        scaled = np.round((vals + 1.0) * 127.5)
        scaled = np.where(np.isnan(scaled), 0.0, np.clip(scaled, 0.0, 255.0))
        return scaled.astype(np.uint8).tobytes().decode("utf-8", errors="replace")


@dataclass(frozen=True)
class DecoderConfig:
    """Polar decoder selection for the receive side."""

    kind: str = "sc"
    list_size: int = 8

    def __post_init__(self):
        if self.kind not in ("sc", "scl"):
            raise ParameterError(f"unknown decoder kind {self.kind!r}")


@dataclass(frozen=True)
class LinkReport:
    """Everything measured about one sentence transmission."""

    sentence_in: str
    sentence_out: str
    blocks_total: int
    blocks_errored: int
    bits_total: int
    bits_errored: int
    ebno_db: float
    channel: str
    seed: int
    scores: ScoreReport = field(default_factory=ScoreReport)

    @property
    def frame_intact(self) -> bool:
        return self.blocks_errored < self.blocks_total or self.blocks_total == 0


def default_code(crc_width: int = 0) -> PolarCodeSpec:
    """The link's standard code: (1024, 512) from the NR ordering."""
    return construct_code(1024, 512, crc_width=crc_width)


def transmit(sentence: str, codec: SemanticCodec, code: PolarCodeSpec,
             channel_cfg: ChannelConfig, *, decoder: DecoderConfig = DecoderConfig(),
             sanitize: str = "clamp", fmt: str = "fp32",
             provider: EmbeddingProvider | None = None,
             bleu_max_n: int = 4) -> LinkReport:
    """Send one sentence through the full link and score the result."""
    if channel_cfg.bits_per_symbol != QAM16.bits_per_symbol:
        raise ParameterError(
            f"channel config assumes {channel_cfg.bits_per_symbol} bits/symbol, "
            f"the modem uses {QAM16.bits_per_symbol}")
    try:
        tensor = codec.encode(sentence)
    except LinkError:
        raise
    except Exception as exc:
        raise TransportError(f"codec encode failed: {exc}") from exc

    blocks, _header = tensor_to_bits(tensor, code.payload_bits, fmt=fmt)
    tx_payload = np.stack([b.bits for b in blocks])
    codewords = encode_batch(code, tx_payload)

    # One symbol stream for the whole frame; N is a multiple of the symbol
    # width so no extra padding is needed here.
    tx_bits = codewords.reshape(-1)
    frame = map_symbols(BitBlock(tx_bits))
    rng = make_rng(channel_cfg.seed)
    noise_var = channel_cfg.noise_var
    if channel_cfg.kind == "awgn":
        received = apply_awgn(frame, noise_var, rng)
        csi = None
    else:
        received, csi = apply_rayleigh(frame, noise_var, rng,
                                       fading_block=channel_cfg.fading_block)
    llrs = demap_llr(received, csi, noise_var)
    rx_payload = _decode_blocks(code, decoder,
                                llrs.llrs.reshape(codewords.shape[0], code.n_codeword))

    bits_total = int(tx_payload.size)
    bits_errored = int(np.sum(tx_payload != rx_payload))
    block_damage = np.any(tx_payload != rx_payload, axis=1)
    blocks_total = len(blocks)

    try:
        rx_tensor = bits_to_tensor([BitBlock(row) for row in rx_payload],
                                   sanitize=sanitize)
        blocks_errored = int(np.count_nonzero(block_damage))
    except FrameError:
        # Header took damage: the frame is lost, score a blank tensor.
        rx_tensor = HiddenTensor(np.zeros((1, 1), dtype=np.float32))
        blocks_errored = blocks_total

    try:
        sentence_out = codec.decode(rx_tensor)
    except LinkError:
        raise
    except Exception as exc:
        raise TransportError(f"codec decode failed: {exc}") from exc

    scores = bleu(sentence_out, sentence, max_n=bleu_max_n)
    if provider is not None:
        scores = ScoreReport(
            scores.bleu_per_n, scores.bleu_composite,
            semantic_similarity(sentence_out, sentence, provider),
            scores.degenerate)
    return LinkReport(
        sentence_in=sentence, sentence_out=sentence_out,
        blocks_total=blocks_total, blocks_errored=blocks_errored,
        bits_total=bits_total, bits_errored=bits_errored,
        ebno_db=channel_cfg.ebno_db, channel=channel_cfg.kind,
        seed=channel_cfg.seed, scores=scores)


def _decode_blocks(code: PolarCodeSpec, decoder: DecoderConfig,
                   llrs: np.ndarray) -> np.ndarray:
    if decoder.kind == "scl":
        return decode_scl_batch(code, llrs, decoder.list_size)
    return decode_sc_batch(code, llrs)


def external_codec_client(endpoint: str | None = None,
                          timeout: float = 120.0) -> ExternalCodecClient:
    """Open a client for an external adapter.

    ``endpoint`` is "host:port"; the ``SEMLINK_ADAPTER`` environment
    variable overrides it when set.
    """
    endpoint = os.environ.get(ADAPTER_ENV_VAR) or endpoint
    if not endpoint:
        raise ParameterError(
            f"no adapter endpoint configured (flag/config or ${ADAPTER_ENV_VAR})")
    host, sep, port = endpoint.rpartition(":")
    if not sep or not port.isdigit():
        raise ParameterError(f"adapter endpoint must be host:port, got {endpoint!r}")
    return ExternalCodecClient.tcp(host or "127.0.0.1", int(port), timeout=timeout)
