"""5G-NR style polar coding: construction, CRC, encoder, SC/SCL decoders."""

from .code import (
    LLR_CLIP,
    PolarCodeSpec,
    construct_code,
    decode_sc_batch,
    decode_scl_batch,
    encode_batch,
    polar_decode_sc,
    polar_decode_scl,
    polar_encode,
)
from .crc import SUPPORTED_WIDTHS, crc_attach, crc_check
from .reliability import (
    NR_ORDERING_1024,
    gaussian_approximation_ordering,
    nr_ordering,
)

__all__ = [
    "LLR_CLIP",
    "NR_ORDERING_1024",
    "PolarCodeSpec",
    "SUPPORTED_WIDTHS",
    "construct_code",
    "crc_attach",
    "crc_check",
    "decode_sc_batch",
    "decode_scl_batch",
    "encode_batch",
    "gaussian_approximation_ordering",
    "nr_ordering",
    "polar_decode_sc",
    "polar_decode_scl",
    "polar_encode",
]
