"""semlink: link-level simulation of semantic text transmission.

A pluggable sentence codec produces float32 hidden tensors; the bridge
serializes them to bits; a (1024, 512) NR-ordered polar code, Gray 16-QAM,
and an AWGN or Rayleigh channel carry them; the receive side demaps,
decodes, reassembles, and scores the round trip with BLEU and embedding
cosine similarity.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .core import (
    BitBlock,
    CapacityError,
    FrameError,
    HiddenTensor,
    InputError,
    LengthError,
    LinkError,
    LlrBlock,
    ParameterError,
    SymbolFrame,
    TransportError,
    pack_bits,
    unpack_bits,
)

__version__ = "0.1.0"

__all__ = [
    "BitBlock",
    "CapacityError",
    "FrameError",
    "HiddenTensor",
    "InputError",
    "KERNEL_BACKEND",
    "LengthError",
    "LinkError",
    "LlrBlock",
    "ParameterError",
    "SymbolFrame",
    "TransportError",
    "pack_bits",
    "unpack_bits",
]
