"""Lexical and semantic similarity metrics.

Tokenization rule (fixed so scores are reproducible): lowercase the text,
then take maximal runs of ASCII letters/digits as word tokens and every
other non-whitespace character as its own token.  "Two dogs play." becomes
``["two", "dogs", "play", "."]``.

BLEU here is sentence-level with a single reference: clipped n-gram
precision per order, a composite that is the geometric mean of orders 1..N
multiplied by the brevity penalty ``exp(min(0, 1 - ref_len/cand_len))``,
and a composite of 0 whenever any applicable order has zero precision.
Orders longer than both sentences have no n-grams on either side and are
excluded from the geometric mean, so identical sentences score exactly 1.0
regardless of length.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .core import InputError, ParameterError

_TOKEN_RE = re.compile(r"[a-z0-9]+|[^a-z0-9\s]")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with punctuation split into single tokens."""
    return _TOKEN_RE.findall(text.lower())


def _as_tokens(value) -> list[str]:
    if isinstance(value, str):
        return tokenize(value)
    return list(value)


def ngram_precision(candidate, reference, n: int) -> float:
    """Clipped n-gram precision of candidate against one reference.

    Accepts raw strings (tokenized by the module rule) or pre-tokenized
    sequences.  Returns 0 when the candidate has no n-grams.
    """
    if n < 1:
        raise ParameterError(f"n-gram order must be >= 1, got {n}")
    cand = _as_tokens(candidate)
    ref = _as_tokens(reference)
    if len(cand) < n:
        return 0.0
    cand_grams = Counter(tuple(cand[i:i + n]) for i in range(len(cand) - n + 1))
    ref_grams = Counter(tuple(ref[i:i + n]) for i in range(len(ref) - n + 1))
    clipped = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
    return clipped / sum(cand_grams.values())


@dataclass(frozen=True)
class ScoreReport:
    """Similarity scores for one (candidate, reference) sentence pair."""

    bleu_per_n: dict[int, float] = field(default_factory=dict)
    bleu_composite: float = 0.0
    semantic_similarity: float | None = None
    degenerate: bool = False


def bleu(candidate, reference, max_n: int = 4) -> ScoreReport:
    """Sentence BLEU with per-order precisions and the composite score.

    An empty candidate or reference yields zero scores with the
    ``degenerate`` flag set.
    """
    if max_n < 1:
        raise ParameterError(f"max_n must be >= 1, got {max_n}")
    cand = _as_tokens(candidate)
    ref = _as_tokens(reference)
    per_n = {n: ngram_precision(cand, ref, n) for n in range(1, max_n + 1)}
    if not cand or not ref:
        return ScoreReport(per_n, 0.0, degenerate=True)
    # orders with no n-grams on either side are vacuous, not failures
    active = [n for n in per_n if n <= max(len(cand), len(ref))]
    if any(per_n[n] == 0.0 for n in active):
        composite = 0.0
    else:
        brevity = math.exp(min(0.0, 1.0 - len(ref) / len(cand)))
        composite = brevity * math.exp(
            math.fsum(math.log(per_n[n]) for n in active) / len(active))
    return ScoreReport(per_n, composite)


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors, in [-1, 1]."""
    va = np.asarray(a, dtype=np.float64).reshape(-1)
    vb = np.asarray(b, dtype=np.float64).reshape(-1)
    if va.size != vb.size:
        raise ParameterError(f"dimension mismatch: {va.size} vs {vb.size}")
    if va.size == 0:
        raise ParameterError("vectors must be non-empty")
    if not (np.all(np.isfinite(va)) and np.all(np.isfinite(vb))):
        raise InputError("vectors contain non-finite values")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise InputError("cosine similarity is undefined for zero vectors")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Anything that turns a sentence into a fixed-dimension vector."""

    def embed(self, sentence: str) -> np.ndarray: ...


def semantic_similarity(candidate: str, reference: str,
                        provider: EmbeddingProvider) -> float:
    """Cosine similarity between provider embeddings of two sentences."""
    if provider is None:
        raise ParameterError("semantic similarity requires an embedding provider")
    return cosine_similarity(provider.embed(candidate), provider.embed(reference))


class HashEmbeddingProvider:
    """Deterministic bag-of-features embedding for tests and offline runs.

    Token unigrams and bigrams are hashed to signed coordinates of a fixed
    dimension; the result is L2-normalized.  Identical sentences always map
    to identical vectors, and overlapping sentences land near each other.
    No trained weights are involved, so the scores are only a proxy for
    lexical-overlap similarity.
    """

    def __init__(self, dim: int = 256):
        if dim < 8:
            raise ParameterError(f"embedding dimension must be >= 8, got {dim}")
        self.dim = dim

    def embed(self, sentence: str) -> np.ndarray:
        tokens = tokenize(sentence)
        features = tokens + [f"{a}|{b}" for a, b in zip(tokens, tokens[1:])]
        vec = np.zeros(self.dim, dtype=np.float64)
        if not features:
            vec[0] = 1.0
            return vec
        for feat in features:
            digest = hashlib.blake2b(feat.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "little")
            index = value % self.dim
            sign = 1.0 if (value >> 63) & 1 else -1.0
            vec[index] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            return vec
        return vec / norm
