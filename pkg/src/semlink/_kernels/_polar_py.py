"""NumPy reference implementation of the polar transform kernels.

The compiled extension (``_polar_c``) implements the same three entry points
with identical numerical behaviour: both sides use the min-sum check update
``copysign(min(|a|, |b|), a*b)`` and resolve list-decoder metric ties toward
the lower candidate index, so outputs are bit-identical between backends.

Kernel contracts (shared with the compiled backend):

``encode_blocks(u)``
    (B, N) uint8 in natural order -> (B, N) uint8 codewords, x = u F^{(x)n}.

``sc_decode_blocks(llrs, frozen_mask)``
    (B, N) float64 channel LLRs (positive favours bit 0) -> (B, N) uint8
    decisions for every u index, frozen positions forced to 0.

``scl_decode(llrs, frozen_mask, list_size)``
    (N,) float64 -> (paths, metrics): path decisions sorted by ascending
    path metric, ties by fork order.  Path metric accumulates |llr| on every
    decision that disagrees with the hard sign of the leaf LLR.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def encode_blocks(u: np.ndarray) -> np.ndarray:
    """Apply the polar transform to each row of ``u``."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n_code = x.shape[1]
    step = 1
    while step < n_code:
        for group in range(0, n_code, 2 * step):
            x[:, group:group + step] ^= x[:, group + step:group + 2 * step]
        step *= 2
    return x


def _minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.copysign(np.minimum(np.abs(a), np.abs(b)), a * b)


def sc_decode_blocks(llrs: np.ndarray, frozen_mask: np.ndarray) -> np.ndarray:
    """Successive-cancellation decoding of a batch of blocks."""
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    batch, n_code = llrs.shape
    uhat = np.empty((batch, n_code), dtype=np.uint8)

    def node(lam: np.ndarray, lo: int) -> np.ndarray:
        length = lam.shape[1]
        if length == 1:
            if frozen_mask[lo]:
                bits = np.zeros(batch, dtype=np.uint8)
            else:
                bits = (lam[:, 0] < 0).astype(np.uint8)
            uhat[:, lo] = bits
            return bits[:, None]
        half = length >> 1
        a, b = lam[:, :half], lam[:, half:]
        x_left = node(_minsum(a, b), lo)
        x_right = node(b + (1 - 2 * x_left.astype(np.float64)) * a, lo + half)
        return np.concatenate([x_left ^ x_right, x_right], axis=1)

    node(llrs, 0)
    return uhat


class _ListState:
    """Workspaces for list decoding, shared across the recursion.

    All per-path data lives in row-major arrays so that a fork can permute
    every workspace with one row gather per array.  Level ``d`` of the LLR
    workspace starts at ``2N - (2N >> d)``; the left-child codeword scratch
    for depth ``d`` starts at ``N - (N >> d)``.
    """

    def __init__(self, llr: np.ndarray, frozen_mask: np.ndarray, list_size: int):
        n_code = llr.size
        self.n_code = n_code
        self.n_levels = n_code.bit_length() - 1
        self.list_size = list_size
        self.frozen_mask = frozen_mask
        self.llr_ws = np.zeros((list_size, 2 * n_code), dtype=np.float64)
        self.xleft_ws = np.zeros((list_size, n_code), dtype=np.uint8)
        self.xout = np.zeros((list_size, n_code), dtype=np.uint8)
        self.uhat = np.zeros((list_size, n_code), dtype=np.uint8)
        self.metric = np.zeros(list_size, dtype=np.float64)
        self.active = 1
        self.llr_ws[0, :n_code] = llr

    def llr_level(self, depth: int) -> np.ndarray:
        length = self.n_code >> depth
        start = 2 * self.n_code - 2 * length
        return self.llr_ws[:, start:start + length]

    def xleft_level(self, depth: int) -> np.ndarray:
        length = self.n_code >> (depth + 1)
        start = self.n_code - 2 * length
        return self.xleft_ws[:, start:start + length]

    def gather(self, parents: np.ndarray) -> None:
        keep = parents.size
        self.llr_ws[:keep] = self.llr_ws[parents]
        self.xleft_ws[:keep] = self.xleft_ws[parents]
        self.xout[:keep] = self.xout[parents]
        self.uhat[:keep] = self.uhat[parents]


def _scl_leaf(state: _ListState, index: int, out: np.ndarray) -> None:
    lam = state.llr_level(state.n_levels)[:, 0]
    active = state.active
    if state.frozen_mask[index]:
        col = lam[:active]
        state.metric[:active] += np.where(col < 0, -col, 0.0)
        state.uhat[:active, index] = 0
        out[:active, 0] = 0
        return
    col = lam[:active]
    penalty = np.abs(col)
    base = state.metric[:active]
    # Candidate c encodes (bit = c // active, parent = c % active); the
    # stable sort therefore prefers bit 0 and lower parent index on ties.
    cand = np.concatenate([
        base + np.where(col < 0, penalty, 0.0),
        base + np.where(col < 0, 0.0, penalty),
    ])
    keep = min(state.list_size, 2 * active)
    order = np.argsort(cand, kind="stable")[:keep]
    parents = order % active
    bits = (order // active).astype(np.uint8)
    state.gather(parents)
    state.metric[:keep] = cand[order]
    state.uhat[:keep, index] = bits
    out[:keep, 0] = bits
    state.active = keep


def _scl_node(state: _ListState, depth: int, lo: int, out: np.ndarray) -> None:
    length = state.n_code >> depth
    if length == 1:
        _scl_leaf(state, lo, out)
        return
    half = length >> 1
    cur = state.llr_level(depth)
    nxt = state.llr_level(depth + 1)
    nxt[:] = _minsum(cur[:, :half], cur[:, half:])
    x_left = state.xleft_level(depth)
    _scl_node(state, depth + 1, lo, x_left)
    cur = state.llr_level(depth)
    nxt = state.llr_level(depth + 1)
    nxt[:] = cur[:, half:] + (1 - 2 * x_left.astype(np.float64)) * cur[:, :half]
    _scl_node(state, depth + 1, lo + half, out[:, half:])
    out[:, :half] = x_left ^ out[:, half:]


def scl_decode(llrs: np.ndarray, frozen_mask: np.ndarray,
               list_size: int) -> tuple[np.ndarray, np.ndarray]:
    """List decoding of one block; returns paths sorted by metric."""
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    state = _ListState(llrs, frozen_mask, list_size)
    _scl_node(state, 0, 0, state.xout)
    order = np.argsort(state.metric[:state.active], kind="stable")
    return state.uhat[order].copy(), state.metric[order].copy()
