# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the NumPy polar kernels.

Must stay bit-identical to ``_polar_py``: same min-sum check update
``copysign(min(|a|, |b|), a*b)``, same leaf decision (negative LLR means
bit 1), same stable ascending candidate ordering in the list decoder with
candidate index ``bit * active + parent`` breaking ties.  The parity tests
in the test suite compare both backends output-for-output.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport copysign, fabs, fmin
from libc.string cimport memcpy

cnp.import_array()

BACKEND_NAME = "compiled"


def encode_blocks(u):
    """Apply the polar transform to each row of ``u``."""
    x_arr = np.array(u, dtype=np.uint8, copy=True, order="C")
    cdef cnp.uint8_t[:, ::1] x = x_arr
    cdef Py_ssize_t n_blocks = x.shape[0]
    cdef Py_ssize_t n_code = x.shape[1]
    cdef Py_ssize_t b, step, group, i
    cdef unsigned char *row
    with nogil:
        for b in range(n_blocks):
            row = &x[b, 0]
            step = 1
            while step < n_code:
                group = 0
                while group < n_code:
                    for i in range(step):
                        row[group + i] ^= row[group + step + i]
                    group += 2 * step
                step <<= 1
    return x_arr


cdef void _sc_node(const double *lam, double *work, unsigned char *xwork,
                   Py_ssize_t length, Py_ssize_t lo,
                   const unsigned char *frozen, unsigned char *uhat,
                   unsigned char *x_out) noexcept nogil:
    cdef Py_ssize_t half, i
    cdef unsigned char bit
    if length == 1:
        if frozen[lo]:
            bit = 0
        else:
            bit = 1 if lam[0] < 0.0 else 0
        uhat[lo] = bit
        x_out[0] = bit
        return
    half = length >> 1
    for i in range(half):
        work[i] = copysign(fmin(fabs(lam[i]), fabs(lam[half + i])),
                           lam[i] * lam[half + i])
    _sc_node(work, work + half, xwork + half, half, lo, frozen, uhat, xwork)
    for i in range(half):
        work[i] = lam[half + i] + (1.0 - 2.0 * xwork[i]) * lam[i]
    _sc_node(work, work + half, xwork + half, half, lo + half, frozen, uhat,
             x_out + half)
    for i in range(half):
        x_out[i] = xwork[i] ^ x_out[half + i]


def sc_decode_blocks(llrs, frozen_mask):
    """Successive-cancellation decoding of a batch of blocks."""
    cdef double[:, ::1] lam = np.ascontiguousarray(llrs, dtype=np.float64)
    cdef const unsigned char[::1] frozen = np.ascontiguousarray(
        frozen_mask, dtype=np.uint8)
    cdef Py_ssize_t n_blocks = lam.shape[0]
    cdef Py_ssize_t n_code = lam.shape[1]
    uhat_arr = np.empty((n_blocks, n_code), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] uhat = uhat_arr
    cdef double[::1] work = np.empty(n_code, dtype=np.float64)
    cdef cnp.uint8_t[::1] xwork = np.empty(n_code, dtype=np.uint8)
    cdef cnp.uint8_t[::1] xout = np.empty(n_code, dtype=np.uint8)
    cdef Py_ssize_t b
    with nogil:
        for b in range(n_blocks):
            _sc_node(&lam[b, 0], &work[0], &xwork[0], n_code, 0, &frozen[0],
                     &uhat[b, 0], &xout[0])
    return uhat_arr


ctypedef struct SclCtx:
    Py_ssize_t n_code
    int list_size
    int active
    const unsigned char *frozen
    double *llr_ws          # (L, 2N) row-major
    unsigned char *xleft    # (L, N)
    unsigned char *xout     # (L, N)
    unsigned char *uhat     # (L, N)
    double *metric          # (L,)
    double *cand            # (2L,)
    int *order              # (2L,)
    double *tmp_llr         # (L, 2N)
    unsigned char *tmp_bits  # (L, N)
    double *tmp_metric      # (L,)


cdef void _scl_gather_bits(SclCtx *c, unsigned char *base, int keep) noexcept nogil:
    cdef int s
    cdef int parent
    for s in range(keep):
        parent = c.order[s] % c.active
        memcpy(c.tmp_bits + s * c.n_code, base + parent * c.n_code, c.n_code)
    memcpy(base, c.tmp_bits, keep * c.n_code)


cdef void _scl_leaf(SclCtx *c, Py_ssize_t idx, unsigned char *out) noexcept nogil:
    cdef Py_ssize_t leaf_off = 2 * c.n_code - 2
    cdef Py_ssize_t row = 2 * c.n_code
    cdef int n_active = c.active
    cdef int p, i, j, keep, moving
    cdef unsigned char bit
    cdef double lam, penalty
    if c.frozen[idx]:
        for p in range(n_active):
            lam = c.llr_ws[p * row + leaf_off]
            if lam < 0.0:
                c.metric[p] -= lam
            c.uhat[p * c.n_code + idx] = 0
            out[p * c.n_code] = 0
        return
    # Candidate index encodes bit * active + parent; the stable ascending
    # sort therefore prefers bit 0 and the lower parent index on ties.
    for p in range(n_active):
        lam = c.llr_ws[p * row + leaf_off]
        penalty = fabs(lam)
        if lam < 0.0:
            c.cand[p] = c.metric[p] + penalty
            c.cand[n_active + p] = c.metric[p]
        else:
            c.cand[p] = c.metric[p]
            c.cand[n_active + p] = c.metric[p] + penalty
    keep = 2 * n_active
    if keep > c.list_size:
        keep = c.list_size
    for i in range(2 * n_active):
        c.order[i] = i
    for i in range(1, 2 * n_active):
        moving = c.order[i]
        j = i
        while j > 0 and c.cand[c.order[j - 1]] > c.cand[moving]:
            c.order[j] = c.order[j - 1]
            j -= 1
        c.order[j] = moving
    # Row gathers keep buffer addresses stable so `out` pointers held by
    # enclosing recursion frames stay valid across forks.
    for i in range(keep):
        p = c.order[i] % n_active
        memcpy(c.tmp_llr + i * row, c.llr_ws + p * row, row * sizeof(double))
        c.tmp_metric[i] = c.cand[c.order[i]]
    memcpy(c.llr_ws, c.tmp_llr, keep * row * sizeof(double))
    memcpy(c.metric, c.tmp_metric, keep * sizeof(double))
    _scl_gather_bits(c, c.xleft, keep)
    _scl_gather_bits(c, c.xout, keep)
    _scl_gather_bits(c, c.uhat, keep)
    for i in range(keep):
        bit = 1 if c.order[i] >= n_active else 0
        c.uhat[i * c.n_code + idx] = bit
        out[i * c.n_code] = bit
    c.active = keep


cdef void _scl_node(SclCtx *c, int depth, Py_ssize_t lo,
                    unsigned char *out) noexcept nogil:
    cdef Py_ssize_t length = c.n_code >> depth
    if length == 1:
        _scl_leaf(c, lo, out)
        return
    cdef Py_ssize_t half = length >> 1
    cdef Py_ssize_t row = 2 * c.n_code
    cdef Py_ssize_t cur_off = 2 * c.n_code - 2 * length
    cdef Py_ssize_t nxt_off = 2 * c.n_code - length
    cdef Py_ssize_t xoff = c.n_code - length
    cdef int p
    cdef Py_ssize_t i
    cdef double *cur
    cdef double *nxt
    cdef unsigned char *xl
    for p in range(c.active):
        cur = c.llr_ws + p * row + cur_off
        nxt = c.llr_ws + p * row + nxt_off
        for i in range(half):
            nxt[i] = copysign(fmin(fabs(cur[i]), fabs(cur[half + i])),
                              cur[i] * cur[half + i])
    _scl_node(c, depth + 1, lo, c.xleft + xoff)
    for p in range(c.active):
        cur = c.llr_ws + p * row + cur_off
        nxt = c.llr_ws + p * row + nxt_off
        xl = c.xleft + p * c.n_code + xoff
        for i in range(half):
            nxt[i] = cur[half + i] + (1.0 - 2.0 * xl[i]) * cur[i]
    _scl_node(c, depth + 1, lo + half, out + half)
    for p in range(c.active):
        xl = c.xleft + p * c.n_code + xoff
        for i in range(half):
            (out + p * c.n_code)[i] = xl[i] ^ (out + p * c.n_code)[half + i]


def scl_decode(llrs, frozen_mask, int list_size):
    """List decoding of one block; returns paths sorted by metric."""
    llr_in = np.ascontiguousarray(llrs, dtype=np.float64).ravel()
    cdef Py_ssize_t n_code = llr_in.size
    cdef const unsigned char[::1] frozen = np.ascontiguousarray(
        frozen_mask, dtype=np.uint8)
    llr_ws_arr = np.zeros((list_size, 2 * n_code), dtype=np.float64)
    llr_ws_arr[0, :n_code] = llr_in
    uhat_arr = np.zeros((list_size, n_code), dtype=np.uint8)
    metric_arr = np.zeros(list_size, dtype=np.float64)
    cdef double[:, ::1] llr_ws = llr_ws_arr
    cdef cnp.uint8_t[:, ::1] xleft = np.zeros((list_size, n_code), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] xout = np.zeros((list_size, n_code), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] uhat = uhat_arr
    cdef double[::1] metric = metric_arr
    cdef double[::1] cand = np.zeros(2 * list_size, dtype=np.float64)
    cdef int[::1] order = np.zeros(2 * list_size, dtype=np.int32)
    cdef double[:, ::1] tmp_llr = np.zeros((list_size, 2 * n_code), dtype=np.float64)
    cdef cnp.uint8_t[:, ::1] tmp_bits = np.zeros((list_size, n_code), dtype=np.uint8)
    cdef double[::1] tmp_metric = np.zeros(list_size, dtype=np.float64)
    cdef SclCtx ctx
    ctx.n_code = n_code
    ctx.list_size = list_size
    ctx.active = 1
    ctx.frozen = &frozen[0]
    ctx.llr_ws = &llr_ws[0, 0]
    ctx.xleft = &xleft[0, 0]
    ctx.xout = &xout[0, 0]
    ctx.uhat = &uhat[0, 0]
    ctx.metric = &metric[0]
    ctx.cand = &cand[0]
    ctx.order = &order[0]
    ctx.tmp_llr = &tmp_llr[0, 0]
    ctx.tmp_bits = &tmp_bits[0, 0]
    ctx.tmp_metric = &tmp_metric[0]
    with nogil:
        _scl_node(&ctx, 0, 0, ctx.xout)
    final = np.argsort(metric_arr[:ctx.active], kind="stable")
    return uhat_arr[final].copy(), metric_arr[final].copy()
