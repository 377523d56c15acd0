"""Sparse row-echelon kernels over prime fields and the rationals.

Rows enter as ``{column: value}`` dicts.  Elimination is left-looking: each
incoming row is scattered into a dense workspace and reduced against the
pivot rows found so far, visiting its nonzero columns in increasing order
through a binary heap, so fill-in is only ever touched where it exists.
The leading (smallest) column of a surviving row becomes its pivot, which
makes the final reduced form the unique RREF for the given column order.

Two implementations share that algorithm: a numba kernel on CSR arrays for
prime fields (values kept below 2**31 so products fit in int64) and a
pure-Python version that also handles ``Fraction`` entries.
"""
import heapq
from fractions import Fraction

import numpy as np

from ._accel import njit, use_numba

MAX_KERNEL_PRIME = 2**31


# --------------------------------------------------------------------------
# compiled path


@njit(cache=True)
def _modinv(a, p):
    r = 1
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


@njit(cache=True)
def _heap_push(heap, size, v):
    i = size
    heap[i] = v
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        tmp = heap[parent]
        heap[parent] = heap[i]
        heap[i] = tmp
        i = parent
    return size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and heap[left + 1] < heap[left]:
            child = left + 1
        if heap[i] <= heap[child]:
            break
        tmp = heap[child]
        heap[child] = heap[i]
        heap[i] = tmp
        i = child
    return top, size


@njit(cache=True)
def _reduce_workspace(w, mark, heap, hs, rem, pivot_of, row_start, row_len, st_idx, st_val, p):
    # Drain the heap, eliminating pivot columns; survivors land in rem (ascending).
    nrem = 0
    while hs > 0:
        c, hs = _heap_pop(heap, hs)
        mark[c] = False
        f = w[c]
        if f == 0:
            continue
        k = pivot_of[c]
        if k >= 0:
            s0 = row_start[k]
            for t in range(s0, s0 + row_len[k]):
                cc = st_idx[t]
                nv = (w[cc] - f * st_val[t]) % p
                w[cc] = nv
                if nv != 0 and not mark[cc]:
                    mark[cc] = True
                    hs = _heap_push(heap, hs, cc)
        else:
            rem[nrem] = c
            nrem += 1
    return nrem


@njit(cache=True)
def _grow(arr, need):
    cap = arr.shape[0]
    while cap < need:
        cap *= 2
    out = np.empty(cap, np.int64)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def _echelon_kernel(indptr, indices, data, ncols, p, full):
    nrows = indptr.shape[0] - 1
    w = np.zeros(max(ncols, 1), np.int64)
    mark = np.zeros(max(ncols, 1), np.bool_)
    heap = np.empty(max(ncols, 1), np.int64)
    rem = np.empty(max(ncols, 1), np.int64)
    pivot_of = np.full(max(ncols, 1), -1, np.int64)
    maxpiv = min(nrows, ncols) + 1
    row_start = np.empty(maxpiv, np.int64)
    row_len = np.empty(maxpiv, np.int64)
    piv_col = np.empty(maxpiv, np.int64)
    st_idx = np.empty(max(16, 2 * data.shape[0]), np.int64)
    st_val = np.empty(max(16, 2 * data.shape[0]), np.int64)
    used = 0
    npiv = 0
    for r in range(nrows):
        hs = 0
        for t in range(indptr[r], indptr[r + 1]):
            c = indices[t]
            w[c] = (w[c] + data[t]) % p
            if not mark[c]:
                mark[c] = True
                hs = _heap_push(heap, hs, c)
        nrem = _reduce_workspace(w, mark, heap, hs, rem, pivot_of, row_start, row_len, st_idx, st_val, p)
        if nrem == 0:
            continue
        lead = rem[0]
        inv = _modinv(w[lead], p)
        if used + nrem > st_idx.shape[0]:
            st_idx = _grow(st_idx, used + nrem)
            st_val = _grow(st_val, used + nrem)
        row_start[npiv] = used
        row_len[npiv] = nrem
        piv_col[npiv] = lead
        for t in range(nrem):
            c = rem[t]
            st_idx[used + t] = c
            st_val[used + t] = (w[c] * inv) % p
            w[c] = 0
        used += nrem
        pivot_of[lead] = npiv
        npiv += 1

    if full and npiv > 1:
        order = np.argsort(piv_col[:npiv])
        for q in range(npiv - 1, -1, -1):
            k = order[q]
            s0 = row_start[k]
            n0 = row_len[k]
            hs = 0
            for t in range(s0 + 1, s0 + n0):
                c = st_idx[t]
                w[c] = st_val[t]
                mark[c] = True
                hs = _heap_push(heap, hs, c)
            nrem = _reduce_workspace(w, mark, heap, hs, rem, pivot_of, row_start, row_len, st_idx, st_val, p)
            if used + nrem + 1 > st_idx.shape[0]:
                st_idx = _grow(st_idx, used + nrem + 1)
                st_val = _grow(st_val, used + nrem + 1)
            st_idx[used] = piv_col[k]
            st_val[used] = 1
            for t in range(nrem):
                c = rem[t]
                st_idx[used + 1 + t] = c
                st_val[used + 1 + t] = w[c]
                w[c] = 0
            row_start[k] = used
            row_len[k] = nrem + 1
            used += nrem + 1

    order = np.argsort(piv_col[:npiv])
    total = 0
    for q in range(npiv):
        total += row_len[order[q]]
    out_ptr = np.empty(npiv + 1, np.int64)
    out_idx = np.empty(total, np.int64)
    out_val = np.empty(total, np.int64)
    pos = 0
    out_ptr[0] = 0
    for q in range(npiv):
        k = order[q]
        s0 = row_start[k]
        for t in range(row_len[k]):
            out_idx[pos] = st_idx[s0 + t]
            out_val[pos] = st_val[s0 + t]
            pos += 1
        out_ptr[q + 1] = pos
    return piv_col[order], out_ptr, out_idx, out_val


def rows_to_csr(rows, p):
    """Pack dict rows into int64 CSR arrays with values reduced mod ``p``."""
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    nnz = int(indptr[-1])
    indices = np.empty(nnz, dtype=np.int64)
    data = np.empty(nnz, dtype=np.int64)
    pos = 0
    for r in rows:
        n = len(r)
        if n:
            indices[pos : pos + n] = np.fromiter(r.keys(), dtype=np.int64, count=n)
            data[pos : pos + n] = np.fromiter((int(v) % p for v in r.values()), dtype=np.int64, count=n)
            pos += n
    return indptr, indices, data


def csr_to_rows(indptr, indices, data):
    rows = []
    idx = indices.tolist()
    val = data.tolist()
    ptr = indptr.tolist()
    for a, b in zip(ptr[:-1], ptr[1:]):
        rows.append(dict(zip(idx[a:b], val[a:b])))
    return rows


def echelon_csr(indptr, indices, data, ncols, p, full=True):
    """Compiled echelon on CSR input; returns (pivots, indptr, indices, data)."""
    if p >= MAX_KERNEL_PRIME:
        raise ValueError(f"compiled kernel needs p < 2**31, got {p}")
    return _echelon_kernel(indptr, indices, data, int(ncols), int(p), bool(full))


# --------------------------------------------------------------------------
# pure-Python path


def _reduce_python(w, heap, pivots, p):
    rem = []
    marked = set(heap)
    heapq.heapify(heap)
    while heap:
        c = heapq.heappop(heap)
        marked.discard(c)
        f = w.get(c)
        if not f:
            w.pop(c, None)
            continue
        prow = pivots.get(c)
        if prow is None:
            rem.append(c)
            continue
        for cc, v in prow.items():
            nv = w.get(cc, 0) - f * v
            if p is not None:
                nv %= p
            if nv:
                w[cc] = nv
                if cc not in marked:
                    marked.add(cc)
                    heapq.heappush(heap, cc)
            else:
                w.pop(cc, None)
    return rem


def echelon_python(rows, ncols, p=None, full=True):
    """Dict-based echelon; ``p=None`` means exact ``Fraction`` arithmetic."""
    pivots = {}
    for row in rows:
        if p is None:
            w = {c: Fraction(v) for c, v in row.items() if v}
        else:
            w = {}
            for c, v in row.items():
                v = int(v) % p
                if v:
                    w[c] = v
        rem = _reduce_python(w, list(w), pivots, p)
        if not rem:
            continue
        lead = rem[0]
        inv = pow(w[lead], -1, p) if p is not None else 1 / w[lead]
        if p is not None:
            pivots[lead] = {c: (w[c] * inv) % p for c in rem}
        else:
            pivots[lead] = {c: w[c] * inv for c in rem}
    if full:
        for lead in sorted(pivots, reverse=True):
            row = pivots[lead]
            w = {c: v for c, v in row.items() if c != lead}
            rem = _reduce_python(w, list(w), pivots, p)
            new = {lead: 1 if p is not None else Fraction(1)}
            for c in rem:
                new[c] = w[c]
            pivots[lead] = new
    order = sorted(pivots)
    return order, [pivots[c] for c in order]


# --------------------------------------------------------------------------
# dispatch


def _want_numba(backend, p):
    if p is None or p >= MAX_KERNEL_PRIME:
        return False
    if backend is None:
        return use_numba()
    if backend == "numba":
        if not use_numba():
            raise RuntimeError("numba backend requested but numba is disabled or missing")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def echelon(rows, ncols, p=None, full=True, backend=None):
    """Row-echelon form of ``rows`` (list of ``{col: value}``).

    Returns ``(pivot_cols, reduced_rows)`` sorted by pivot column; each row
    has leading coefficient 1.  With ``full`` the rows are the RREF; without
    it they are only reduced against earlier pivots (enough for rank).
    """
    if _want_numba(backend, p):
        indptr, indices, data = rows_to_csr(rows, p)
        piv, optr, oidx, oval = echelon_csr(indptr, indices, data, ncols, p, full)
        return piv.tolist(), csr_to_rows(optr, oidx, oval)
    return echelon_python(rows, ncols, p, full)


def rank(rows, ncols, p=None, backend=None):
    """Rank of the row set; sparsest rows are eliminated first."""
    order = sorted(range(len(rows)), key=lambda i: len(rows[i]))
    rows = [rows[i] for i in order]
    if _want_numba(backend, p):
        indptr, indices, data = rows_to_csr(rows, p)
        piv, _, _, _ = echelon_csr(indptr, indices, data, ncols, p, False)
        return len(piv)
    piv, _ = echelon_python(rows, ncols, p, full=False)
    return len(piv)
