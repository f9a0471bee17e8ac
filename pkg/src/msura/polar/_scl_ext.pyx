# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled successive-cancellation list decoder kernel.

Same slot layout, ranking and fork rules as ``_scl_py``; the only
difference is that a forked path copies just the LLR levels that are read
before being recomputed.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.string cimport memcpy

cnp.import_array()


ctypedef struct Cand:
    double metric
    Py_ssize_t index


cdef inline bint _before(Cand a, Cand b) noexcept nogil:
    return a.metric < b.metric or (a.metric == b.metric and a.index < b.index)


cdef void _select(Cand* c, Py_ssize_t count, Py_ssize_t k) noexcept nogil:
    # Partition so that c[:k] holds the k best candidates (in any order).
    cdef Py_ssize_t lo = 0, hi = count - 1, i, j, mid
    cdef Cand pivot, tmp
    while lo < hi:
        mid = lo + (hi - lo) // 2
        pivot = c[mid]
        i = lo
        j = hi
        while i <= j:
            while _before(c[i], pivot):
                i += 1
            while _before(pivot, c[j]):
                j -= 1
            if i <= j:
                tmp = c[i]
                c[i] = c[j]
                c[j] = tmp
                i += 1
                j -= 1
        if k - 1 <= j:
            hi = j
        elif k - 1 >= i:
            lo = i
        else:
            break


cdef inline int _ctz(Py_ssize_t x) noexcept nogil:
    cdef int k = 0
    while not (x & 1):
        x >>= 1
        k += 1
    return k


cdef void _update_llrs(double* row, const unsigned char* srow, const double* llr,
                       const Py_ssize_t* off, Py_ssize_t N, int n, Py_ssize_t phi, int start) noexcept nogil:
    cdef int d
    cdef Py_ssize_t S, beta
    cdef const double* src
    cdef double* dst
    cdef const unsigned char* c
    cdef double a, b, m
    for d in range(start, n + 1):
        S = N >> d
        src = llr if d == 1 else row + off[d - 1]
        dst = row + off[d]
        if (phi >> (n - d)) & 1:
            c = srow + 2 * off[d]
            for beta in range(S):
                a = src[beta]
                b = src[beta + S]
                dst[beta] = b - a if c[2 * beta] else b + a
        else:
            for beta in range(S):
                a = src[beta]
                b = src[beta + S]
                m = fabs(a) if fabs(a) < fabs(b) else fabs(b)
                dst[beta] = -m if (a < 0) != (b < 0) else m


cdef void _update_sums(unsigned char* srow, const Py_ssize_t* off, Py_ssize_t N, int n,
                       Py_ssize_t phi, unsigned char bit) noexcept nogil:
    cdef int d = n
    cdef Py_ssize_t psi = phi, S, beta, here, up, col
    cdef unsigned char c0, c1
    srow[2 * off[n] + (phi & 1)] = bit
    while psi & 1 and d > 1:
        S = N >> d
        col = (psi >> 1) & 1
        here = 2 * off[d]
        up = 2 * off[d - 1]
        for beta in range(S):
            c0 = srow[here + 2 * beta]
            c1 = srow[here + 2 * beta + 1]
            srow[up + 2 * beta + col] = c0 ^ c1
            srow[up + 2 * (beta + S) + col] = c1
        psi >>= 1
        d -= 1


def scl_paths(const double[::1] llr, const unsigned char[::1] frozen, int list_size):
    """Run the list decoder and return ``(bits, metrics)`` of surviving paths."""
    cdef Py_ssize_t N = llr.shape[0]
    cdef int n = 0
    while (<Py_ssize_t>1 << n) < N:
        n += 1
    cdef Py_ssize_t p_len = N - 1, s_len = 2 * (N - 1)
    cdef int L = list_size

    off_arr = np.zeros(n + 2, dtype=np.intp)
    cdef Py_ssize_t[::1] off = off_arr
    cdef int d
    for d in range(1, n + 1):
        off[d + 1] = off[d] + (N >> d)

    llrs_arr = np.zeros((L, p_len), dtype=np.float64)
    sums_arr = np.zeros((L, s_len), dtype=np.uint8)
    bits_arr = np.zeros((L, N), dtype=np.uint8)
    pm_arr = np.zeros(L, dtype=np.float64)
    active_arr = np.zeros(L, dtype=np.uint8)
    act_arr = np.zeros(L, dtype=np.intp)
    keep_arr = np.zeros((L, 2), dtype=np.uint8)
    pen_arr = np.zeros((L, 2), dtype=np.float64)
    cand_buf = np.zeros(2 * L * sizeof(Cand), dtype=np.uint8)

    cdef double[:, ::1] llrs = llrs_arr
    cdef unsigned char[:, ::1] sums = sums_arr
    cdef unsigned char[:, ::1] bits = bits_arr
    cdef double[::1] pm = pm_arr
    cdef unsigned char[::1] active = active_arr
    cdef Py_ssize_t[::1] act = act_arr
    cdef unsigned char[:, ::1] keep = keep_arr
    cdef double[:, ::1] pen = pen_arr
    cdef unsigned char[::1] cbytes = cand_buf
    cdef Cand* cands = <Cand*>&cbytes[0]

    cdef Py_ssize_t phi, k, slot, new, nact, ncand, idx, leaf = off[n], copy_len
    cdef int start, nxt
    cdef double lv
    cdef const double* chan = &llr[0]
    cdef const Py_ssize_t* offp = &off[0]

    active[0] = 1
    with nogil:
        for phi in range(N):
            nact = 0
            for slot in range(L):
                if active[slot]:
                    act[nact] = slot
                    nact += 1
            start = 1 if phi == 0 else n - _ctz(phi)
            for k in range(nact):
                slot = act[k]
                _update_llrs(&llrs[slot, 0], &sums[slot, 0], chan, offp, N, n, phi, start)

            if frozen[phi]:
                for k in range(nact):
                    slot = act[k]
                    lv = llrs[slot, leaf]
                    if lv < 0:
                        pm[slot] = pm[slot] + fabs(lv)
                    else:
                        pm[slot] = pm[slot] + 0.0
                    bits[slot, phi] = 0
            else:
                ncand = 0
                for k in range(nact):
                    slot = act[k]
                    lv = llrs[slot, leaf]
                    pen[slot, 0] = fabs(lv) if lv < 0 else 0.0
                    pen[slot, 1] = fabs(lv) if lv > 0 else 0.0
                    keep[slot, 0] = 0
                    keep[slot, 1] = 0
                    cands[ncand].metric = pm[slot] + pen[slot, 0]
                    cands[ncand].index = 2 * slot
                    cands[ncand + 1].metric = pm[slot] + pen[slot, 1]
                    cands[ncand + 1].index = 2 * slot + 1
                    ncand += 2
                if ncand > L:
                    _select(cands, ncand, L)
                    ncand = L
                for k in range(ncand):
                    idx = cands[k].index
                    keep[idx >> 1, idx & 1] = 1
                for k in range(nact):
                    slot = act[k]
                    if not keep[slot, 0] and not keep[slot, 1]:
                        active[slot] = 0

                if phi + 1 < N:
                    nxt = n - _ctz(phi + 1)
                    copy_len = offp[nxt]
                else:
                    copy_len = 0
                for k in range(nact):
                    slot = act[k]
                    if keep[slot, 0] and keep[slot, 1]:
                        new = 0
                        while active[new]:
                            new += 1
                        if copy_len:
                            memcpy(&llrs[new, 0], &llrs[slot, 0], copy_len * sizeof(double))
                        memcpy(&sums[new, 0], &sums[slot, 0], s_len)
                        memcpy(&bits[new, 0], &bits[slot, 0], N)
                        active[new] = 1
                        keep[new, 0] = 0
                        keep[new, 1] = 0
                        pm[new] = pm[slot] + pen[slot, 1]
                        bits[new, phi] = 1
                        pm[slot] = pm[slot] + pen[slot, 0]
                        bits[slot, phi] = 0
                    elif keep[slot, 0]:
                        pm[slot] = pm[slot] + pen[slot, 0]
                        bits[slot, phi] = 0
                    elif keep[slot, 1]:
                        pm[slot] = pm[slot] + pen[slot, 1]
                        bits[slot, phi] = 1

            for slot in range(L):
                if active[slot]:
                    _update_sums(&sums[slot, 0], offp, N, n, phi, bits[slot, phi])

    mask = active_arr.astype(bool)
    return bits_arr[mask], pm_arr[mask]
