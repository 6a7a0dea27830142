# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exhaustive scorer, climber, compression scan.

Must stay behaviorally identical to _kernels_py; the test suite holds
both backends to the same answers.
"""
from libc.math cimport exp
from libc.stdlib cimport free, malloc

import numpy as np

# 2**40, matching nbc.FP_SCALE.
cdef double FP_SCALE = 1099511627776.0
cdef double TINY = 5e-324
cdef double ONE_MINUS = 0.9999999999999999  # nextafter(1, 0)


cdef inline double _logistic_fp(long long state) nogil:
    cdef double x = state / FP_SCALE
    cdef double e, s
    if x <= 0.0:
        s = 1.0 / (1.0 + exp(x))
    else:
        e = exp(-x)
        s = e / (1.0 + e)
    if s <= 0.0:
        return TINY
    if s >= 1.0:
        return ONE_MINUS
    return s


def enumerate_totals(fp_base, fp_step, weights, desirable, int m):
    """Weighted exact_score of every configuration, Gray-code walk."""
    cdef long long[::1] base = np.ascontiguousarray(fp_base, dtype=np.int64)
    cdef long long[:, ::1] step = np.ascontiguousarray(fp_step, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef unsigned char[::1] des = np.ascontiguousarray(desirable, dtype=np.uint8)
    cdef int z = base.shape[0]
    cdef unsigned long long count = (<unsigned long long>1) << m
    out_arr = np.empty(count, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef long long* states = <long long*>malloc(z * sizeof(long long))
    if states == NULL:
        raise MemoryError()
    cdef unsigned long long i, g = 0, mask
    cdef int j, pos, attr
    cdef double total, s
    with nogil:
        for j in range(z):
            states[j] = base[j]
        total = 0.0
        for j in range(z):
            s = _logistic_fp(states[j])
            total += w[j] * (s if des[j] else 1.0 - s)
        out[0] = total
        for i in range(1, count):
            pos = 0
            while not (i >> pos) & 1:
                pos += 1
            mask = (<unsigned long long>1) << pos
            g ^= mask
            attr = m - 1 - pos
            if g & mask:
                for j in range(z):
                    states[j] += step[j, attr]
            else:
                for j in range(z):
                    states[j] -= step[j, attr]
            total = 0.0
            for j in range(z):
                s = _logistic_fp(states[j])
                total += w[j] * (s if des[j] else 1.0 - s)
            out[g] = total
    free(states)
    return out_arr


def climb(fp_base, fp_step, weights, desirable, int m,
          unsigned long long start_bits, int max_steps):
    """Steepest-ascent single-flip climb; mirrors _kernels_py.climb."""
    cdef long long[::1] base = np.ascontiguousarray(fp_base, dtype=np.int64)
    cdef long long[:, ::1] step = np.ascontiguousarray(fp_step, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef unsigned char[::1] des = np.ascontiguousarray(desirable, dtype=np.uint8)
    cdef int z = base.shape[0]
    cdef long long* states = <long long*>malloc(z * sizeof(long long))
    cdef long long* cand = <long long*>malloc(z * sizeof(long long))
    cdef long long* best_states = <long long*>malloc(z * sizeof(long long))
    if states == NULL or cand == NULL or best_states == NULL:
        free(states); free(cand); free(best_states)
        raise MemoryError()
    cdef unsigned long long bits = start_bits, mask, cand_bits, best_bits
    cdef int i, j, steps = 0, sign, have_best
    cdef long long neighbor_evals = 0
    cdef double score, cand_score, best_score, s
    for j in range(z):
        states[j] = base[j]
    for i in range(m):
        if (bits >> (m - 1 - i)) & 1:
            for j in range(z):
                states[j] += step[j, i]
    score = 0.0
    for j in range(z):
        s = _logistic_fp(states[j])
        score += w[j] * (s if des[j] else 1.0 - s)
    trace_bits = [bits]
    trace_scores = [score]
    while steps < max_steps:
        best_score = score
        best_bits = 0
        have_best = 0
        for i in range(m):
            mask = (<unsigned long long>1) << (m - 1 - i)
            sign = -1 if bits & mask else 1
            cand_score = 0.0
            for j in range(z):
                cand[j] = states[j] + sign * step[j, i]
                s = _logistic_fp(cand[j])
                cand_score += w[j] * (s if des[j] else 1.0 - s)
            neighbor_evals += 1
            cand_bits = bits ^ mask
            if cand_score > best_score or (cand_score == best_score
                                           and have_best and cand_bits < best_bits):
                best_score = cand_score
                best_bits = cand_bits
                have_best = 1
                for j in range(z):
                    best_states[j] = cand[j]
        if not have_best or best_score <= score:
            break
        bits = best_bits
        score = best_score
        for j in range(z):
            states[j] = best_states[j]
        trace_bits.append(bits)
        trace_scores.append(score)
        steps += 1
    free(states); free(cand); free(best_states)
    return int(bits), score, steps, int(neighbor_evals), trace_bits, trace_scores


def compress(coords, order, double sigma):
    """Representative scan; mirrors _kernels_py.compress."""
    cdef double[:, ::1] c = np.ascontiguousarray(coords, dtype=np.float64)
    cdef long long[::1] ord_v = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    cdef int d = c.shape[1]
    alive_arr = np.ones(n, dtype=np.uint8)
    absorbed_arr = np.full(n, -1, dtype=np.int64)
    reps_arr = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] alive = alive_arr
    cdef long long[::1] absorbed = absorbed_arr
    cdef long long[::1] reps = reps_arr
    cdef Py_ssize_t pos, q, idx
    cdef int ax, ok
    cdef Py_ssize_t n_reps = 0
    cdef double diff, bound
    with nogil:
        for pos in range(n):
            idx = <Py_ssize_t>ord_v[pos]
            if not alive[idx]:
                continue
            alive[idx] = 0
            reps[n_reps] = idx
            n_reps += 1
            for q in range(n):
                if not alive[q]:
                    continue
                ok = 1
                for ax in range(d):
                    diff = c[q, ax] - c[idx, ax]
                    if diff < 0:
                        diff = -diff
                    if diff > sigma * c[idx, ax]:
                        ok = 0
                        break
                if ok:
                    alive[q] = 0
                    absorbed[q] = idx
    return reps_arr[:n_reps].copy(), absorbed_arr
