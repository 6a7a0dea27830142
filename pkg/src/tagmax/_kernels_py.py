"""Pure numpy fallback kernels.

Same contract as the compiled module `_kernels`: exhaustive scoring of
all 2^m configurations, steepest-ascent single-flip climbing, and the
trimming compression scan.  backend.py picks whichever is importable.
"""
from __future__ import annotations

import numpy as np

from .nbc import logistic_from_fp, logistic_from_fp_array

# Products per chunk in the exhaustive scorer; bounds peak memory at
# roughly chunk * z * 8 bytes.
_CHUNK = 1 << 18


def enumerate_totals(fp_base: np.ndarray, fp_step: np.ndarray,
                     weights: np.ndarray, desirable: np.ndarray, m: int) -> np.ndarray:
    """Weighted exact_score of every configuration 0..2^m-1.

    Undesirable tags contribute w*(1-s), folded into a constant offset
    plus a signed weight so the chunk loop is a single matmul.
    """
    z = fp_base.shape[0]
    signed = np.where(desirable.astype(bool), weights, -weights)
    offset = float(weights[~desirable.astype(bool)].sum())
    total = np.empty(1 << m, dtype=np.float64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint64)
    step_t = fp_step.T.astype(np.int64)  # (m, z)
    for lo in range(0, 1 << m, _CHUNK):
        hi = min(lo + _CHUNK, 1 << m)
        idx = np.arange(lo, hi, dtype=np.uint64)
        bit_mat = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int64)
        states = bit_mat @ step_t + fp_base[None, :]
        scores = logistic_from_fp_array(states)
        total[lo:hi] = scores @ signed + offset
    return total


def climb(fp_base: np.ndarray, fp_step: np.ndarray, weights: np.ndarray,
          desirable: np.ndarray, m: int, start_bits: int, max_steps: int):
    """Steepest-ascent single-bit-flip climb from start_bits.

    Per-tag integer states make the incremental neighbor evaluation
    exactly equal to a full rescore.  Returns (bits, score, steps,
    neighbor_evals, trace_bits, trace_scores); the trace includes the
    start and every accepted move.
    """
    z = fp_base.shape[0]
    base = [int(v) for v in fp_base]
    step = [[int(v) for v in row] for row in fp_step]
    w = [float(v) for v in weights]
    des = [bool(v) for v in desirable]

    def score_of(states: list[int]) -> float:
        total = 0.0
        for j in range(z):
            s = logistic_from_fp(states[j])
            total += w[j] * (s if des[j] else 1.0 - s)
        return total

    bits = int(start_bits)
    states = list(base)
    for i in range(m):
        if (bits >> (m - 1 - i)) & 1:
            for j in range(z):
                states[j] += step[j][i]
    score = score_of(states)
    trace_bits, trace_scores = [bits], [score]
    steps = 0
    neighbor_evals = 0
    while steps < max_steps:
        best_score = score
        best_bits = -1
        best_states = None
        for i in range(m):
            mask = 1 << (m - 1 - i)
            sign = -1 if bits & mask else 1
            cand_states = [states[j] + sign * step[j][i] for j in range(z)]
            cand_score = score_of(cand_states)
            neighbor_evals += 1
            cand_bits = bits ^ mask
            if cand_score > best_score or (cand_score == best_score
                                           and best_bits >= 0 and cand_bits < best_bits):
                best_score, best_bits, best_states = cand_score, cand_bits, cand_states
        if best_bits < 0 or best_score <= score:
            break
        bits, score, states = best_bits, best_score, best_states
        trace_bits.append(bits)
        trace_scores.append(score)
        steps += 1
    return bits, score, steps, neighbor_evals, trace_bits, trace_scores


def compress(coords: np.ndarray, order: np.ndarray, sigma: float):
    """Single-pass representative scan of the trimming compression.

    Visits points in `order`; each still-alive point becomes a
    representative and deletes every remaining point within per-axis
    relative distance sigma of it.  Returns (reps in scan order,
    absorbed_by) where absorbed_by[p] is the representative that
    deleted p, or -1 for representatives themselves.
    """
    n = coords.shape[0]
    alive = np.ones(n, dtype=bool)
    absorbed_by = np.full(n, -1, dtype=np.int64)
    reps = []
    for idx in order:
        idx = int(idx)
        if not alive[idx]:
            continue
        alive[idx] = False
        reps.append(idx)
        rem = np.flatnonzero(alive)
        if rem.size == 0:
            continue
        c = coords[idx]
        close = np.all(np.abs(coords[rem] - c) <= sigma * c, axis=1)
        victims = rem[close]
        if victims.size:
            alive[victims] = False
            absorbed_by[victims] = idx
    return np.array(reps, dtype=np.int64), absorbed_by
