"""Randomized restart hill climbing solver.

Each restart walks steepest-ascent over single-bit flips from a
uniformly random configuration.  Neighbor deltas reuse the per-tag
quantized log-odds states, so an incremental evaluation is exactly the
score a full rescore would produce; ties between equally good
neighbors break toward the smaller configuration.  Fast and usually
near-optimal, but offers no approximation guarantee.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .nbc import Model, ModelError, Query, query_arrays
from .oracle import SolverStats, TopK, rank_entries

DEFAULT_RESTARTS = 16
# Steps per restart default to this multiple of the attribute count.
STEP_FACTOR = 10


@dataclass(frozen=True)
class HCConfig:
    restarts: int = DEFAULT_RESTARTS
    max_steps: int | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.restarts < 1:
            raise ModelError("need at least one restart")
        if self.max_steps is not None and self.max_steps < 0:
            raise ModelError("max_steps must be >= 0")


@dataclass(frozen=True)
class ClimbResult:
    """One restart: its local optimum and the path that reached it."""

    bits: int
    score: float
    steps: int
    neighbor_evals: int
    trace_bits: tuple[int, ...]
    trace_scores: tuple[float, ...]


def climb_from(model: Model, query: Query, start_bits: int,
               max_steps: int | None = None) -> ClimbResult:
    """Steepest-ascent climb from one starting configuration."""
    query.validate(model)
    if not 0 <= start_bits < (1 << model.m):
        raise ModelError(f"start {start_bits} out of range for m={model.m}")
    base, step, weights, desirable = query_arrays(model, query.selections)
    steps_cap = STEP_FACTOR * model.m if max_steps is None else max_steps
    bits, score, steps, evals, tb, ts = backend.kernels.climb(
        base, step, weights, desirable, model.m, start_bits, steps_cap)
    return ClimbResult(bits=bits, score=score, steps=steps, neighbor_evals=evals,
                       trace_bits=tuple(tb), trace_scores=tuple(ts))


def solve_hc(model: Model, query: Query, config: HCConfig | None = None,
             trace: bool = False) -> TopK:
    """Top-k from deduplicated local optima over random restarts.

    When fewer distinct optima than k are found the result is shorter
    than k and stats.detail["underfilled"] is set.
    """
    t0 = time.perf_counter()
    query.validate(model)
    cfg = config or HCConfig()
    cfg.validate()

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    space = 1 << model.m
    starts = [int(v) for v in rng.integers(0, space, size=cfg.restarts, dtype=np.uint64)]

    climbs = [climb_from(model, query, s, cfg.max_steps) for s in starts]
    optima: list[int] = []
    seen: set[int] = set()
    for c in climbs:
        if c.bits not in seen:
            seen.add(c.bits)
            optima.append(c.bits)

    k_eff = min(query.k, space)
    entries = rank_entries(model, query, optima)[:k_eff]
    detail = {
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "max_steps": cfg.max_steps if cfg.max_steps is not None else STEP_FACTOR * model.m,
        "starts": starts,
        "steps": [c.steps for c in climbs],
        "local_optima": optima,
        "underfilled": len(optima) < k_eff,
    }
    if trace:
        detail["traces"] = [
            {"bits": list(c.trace_bits), "scores": list(c.trace_scores)}
            for c in climbs
        ]
    examined = cfg.restarts + sum(c.neighbor_evals for c in climbs)
    stats = SolverStats(algorithm="hc", candidates_examined=examined,
                        iterations=cfg.restarts, wall_time=time.perf_counter() - t0,
                        detail=detail)
    return TopK(entries=entries, stats=stats)
