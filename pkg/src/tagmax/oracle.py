"""Exhaustive reference solver and the shared result types.

solve_naive scores every one of the 2^m configurations and is the
ground truth the other solvers are held to.  Capped at m <= 24.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import bits as bitops
from .backend import kernels
from .nbc import Model, ModelError, Query, exact_score, per_tag_breakdown, query_arrays

NAIVE_ATTR_CAP = 24

# Extra candidates rescored canonically beyond k, so a last-ulp
# disagreement between kernel and canonical scores can never change
# which configurations make the final cut.
_SELECT_MARGIN = 64


@dataclass(frozen=True)
class RankedProduct:
    """One scored configuration: bits plus per-tag breakdown in query order."""

    bits: int
    m: int
    score: float
    tag_scores: tuple[float, ...]
    per_tag: tuple[float, ...]

    @property
    def bitstring(self) -> str:
        return bitops.to_string(self.bits, self.m)

    def to_dict(self) -> dict:
        return {
            "bits": self.bitstring,
            "score": self.score,
            "tag_scores": list(self.tag_scores),
            "per_tag": list(self.per_tag),
        }


def _jsonable(value):
    """Recursively coerce numpy scalars and tuples for json.dumps."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class SolverStats:
    algorithm: str
    candidates_examined: int
    iterations: int
    wall_time: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "candidates_examined": self.candidates_examined,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "detail": _jsonable(self.detail),
        }


@dataclass
class TopK:
    entries: list[RankedProduct]
    stats: SolverStats

    def bitstrings(self) -> list[str]:
        return [e.bitstring for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "stats": self.stats.to_dict(),
        }


def ranked(model: Model, query: Query, bits: int) -> RankedProduct:
    """Canonically scored RankedProduct for one configuration."""
    raw, contrib = per_tag_breakdown(model, query, bits)
    return RankedProduct(bits=bits, m=model.m, score=exact_score(model, query, bits),
                         tag_scores=tuple(raw), per_tag=tuple(contrib))


def rank_entries(model: Model, query: Query, candidates) -> list[RankedProduct]:
    """Canonical (score desc, bits asc) ranking of candidate bit configurations."""
    entries = [ranked(model, query, b) for b in candidates]
    entries.sort(key=lambda e: (-e.score, e.bits))
    return entries


def _check_cap(model: Model) -> None:
    if model.m > NAIVE_ATTR_CAP:
        raise ModelError(
            f"exhaustive enumeration supports at most {NAIVE_ATTR_CAP} attributes, "
            f"model has {model.m}")


def all_totals(model: Model, query: Query) -> np.ndarray:
    """Kernel exact_score totals of every configuration, indexed by bits."""
    _check_cap(model)
    query.validate(model)
    base, step, weights, desirable = query_arrays(model, query.selections)
    return kernels.enumerate_totals(base, step, weights, desirable, model.m)


def solve_naive(model: Model, query: Query) -> TopK:
    """Ground-truth top-k by full enumeration."""
    t0 = time.perf_counter()
    totals = all_totals(model, query)
    count = totals.shape[0]
    take = min(count, query.k + _SELECT_MARGIN)
    if take < count:
        cand = np.argpartition(-totals, take - 1)[:take]
    else:
        cand = np.arange(count)
    entries = rank_entries(model, query, (int(b) for b in cand))[:query.k]
    stats = SolverStats(algorithm="naive", candidates_examined=count, iterations=1,
                        wall_time=time.perf_counter() - t0)
    return TopK(entries=entries, stats=stats)


def rank_of(model: Model, query: Query, bits: int) -> int:
    """1-based rank of a configuration in the full ordering.

    Ties resolve in favor of the lexicographically smaller bit vector,
    consistent with solve_naive's ordering.
    """
    if not (0 <= bits < (1 << model.m)):
        raise ModelError(f"bits {bits} out of range for m={model.m}")
    totals = all_totals(model, query)
    t = totals[bits]
    return 1 + int((totals > t).sum()) + int((totals[:bits] == t).sum())
