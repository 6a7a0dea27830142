"""Polynomial-time approximate solver.

Tags are split into groups of at most zprime.  For each group a
trimming scan builds, attribute by attribute, a compressed frontier of
configurations whose per-tag score vectors are pairwise more than a
relative sigma apart, so the frontier size stays polynomial while some
survivor stays within (1+sigma)^m of every deleted configuration on
every axis.  The per-group top k survivors (plus the associates they
absorbed) form a candidate pool that is rescored exactly against the
full query.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .dataset import Dataset, attribute_blocks
from .ett import greedy_partition
from .nbc import (DESIRABLE, Model, ModelError, Query, TagSelection,
                  logistic_from_fp_array)
from .oracle import SolverStats, TopK, rank_entries


@dataclass(frozen=True)
class TagGrouping:
    """Partition of query selection indices into groups of bounded size."""

    groups: tuple[tuple[int, ...], ...]
    method: str = "contiguous"

    def validate(self, z: int) -> None:
        flat = [i for g in self.groups for i in g]
        if sorted(flat) != list(range(z)):
            raise ModelError(f"grouping does not partition selections 0..{z - 1}")
        if any(not g for g in self.groups):
            raise ModelError("empty tag group")

    @property
    def max_size(self) -> int:
        return max(len(g) for g in self.groups)


def group_tags(query: Query, zprime: int, method: str = "contiguous",
               ds: Dataset | None = None) -> TagGrouping:
    """Split the query's selections into groups of at most zprime tags.

    "contiguous" blocks in selection order; "correlation" packs tags
    with high |Pearson correlation| over the dataset rows together,
    which tends to let one survivor cover its whole group.
    """
    z = len(query.selections)
    if zprime < 1:
        raise ModelError("group size must be >= 1")
    l = math.ceil(z / zprime)
    if method == "contiguous":
        groups = tuple(tuple(b) for b in attribute_blocks(z, l))
    elif method == "correlation":
        if ds is None:
            raise ModelError("correlation grouping needs the training dataset")
        cols = ds.tags[:, [sel.tag for sel in query.selections]].astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.corrcoef(cols, rowvar=False)
        corr = np.atleast_2d(np.nan_to_num(corr, nan=0.0))
        groups = tuple(tuple(g) for g in greedy_partition(np.abs(corr), l, zprime))
    else:
        raise ModelError(f"unknown grouping method {method!r}")
    g = TagGrouping(groups=groups, method=method)
    g.validate(z)
    return g


@dataclass
class PtasTrace:
    """Per-iteration record of one group's trimming scan."""

    sizes: list[int] = field(default_factory=list)
    retained: list[list[int]] | None = None
    coord_min: float = math.inf
    coord_max: float = -math.inf
    generated: int = 0


@dataclass
class GroupResult:
    """Survivors of one tag group's scan plus their candidate pool."""

    selection_indices: tuple[int, ...]
    pool: list[int]
    trace: PtasTrace


def ptas_group(model: Model, sels: list[TagSelection], sigma: float, k: int,
               trace: bool = False) -> tuple[list[int], PtasTrace]:
    """Trimming scan over attributes for one tag group.

    Iteration i doubles the frontier with bit-i-set copies, then scans
    candidates in descending configuration order: each survivor deletes
    every later candidate within per-axis relative distance sigma and
    adopts up to k-1 of the deleted configurations as associates.
    Returns the candidate pool (top-k survivors by group score, each
    expanded with its associates) and the scan trace.
    """
    if sigma < 0:
        raise ModelError("sigma must be >= 0")
    m = model.m
    gt = [sel.tag for sel in sels]
    des = np.array([sel.polarity == DESIRABLE for sel in sels], dtype=bool)
    gw = np.array([sel.weight for sel in sels], dtype=np.float64)
    step = model.fp_step[gt]  # (zg, m)

    bits_arr = np.zeros(1, dtype=np.int64)
    states = model.fp_base[gt][None, :].copy()  # (1, zg) int64
    assoc: list[list[int]] = [[]]
    tr = PtasTrace(retained=[] if trace else None)

    for i in range(m):
        mask = 1 << (m - 1 - i)
        comb_bits = np.concatenate([bits_arr | mask, bits_arr])
        comb_states = np.vstack([states + step[:, i][None, :], states])
        comb_assoc = [[a | mask for a in al] for al in assoc] + assoc
        # Bit-set copies all precede the originals and each half keeps
        # its internal order, so sorting by descending value is a merge.
        order = np.argsort(-comb_bits, kind="stable")
        comb_bits = comb_bits[order]
        comb_states = comb_states[order]
        comb_assoc = [comb_assoc[int(o)] for o in order]

        coords = logistic_from_fp_array(comb_states)
        coords[:, ~des] = 1.0 - coords[:, ~des]
        tr.generated += coords.shape[0]
        tr.coord_min = min(tr.coord_min, float(coords.min()))
        tr.coord_max = max(tr.coord_max, float(coords.max()))

        reps, absorbed_by = backend.kernels.compress(
            coords, np.arange(coords.shape[0], dtype=np.int64), sigma)
        if k > 1:
            for v in range(coords.shape[0]):
                r = int(absorbed_by[v])
                if r < 0:
                    continue
                al = comb_assoc[r]
                for b in (int(comb_bits[v]), *comb_assoc[v]):
                    if len(al) >= k - 1:
                        break
                    if b not in al:
                        al.append(b)
        bits_arr = comb_bits[reps]
        states = comb_states[reps]
        assoc = [comb_assoc[int(r)] for r in reps]
        tr.sizes.append(int(reps.shape[0]))
        if tr.retained is not None:
            tr.retained.append([int(b) for b in bits_arr])

    coords = logistic_from_fp_array(states)
    coords[:, ~des] = 1.0 - coords[:, ~des]
    gscore = coords @ gw
    pick = sorted(range(bits_arr.shape[0]),
                  key=lambda idx: (-gscore[idx], int(bits_arr[idx])))[:k]
    pool: list[int] = []
    for idx in pick:
        pool.append(int(bits_arr[idx]))
        pool.extend(assoc[idx])
    return pool, tr


def frontier_size_bound(coord_min: float, coord_max: float, sigma: float,
                        zg: int) -> float:
    """Cap on the survivor count implied by pairwise sigma-separation.

    Along each axis the observed coordinate range supports at most
    1 + log_{1+sigma}(coord_max / coord_min) pairwise-separated values.
    """
    if sigma <= 0 or coord_min <= 0 or coord_max < coord_min:
        return math.inf
    per_axis = 1.0 + math.log(coord_max / coord_min) / math.log1p(sigma)
    return per_axis ** zg


def solve_pa(model: Model, query: Query, epsilon: float | None = None,
             zprime: int = 2, grouping: TagGrouping | None = None,
             grouping_method: str = "contiguous", ds: Dataset | None = None,
             sigma: float | None = None, trace: bool = False) -> TopK:
    """Approximate top-k with a per-group trimming scan.

    Callers set epsilon (sigma defaults to epsilon / (2 m)) or pin
    sigma directly.  The best returned configuration has a score
    within a factor about z (1+epsilon) / zprime of the optimum; in
    practice it is usually optimal or near it.
    """
    t0 = time.perf_counter()
    query.validate(model)
    if sigma is None:
        if epsilon is None or epsilon <= 0:
            raise ModelError("epsilon must be > 0 when sigma is not given")
        sigma = epsilon / (2 * model.m)
    elif sigma < 0:
        raise ModelError("sigma must be >= 0")
    if epsilon is None:
        epsilon = sigma * 2 * model.m
    if grouping is None:
        grouping = group_tags(query, zprime, grouping_method, ds)
    grouping.validate(len(query.selections))

    results: list[GroupResult] = []
    for g in grouping.groups:
        sels = [query.selections[i] for i in g]
        pool, tr = ptas_group(model, sels, sigma, query.k, trace=trace)
        results.append(GroupResult(selection_indices=g, pool=pool, trace=tr))

    merged: list[int] = []
    seen: set[int] = set()
    for res in results:
        for bits in res.pool:
            if bits not in seen:
                seen.add(bits)
                merged.append(bits)
    entries = rank_entries(model, query, merged)[:min(query.k, 1 << model.m)]

    generated = sum(res.trace.generated for res in results)
    detail = {
        "sigma": sigma,
        "epsilon": epsilon,
        "groups": [list(res.selection_indices) for res in results],
        "grouping_method": grouping.method,
        "frontier_sizes": [res.trace.sizes for res in results],
        "coord_min": min(res.trace.coord_min for res in results),
        "coord_max": max(res.trace.coord_max for res in results),
        "pool_size": len(merged),
    }
    if trace:
        detail["retained"] = [res.trace.retained for res in results]
    stats = SolverStats(algorithm="pa", candidates_examined=generated,
                        iterations=model.m, wall_time=time.perf_counter() - t0,
                        detail=detail)
    return TopK(entries=entries, stats=stats)
