"""Exact two-tier top-k solver.

Tier 1 runs one subsystem per queried tag: the tag's attribute groups
become partial-score lists sorted best-first, and a rank-join over the
lists releases complete configurations in exact per-tag score order,
gated by the maximum-possible-future-score bound of everything not yet
joined.  Tier 2 round-robins GetNext over the subsystems, keeps the
best k complete configurations by exact score, and stops when the
k-th best reaches the threshold alpha, the weighted sum of the last
score each subsystem released.  Results match solve_naive exactly.
"""
from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, DatasetError, attribute_blocks
from .nbc import (DESIRABLE, Model, ModelError, Query, TagSelection,
                  logistic_from_fp)
from .oracle import RankedProduct, SolverStats, TopK, ranked

# Partial lists hold 2^|group| entries; keep groups small enough to stay cheap.
MAX_GROUP_SIZE = 12


@dataclass(frozen=True)
class AttributeGrouping:
    """Partition of attribute indices 0..m-1 into disjoint groups."""

    groups: tuple[tuple[int, ...], ...]
    method: str = "contiguous"

    def validate(self, m: int) -> None:
        flat = [i for g in self.groups for i in g]
        if sorted(flat) != list(range(m)):
            raise ModelError(f"grouping does not partition attributes 0..{m - 1}")
        for g in self.groups:
            if not g:
                raise ModelError("empty attribute group")
            if len(g) > MAX_GROUP_SIZE:
                raise ModelError(
                    f"attribute group of size {len(g)} exceeds cap {MAX_GROUP_SIZE}")


def contiguous_grouping(m: int, l: int) -> AttributeGrouping:
    """l contiguous near-equal blocks in attribute order."""
    if l < 1:
        raise ModelError("need at least one group")
    groups = tuple(tuple(b) for b in attribute_blocks(m, l))
    g = AttributeGrouping(groups=groups, method="contiguous")
    g.validate(m)
    return g


def grouping_for_size(m: int, mprime: int) -> AttributeGrouping:
    """Contiguous grouping with at most mprime attributes per group."""
    if mprime < 1:
        raise ModelError("group size must be >= 1")
    return contiguous_grouping(m, math.ceil(m / mprime))


def greedy_partition(weights: np.ndarray, l: int, cap: int) -> list[list[int]]:
    """Greedy capacity-bounded partition by descending pairwise weight.

    weights is a symmetric (n, n) matrix.  Edges are taken heaviest
    first; both endpoints land in one group when capacities allow, then
    leftovers fill free slots in index order.  Deterministic: ties break
    on (i, j) index order, group choice prefers the emptiest lowest
    index group.
    """
    n = weights.shape[0]
    edges = sorted(
        ((i, j) for i in range(n) for j in range(i + 1, n)),
        key=lambda e: (-weights[e[0], e[1]], e[0], e[1]),
    )
    group_of = [-1] * n
    groups: list[list[int]] = [[] for _ in range(l)]

    def emptiest(min_free: int) -> int:
        best, best_free = -1, 0
        for gi, g in enumerate(groups):
            free = cap - len(g)
            if free >= min_free and free > best_free:
                best, best_free = gi, free
        return best

    for i, j in edges:
        a, b = group_of[i], group_of[j]
        if a < 0 and b < 0:
            gi = emptiest(2)
            if gi >= 0:
                groups[gi] += [i, j]
                group_of[i] = group_of[j] = gi
        elif a < 0 or b < 0:
            placed, free_end = (i, j) if a < 0 else (j, i)
            gi = group_of[free_end]
            if len(groups[gi]) < cap:
                groups[gi].append(placed)
                group_of[placed] = gi
    for i in range(n):
        if group_of[i] < 0:
            for g in groups:
                if len(g) < cap:
                    g.append(i)
                    break
    return [sorted(g) for g in groups if g]


def group_attributes(ds: Dataset, l: int, method: str = "contiguous") -> AttributeGrouping:
    """Partition the dataset's attributes into l groups.

    "contiguous" splits in column order; "correlation" weights the
    complete attribute graph with |Pearson correlation| over the rows
    and packs correlated attributes together greedily.  Constant
    columns have undefined correlation, treated as weight 0.
    """
    if method == "contiguous":
        return contiguous_grouping(ds.m, l)
    if method != "correlation":
        raise ModelError(f"unknown grouping method {method!r}")
    if l < 1:
        raise ModelError("need at least one group")
    x = ds.attrs.astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(x, rowvar=False)
    corr = np.atleast_2d(np.nan_to_num(corr, nan=0.0))
    weights = np.abs(corr)
    cap = math.ceil(ds.m / min(l, ds.m))
    groups = greedy_partition(weights, min(l, ds.m), cap)
    g = AttributeGrouping(groups=tuple(tuple(x) for x in groups), method="correlation")
    g.validate(ds.m)
    return g


def _prior_shares(fp_prior: int, l: int) -> list[int]:
    """Split the quantized prior log-odds into l integers summing exactly."""
    q, rem = divmod(fp_prior, l)
    return [q + 1 if g < rem else q for g in range(l)]


@dataclass(frozen=True)
class PartialList:
    """All assignments of one attribute group, best partial score first.

    Entries are (quantized partial log-odds, fragment bits).  Fragments
    use full-width bit positions so joined products OR together.
    """

    entries: tuple[tuple[int, int], ...]


def build_partial_lists(model: Model, tag: int, grouping: AttributeGrouping,
                        desirable: bool) -> list[PartialList]:
    lr = model.fp_log_ratio
    m = model.m
    shares = _prior_shares(int(model.fp_log_prior[tag]), len(grouping.groups))
    lists = []
    for share, group in zip(shares, grouping.groups):
        entries = []
        for values in itertools.product((0, 1), repeat=len(group)):
            fp = share
            frag = 0
            for attr, v in zip(group, values):
                fp += int(lr[tag, attr, v])
                if v:
                    frag |= 1 << (m - 1 - attr)
            entries.append((fp, frag))
        # Desirable tags want small log-odds first; undesirable the reverse.
        entries.sort(key=(lambda e: (e[0], e[1])) if desirable
                     else (lambda e: (-e[0], e[1])))
        lists.append(PartialList(entries=tuple(entries)))
    return lists


class SubsystemExhausted(Exception):
    """GetNext end-of-stream: every configuration has been released."""


class TagSubsystem:
    """Tier-1 rank-join producing one tag's configurations in score order."""

    def __init__(self, model: Model, sel: TagSelection, grouping: AttributeGrouping,
                 record_emissions: bool = False):
        self.model = model
        self.sel = sel
        self.desirable = sel.polarity == DESIRABLE
        self.lists = build_partial_lists(model, sel.tag, grouping, self.desirable)
        self.cursors = [0] * len(self.lists)
        self.heap: list[tuple[int, int]] = []
        self.rr = 0
        self.released = 0
        self.joins = 0
        self.total = 1 << model.m
        self.last_oriented: float | None = None
        self.emissions: list[tuple[int, float]] | None = [] if record_emissions else None

    def _bound(self) -> int | None:
        """Best possible quantized log-odds of any not-yet-joined product.

        Per list i, an unjoined product using a future entry of i pays at
        least (last consumed of i) + (tops of the others); the bound is
        the best of those terms.  None once every list is exhausted.
        """
        tops = [pl.entries[0][0] for pl in self.lists]
        total_tops = sum(tops)
        best: int | None = None
        for i, pl in enumerate(self.lists):
            c = self.cursors[i]
            if c >= len(pl.entries):
                continue
            term = pl.entries[c - 1][0] + total_tops - tops[i]
            if best is None:
                best = term
            elif self.desirable:
                best = min(best, term)
            else:
                best = max(best, term)
        return best

    def _advance(self) -> bool:
        """Consume the next entry of the round-robin list and join it."""
        l = len(self.lists)
        for off in range(l):
            i = (self.rr + off) % l
            if self.cursors[i] < len(self.lists[i].entries):
                fp_e, frag_e = self.lists[i].entries[self.cursors[i]]
                self.cursors[i] += 1
                self.rr = (i + 1) % l
                prefixes = [self.lists[o].entries[:self.cursors[o]]
                            for o in range(l) if o != i]
                if all(prefixes):
                    for combo in itertools.product(*prefixes):
                        fp = fp_e
                        bits = frag_e
                        for pfp, pfrag in combo:
                            fp += pfp
                            bits |= pfrag
                        self.joins += 1
                        key = fp if self.desirable else -fp
                        heapq.heappush(self.heap, (key, bits))
                return True
        return False

    def get_next(self) -> tuple[int, float]:
        """Next configuration in exact per-tag score order.

        Raises SubsystemExhausted after the 2^m-th release.
        """
        if self.released >= self.total:
            raise SubsystemExhausted()
        while True:
            if self.heap:
                bound = self._bound()
                key, bits = self.heap[0]
                fp = key if self.desirable else -key
                releasable = (
                    bound is None
                    or (fp <= bound if self.desirable else fp >= bound)
                )
                if releasable:
                    heapq.heappop(self.heap)
                    s = logistic_from_fp(fp)
                    oriented = s if self.desirable else 1.0 - s
                    self.released += 1
                    self.last_oriented = oriented
                    if self.emissions is not None:
                        self.emissions.append((bits, oriented))
                    return bits, oriented
            if not self._advance() and not self.heap:
                raise SubsystemExhausted()


class TopKBuffer:
    """Keeps the best k entries by (score desc, bits asc)."""

    def __init__(self, k: int):
        self.k = k
        self._heap: list[tuple[float, int, RankedProduct]] = []

    def insert(self, entry: RankedProduct) -> None:
        item = (entry.score, -entry.bits, entry)
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, item)
        elif item > self._heap[0]:
            heapq.heapreplace(self._heap, item)

    def __len__(self) -> int:
        return len(self._heap)

    def min_k(self) -> float | None:
        """Score of the current k-th best; None while underfilled."""
        if len(self._heap) < self.k:
            return None
        return self._heap[0][0]

    def items(self) -> list[RankedProduct]:
        return [e for _, _, e in sorted(self._heap, key=lambda t: (-t[0], -t[1]))]


def solve_ett(model: Model, query: Query, grouping: AttributeGrouping | None = None,
              mprime: int | None = None, trace: bool = False,
              record_emissions: bool = False) -> TopK:
    """Exact top-k via the two-tier threshold algorithm."""
    t0 = time.perf_counter()
    query.validate(model)
    if grouping is None:
        grouping = grouping_for_size(model.m, mprime if mprime else 3)
    grouping.validate(model.m)

    subsystems = [TagSubsystem(model, sel, grouping, record_emissions)
                  for sel in query.selections]
    k_eff = min(query.k, 1 << model.m)
    buffer = TopKBuffer(k_eff)
    seen: set[int] = set()
    done = [False] * len(subsystems)
    rounds = 0
    alpha_trace: list[tuple[float, float | None]] = []

    while True:
        rounds += 1
        exhausted = False
        for j, sub in enumerate(subsystems):
            if done[j]:
                continue
            try:
                bits, _ = sub.get_next()
            except SubsystemExhausted:
                done[j] = True
                exhausted = True
                continue
            if bits not in seen:
                seen.add(bits)
                buffer.insert(ranked(model, query, bits))
        if exhausted:
            # An exhausted subsystem has released (and scored) every
            # configuration, so the buffer already holds the true top k.
            break
        alpha = sum(sel.weight * sub.last_oriented
                    for sel, sub in zip(query.selections, subsystems))
        min_k = buffer.min_k()
        if trace:
            alpha_trace.append((alpha, min_k))
        if min_k is not None and min_k >= alpha:
            break

    released = sum(sub.released for sub in subsystems)
    detail = {
        "rounds": rounds,
        "grouping": [list(g) for g in grouping.groups],
        "grouping_method": grouping.method,
        "tier1_joins": sum(sub.joins for sub in subsystems),
        "released_per_tag": [sub.released for sub in subsystems],
    }
    if trace:
        detail["alpha_trace"] = alpha_trace
    if record_emissions:
        detail["emissions"] = [sub.emissions for sub in subsystems]
    stats = SolverStats(algorithm="ett", candidates_examined=released,
                        iterations=rounds, wall_time=time.perf_counter() - t0,
                        detail=detail)
    return TopK(entries=buffer.items(), stats=stats)
