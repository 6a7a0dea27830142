"""Per-tag smoothed Naive Bayes scoring of product configurations.

Training fits, for every tag, the m-estimate-smoothed probability
tables of each binary attribute conditioned on the tag's presence and
absence.  A configuration o is scored per tag by the posterior odds

    R_j(o) = (Pr(not T_j)/Pr(T_j)) * prod_i Pr(a_i=o_i|not T_j)/Pr(a_i=o_i|T_j)

and tag_score = 1/(1+R_j), the NBC probability that the configuration
would carry the tag.  exact_score sums weighted per-tag scores, with
undesirable tags contributing their complement.

All log-odds factors are quantized once at train time to int64 fixed
point (steps of 2**-40) and scores are sums of those integers pushed
through the logistic at the boundary.  Integer sums are order
independent, so incremental rescoring used by the solvers is exactly
equal to full rescoring, not merely close.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset

# Fixed-point scale for quantized log-odds terms.  2**-40 ~ 9.1e-13 per
# term, two orders of magnitude inside every tolerance gate in the tests.
FP_SCALE = 1 << 40

# Open-interval clamps: scores must stay strictly inside (0,1) even when
# the logistic saturates in float64.
_TINY = 5e-324
_ONE_MINUS = math.nextafter(1.0, 0.0)

DESIRABLE = "desirable"
UNDESIRABLE = "undesirable"

MODEL_FORMAT = "tagmax-model"
MODEL_VERSION = 1


class ModelError(ValueError):
    """Bad smoothing parameters, malformed model files, bad queries."""


@dataclass(frozen=True)
class SmoothingSpec:
    """m-estimate smoothing: p = (count + m_weight*p0) / (total + m_weight).

    prior_mode picks p0 for the attribute conditionals: "uniform" uses
    1/2, "class-prior" uses the attribute's unsmoothed dataset marginal.
    The tag prior itself always smooths toward 1/2.
    """

    m_weight: float = 1.0
    prior_mode: str = "uniform"

    def validate(self) -> None:
        if not (self.m_weight > 0.0) or not math.isfinite(self.m_weight):
            raise ModelError(f"m_weight must be positive, got {self.m_weight}")
        if self.prior_mode not in ("uniform", "class-prior"):
            raise ModelError(f"unknown prior_mode {self.prior_mode!r}")


@dataclass
class TagModel:
    """Fitted tables for one tag.

    cond_present[i][v] = Pr(a_i = v | tag present), smoothed; likewise
    cond_absent.  ratio[i][v] = cond_absent[i][v] / cond_present[i][v]
    is the per-attribute odds factor of R_j.
    """

    name: str
    n: int
    count_present: int
    attr_present_counts: list[int]
    attr_absent_counts: list[int]
    prior_present: float
    prior_absent: float
    cond_present: list[list[float]]
    cond_absent: list[list[float]]
    ratio: list[list[float]] = field(init=False)

    def __post_init__(self) -> None:
        self.ratio = [
            [self.cond_absent[i][v] / self.cond_present[i][v] for v in (0, 1)]
            for i in range(len(self.cond_present))
        ]

    @property
    def prevalence(self) -> float:
        """Unsmoothed Pr(tag present)."""
        return self.count_present / self.n


@dataclass(frozen=True)
class TagSelection:
    tag: int
    weight: float = 1.0
    polarity: str = DESIRABLE


@dataclass(frozen=True)
class Query:
    """Which tags to optimize, their weights/polarities, and k."""

    selections: tuple[TagSelection, ...]
    k: int = 1

    def validate(self, model: "Model") -> None:
        if self.k < 1:
            raise ModelError(f"k must be >= 1, got {self.k}")
        if not self.selections:
            raise ModelError("query selects no tags")
        seen = set()
        for sel in self.selections:
            if not (0 <= sel.tag < model.r):
                raise ModelError(f"tag index {sel.tag} out of range (r={model.r})")
            if sel.tag in seen:
                raise ModelError(f"tag index {sel.tag} selected twice")
            seen.add(sel.tag)
            if not (sel.weight >= 0.0) or not math.isfinite(sel.weight):
                raise ModelError(f"weight for tag {sel.tag} must be >= 0")
            if sel.polarity not in (DESIRABLE, UNDESIRABLE):
                raise ModelError(f"unknown polarity {sel.polarity!r}")

    @property
    def z(self) -> int:
        return len(self.selections)


class Model:
    """Trained per-tag NBC tables plus quantized scoring arrays."""

    def __init__(self, attribute_names: list[str], tag_names: list[str],
                 smoothing: SmoothingSpec, tag_models: list[TagModel], n: int):
        self.attribute_names = attribute_names
        self.tag_names = tag_names
        self.smoothing = smoothing
        self.tag_models = tag_models
        self.n = n
        self._build_fp()

    @property
    def m(self) -> int:
        return len(self.attribute_names)

    @property
    def r(self) -> int:
        return len(self.tag_names)

    def _build_fp(self) -> None:
        m, r = self.m, self.r
        self.fp_log_ratio = np.empty((r, m, 2), dtype=np.int64)
        self.fp_log_prior = np.empty(r, dtype=np.int64)
        for j, tm in enumerate(self.tag_models):
            self.fp_log_prior[j] = _quantize(math.log(tm.prior_absent / tm.prior_present))
            for i in range(m):
                for v in (0, 1):
                    self.fp_log_ratio[j, i, v] = _quantize(math.log(tm.ratio[i][v]))
        # Kernel form: state(o) = base[j] + sum over set bits of step[j,i].
        self.fp_base = self.fp_log_prior + self.fp_log_ratio[:, :, 0].sum(axis=1)
        self.fp_step = self.fp_log_ratio[:, :, 1] - self.fp_log_ratio[:, :, 0]

    def tag_index(self, name: str) -> int:
        try:
            return self.tag_names.index(name)
        except ValueError:
            raise ModelError(f"unknown tag {name!r}") from None

    def fp_state(self, j: int, bits: int) -> int:
        """Quantized log R_j of configuration `bits` (int, MSB = attribute 0)."""
        m = self.m
        lr = self.fp_log_ratio
        x = int(self.fp_log_prior[j])
        for i in range(m):
            x += int(lr[j, i, (bits >> (m - 1 - i)) & 1])
        return x

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "n": self.n,
            "smoothing": {"m_weight": self.smoothing.m_weight,
                          "prior_mode": self.smoothing.prior_mode},
            "attribute_names": self.attribute_names,
            "tag_names": self.tag_names,
            "tags": [
                {
                    "name": tm.name,
                    "count_present": tm.count_present,
                    "attr_present_counts": tm.attr_present_counts,
                    "attr_absent_counts": tm.attr_absent_counts,
                    "prior_present": tm.prior_present,
                    "prior_absent": tm.prior_absent,
                    "cond_present": tm.cond_present,
                    "cond_absent": tm.cond_absent,
                }
                for tm in self.tag_models
            ],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
            raise ModelError("not a tagmax model document")
        if doc.get("version") != MODEL_VERSION:
            raise ModelError(f"unsupported model version {doc.get('version')!r}")
        smoothing = SmoothingSpec(**doc["smoothing"])
        smoothing.validate()
        n = int(doc["n"])
        tag_models = []
        for entry in doc["tags"]:
            # Rebuild through the fitting path and cross-check the stored
            # tables; catches hand-edited or truncated files.
            tm = _fit_tag(
                name=entry["name"], n=n,
                count_present=int(entry["count_present"]),
                attr_present_counts=[int(c) for c in entry["attr_present_counts"]],
                attr_absent_counts=[int(c) for c in entry["attr_absent_counts"]],
                attr_marginal_counts=None,
                smoothing=smoothing,
                stored=entry,
            )
            tag_models.append(tm)
        model = cls(list(doc["attribute_names"]), list(doc["tag_names"]),
                    smoothing, tag_models, n)
        if any(len(tm.cond_present) != model.m for tm in tag_models):
            raise ModelError("attribute table width does not match attribute_names")
        return model


def _quantize(log_value: float) -> int:
    return int(round(log_value * FP_SCALE))


def logistic_from_fp(fp_state: int) -> float:
    """Canonical score 1/(1+exp(x)) for quantized x, clamped into (0,1)."""
    x = fp_state / FP_SCALE  # exact: power-of-two divisor
    if x <= 0.0:
        s = 1.0 / (1.0 + math.exp(x))
    else:
        e = math.exp(-x)
        s = e / (1.0 + e)
    if s <= 0.0:
        return _TINY
    if s >= 1.0:
        return _ONE_MINUS
    return s


def logistic_from_fp_array(fp_states: np.ndarray) -> np.ndarray:
    """Vectorized twin of logistic_from_fp (numpy exp; ulp-level agreement)."""
    x = fp_states.astype(np.float64) / float(FP_SCALE)
    out = np.empty_like(x)
    neg = x <= 0.0
    with np.errstate(over="ignore"):
        out[neg] = 1.0 / (1.0 + np.exp(x[neg]))
        e = np.exp(-x[~neg])
    out[~neg] = e / (1.0 + e)
    np.clip(out, _TINY, _ONE_MINUS, out=out)
    return out


def _smoothed(count: int, total: int, w: float, p0: float) -> float:
    return (count + w * p0) / (total + w)


def _fit_tag(name: str, n: int, count_present: int,
             attr_present_counts: list[int], attr_absent_counts: list[int],
             attr_marginal_counts: list[int] | None, smoothing: SmoothingSpec,
             stored: dict | None = None) -> TagModel:
    w = smoothing.m_weight
    count_absent = n - count_present
    prior_present = _smoothed(count_present, n, w, 0.5)
    prior_absent = _smoothed(count_absent, n, w, 0.5)
    m = len(attr_present_counts)
    if attr_marginal_counts is None:
        attr_marginal_counts = [attr_present_counts[i] + attr_absent_counts[i]
                                for i in range(m)]
    cond_present, cond_absent = [], []
    for i in range(m):
        if smoothing.prior_mode == "uniform":
            p0 = 0.5
        else:
            p0 = attr_marginal_counts[i] / n
        cp1 = _smoothed(attr_present_counts[i], count_present, w, p0)
        cp0 = _smoothed(count_present - attr_present_counts[i], count_present, w, 1.0 - p0)
        ca1 = _smoothed(attr_absent_counts[i], count_absent, w, p0)
        ca0 = _smoothed(count_absent - attr_absent_counts[i], count_absent, w, 1.0 - p0)
        cond_present.append([cp0, cp1])
        cond_absent.append([ca0, ca1])
    tm = TagModel(name=name, n=n, count_present=count_present,
                  attr_present_counts=attr_present_counts,
                  attr_absent_counts=attr_absent_counts,
                  prior_present=prior_present, prior_absent=prior_absent,
                  cond_present=cond_present, cond_absent=cond_absent)
    if stored is not None:
        for key in ("prior_present", "prior_absent", "cond_present", "cond_absent"):
            if not _tables_equal(getattr(tm, key), stored[key]):
                raise ModelError(
                    f"model file tables for tag {name!r} do not match its counts "
                    f"(field {key}); file corrupted or hand-edited")
    _check_tables(tm)
    return tm


def _tables_equal(a, b, tol: float = 1e-12) -> bool:
    fa = np.asarray(a, dtype=np.float64).ravel()
    fb = np.asarray(b, dtype=np.float64).ravel()
    return fa.shape == fb.shape and bool(np.all(np.abs(fa - fb) <= tol))


def _check_tables(tm: TagModel) -> None:
    probs = [tm.prior_present, tm.prior_absent]
    for row in tm.cond_present + tm.cond_absent:
        probs.extend(row)
    for p in probs:
        if not (0.0 < p < 1.0):
            raise ModelError(f"tag {tm.name!r}: probability {p} not strictly in (0,1)")
    for i, (row_p, row_a) in enumerate(zip(tm.cond_present, tm.cond_absent)):
        if abs(row_p[0] + row_p[1] - 1.0) > 1e-12 or abs(row_a[0] + row_a[1] - 1.0) > 1e-12:
            raise ModelError(f"tag {tm.name!r}: attribute {i} conditionals do not sum to 1")


def train(ds: Dataset, smoothing: SmoothingSpec | None = None) -> Model:
    """Fit per-tag NBC tables on a dataset."""
    smoothing = smoothing or SmoothingSpec()
    smoothing.validate()
    marginals = [int(c) for c in ds.attrs.sum(axis=0)]
    tag_models = []
    for j, name in enumerate(ds.tag_names):
        present = ds.tags[:, j] == 1
        count_present = int(present.sum())
        ap = [int(c) for c in ds.attrs[present].sum(axis=0)]
        aa = [marginals[i] - ap[i] for i in range(ds.m)]
        tag_models.append(_fit_tag(name, ds.n, count_present, ap, aa,
                                   marginals, smoothing))
    return Model(list(ds.attribute_names), list(ds.tag_names), smoothing,
                 tag_models, ds.n)


def tag_score(model: Model, j: int, bits: int) -> float:
    """NBC probability that configuration `bits` carries tag j."""
    return logistic_from_fp(model.fp_state(j, bits))


def oriented_tag_score(model: Model, sel: TagSelection, bits: int) -> float:
    s = tag_score(model, sel.tag, bits)
    return s if sel.polarity == DESIRABLE else 1.0 - s


def exact_score(model: Model, query: Query, bits: int) -> float:
    """Weighted sum of per-tag scores, undesirable tags complemented."""
    total = 0.0
    for sel in query.selections:
        total += sel.weight * oriented_tag_score(model, sel, bits)
    return total


def per_tag_breakdown(model: Model, query: Query, bits: int) -> tuple[list[float], list[float]]:
    """(raw tag scores, weighted oriented contributions) in query order."""
    raw, contrib = [], []
    for sel in query.selections:
        s = tag_score(model, sel.tag, bits)
        raw.append(s)
        contrib.append(sel.weight * (s if sel.polarity == DESIRABLE else 1.0 - s))
    return raw, contrib


def score_bounds(model: Model, query: Query) -> tuple[float, float]:
    """Open-interval bounds of exact_score: (0, sum of weights)."""
    return 0.0, sum(sel.weight for sel in query.selections)


def query_arrays(model: Model, selections: tuple[TagSelection, ...]):
    """Kernel-ready (fp_base, fp_step, weights, desirable) rows for a tag selection."""
    tags = [sel.tag for sel in selections]
    base = model.fp_base[tags].copy()
    step = model.fp_step[tags].copy()
    weights = np.array([sel.weight for sel in selections], dtype=np.float64)
    desirable = np.array([sel.polarity == DESIRABLE for sel in selections], dtype=np.uint8)
    return base, step, weights, desirable
