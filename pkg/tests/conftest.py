"""Shared fixtures: the 8-row demo catalog and exact-arithmetic oracles.

The demo catalog is small enough to verify every smoothed probability
by hand; RationalNBC re-derives all of them with Fraction arithmetic so
tests never assert a float the suite did not compute independently.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from tagmax import (
    DESIRABLE,
    Dataset,
    Model,
    Query,
    SmoothingSpec,
    TagSelection,
    exact_score,
    train,
)

# Pinned calibration used by every fixture and by the acceptance suite.
CALIBRATED_SMOOTHING = SmoothingSpec(m_weight=1.0, prior_mode="uniform")

# (attr bits, tag bits) per row; attribute 0 is the leftmost bit.
DEMO_ROWS = [
    ("0001", "00"),
    ("0100", "01"),
    ("0101", "00"),
    ("0111", "11"),
    ("1000", "10"),
    ("1001", "01"),
    ("1011", "11"),
    ("1101", "01"),
]


def _bits(text: str) -> list[int]:
    return [int(c) for c in text]


def make_demo_dataset() -> Dataset:
    return Dataset(
        attribute_names=[f"A{i}" for i in range(1, 5)],
        tag_names=["T1", "T2"],
        attrs=np.array([_bits(a) for a, _ in DEMO_ROWS], dtype=np.uint8),
        tags=np.array([_bits(t) for _, t in DEMO_ROWS], dtype=np.uint8),
    )


@pytest.fixture(scope="session")
def demo_dataset() -> Dataset:
    return make_demo_dataset()


@pytest.fixture(scope="session")
def demo_model(demo_dataset) -> Model:
    return train(demo_dataset, CALIBRATED_SMOOTHING)


@pytest.fixture(scope="session")
def demo_query() -> Query:
    return Query(selections=(TagSelection(tag=0), TagSelection(tag=1)), k=1)


class RationalNBC:
    """Exact m-estimate tables over a Dataset, all values Fractions.

    Mirrors the training math without floats so the float pipeline can
    be checked against it.  prior_mode "uniform" only; that is the
    calibration every fixture pins.
    """

    def __init__(self, ds: Dataset, m_weight: Fraction = Fraction(1)):
        self.m = ds.m
        self.r = ds.r
        self.w = Fraction(m_weight)
        n = ds.n
        half = Fraction(1, 2)
        self.prior = []  # (present, absent) per tag
        self.cond = []   # [tag][attr][value] -> (present, absent)
        for j in range(ds.r):
            present_rows = ds.tags[:, j] == 1
            c = int(present_rows.sum())
            self.prior.append((
                Fraction(c) + self.w * half,
                Fraction(n - c) + self.w * half,
            ))
            # shared denominators n + w, c + w, (n - c) + w
            self._n = Fraction(n) + self.w
            dp = Fraction(c) + self.w
            da = Fraction(n - c) + self.w
            rows = []
            for i in range(ds.m):
                ap = int(ds.attrs[present_rows, i].sum())
                aa = int(ds.attrs[~present_rows, i].sum())
                rows.append([
                    ((Fraction(c - ap) + self.w * half) / dp,
                     (Fraction(n - c - aa) + self.w * half) / da),
                    ((Fraction(ap) + self.w * half) / dp,
                     (Fraction(aa) + self.w * half) / da),
                ])
            self.cond.append(rows)

    def prior_ratio(self, j: int) -> Fraction:
        p, a = self.prior[j]
        return a / p  # the n+w denominators cancel

    def ratio(self, j: int, i: int, v: int) -> Fraction:
        p, a = self.cond[j][i][v]
        return a / p

    def r_value(self, j: int, bits: int) -> Fraction:
        acc = self.prior_ratio(j)
        for i in range(self.m):
            acc *= self.ratio(j, i, (bits >> (self.m - 1 - i)) & 1)
        return acc

    def tag_score(self, j: int, bits: int) -> Fraction:
        return 1 / (1 + self.r_value(j, bits))

    def exact_score(self, selections, bits: int) -> Fraction:
        total = Fraction(0)
        for sel in selections:
            s = self.tag_score(sel.tag, bits)
            if sel.polarity != DESIRABLE:
                s = 1 - s
            total += Fraction(sel.weight) * s
        return total

    def ranking(self, selections) -> list[tuple[Fraction, int]]:
        """All 2^m configurations, best score first, ties lex-ascending."""
        scored = [(self.exact_score(selections, b), b) for b in range(1 << self.m)]
        scored.sort(key=lambda t: (-t[0], t[1]))
        return scored


def scalar_ranking(model: Model, query: Query) -> list[tuple[float, int]]:
    """Exhaustive ranking through the scalar scoring path (no kernels)."""
    scored = [(exact_score(model, query, b), b) for b in range(1 << model.m)]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return scored


@pytest.fixture(scope="session")
def demo_rational(demo_dataset) -> RationalNBC:
    return RationalNBC(demo_dataset)


# -- acceptance reporting ------------------------------------------------

ACCEPT_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    """One pass/fail line per acceptance gate, echoed in the summary."""
    line = f"[ACCEPT] {name}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    ACCEPT_LINES.append(line)
    print(line, flush=True)
    assert passed, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPT_LINES:
            terminalreporter.write_line(line)
