"""Binary product/tag datasets: CSV I/O, slicing, synthetic generation.

CSV layout: one `id` column, attribute columns prefixed `a:`, tag
columns prefixed `t:`, every cell 0 or 1.  Attribute and tag order is
the column order of the file.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

ATTR_PREFIX = "a:"
TAG_PREFIX = "t:"

# Activation probabilities of the four contiguous attribute blocks used
# by the synthetic generator.
DEFAULT_GROUP_PROBS = (0.75, 0.15, 0.10, 0.05)
DEFAULT_RELATION_SIZE_RANGE = (2, 5)


class DatasetError(ValueError):
    """Malformed dataset input (bad header, bad cell, bad shape)."""


@dataclass(frozen=True)
class ProductRow:
    """One catalog row: its id and binary attribute/tag vectors."""

    row_id: str
    attributes: tuple[int, ...]
    tags: tuple[int, ...]


@dataclass
class Dataset:
    """n products over m binary attributes and r binary tags.

    `attrs` is an (n, m) uint8 matrix, `tags` an (n, r) uint8 matrix.
    Names keep the CSV column order.
    """

    attribute_names: list[str]
    tag_names: list[str]
    attrs: np.ndarray
    tags: np.ndarray
    row_ids: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.attrs = np.ascontiguousarray(self.attrs, dtype=np.uint8)
        self.tags = np.ascontiguousarray(self.tags, dtype=np.uint8)
        if not self.row_ids:
            self.row_ids = [str(i + 1) for i in range(self.attrs.shape[0])]
        self.validate()

    @property
    def n(self) -> int:
        return self.attrs.shape[0]

    @property
    def m(self) -> int:
        return self.attrs.shape[1]

    @property
    def r(self) -> int:
        return self.tags.shape[1]

    def validate(self) -> None:
        if self.attrs.ndim != 2 or self.tags.ndim != 2:
            raise DatasetError("attrs and tags must be 2-d matrices")
        n, m = self.attrs.shape
        n2, r = self.tags.shape
        if n != n2:
            raise DatasetError(f"attrs has {n} rows but tags has {n2}")
        if n < 1 or m < 1 or r < 1:
            raise DatasetError(f"need n,m,r >= 1, got n={n} m={m} r={r}")
        if len(self.attribute_names) != m:
            raise DatasetError("attribute_names length does not match attrs")
        if len(self.tag_names) != r:
            raise DatasetError("tag_names length does not match tags")
        if len(self.row_ids) != n:
            raise DatasetError("row_ids length does not match attrs")
        names = self.attribute_names + self.tag_names
        if len(set(names)) != len(names):
            raise DatasetError("duplicate attribute/tag names")
        for mat, what in ((self.attrs, "attribute"), (self.tags, "tag")):
            bad = np.argwhere(mat > 1)
            if bad.size:
                i, j = bad[0]
                raise DatasetError(f"{what} cell at row {i + 1}, column {j + 1} is not 0/1")

    def row(self, i: int) -> ProductRow:
        return ProductRow(
            row_id=self.row_ids[i],
            attributes=tuple(int(v) for v in self.attrs[i]),
            tags=tuple(int(v) for v in self.tags[i]),
        )

    def tag_index(self, name: str) -> int:
        try:
            return self.tag_names.index(name)
        except ValueError:
            raise DatasetError(f"unknown tag {name!r}") from None


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the correlated synthetic generator."""

    n: int
    m: int
    r: int
    seed: int
    group_probs: tuple[float, ...] = DEFAULT_GROUP_PROBS
    relation_size_range: tuple[int, int] = DEFAULT_RELATION_SIZE_RANGE

    def validate(self) -> None:
        if self.n < 1 or self.m < 1 or self.r < 1:
            raise DatasetError("n, m, r must all be >= 1")
        if not (0 <= self.seed < 2**64):
            raise DatasetError("seed must fit in 64 bits")
        lo, hi = self.relation_size_range
        if not (1 <= lo <= hi):
            raise DatasetError(f"bad relation_size_range {self.relation_size_range}")
        if any(not (0.0 < p < 1.0) for p in self.group_probs):
            raise DatasetError("group probabilities must lie strictly in (0,1)")


def load_csv(path_or_file) -> Dataset:
    """Parse a dataset CSV; raises DatasetError with row/column positions."""
    if hasattr(path_or_file, "read"):
        return _parse(path_or_file)
    with open(path_or_file, newline="") as fh:
        return _parse(fh)


def loads_csv(text: str) -> Dataset:
    return _parse(io.StringIO(text))


def _parse(fh) -> Dataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("empty file") from None
    header = [h.strip() for h in header]
    if not header or header[0] != "id":
        raise DatasetError("first header column must be 'id'")
    attr_cols: list[tuple[int, str]] = []
    tag_cols: list[tuple[int, str]] = []
    for j, name in enumerate(header[1:], start=2):
        if name.startswith(ATTR_PREFIX):
            attr_cols.append((j, name[len(ATTR_PREFIX):]))
        elif name.startswith(TAG_PREFIX):
            tag_cols.append((j, name[len(TAG_PREFIX):]))
        else:
            raise DatasetError(f"column {j}: name {name!r} lacks '{ATTR_PREFIX}'/'{TAG_PREFIX}' prefix")
    if not attr_cols or not tag_cols:
        raise DatasetError("need at least one attribute column and one tag column")
    # Tag columns must follow attribute columns so column order defines index order.
    if attr_cols and tag_cols and max(j for j, _ in attr_cols) > min(j for j, _ in tag_cols):
        raise DatasetError("attribute columns must precede tag columns")

    row_ids: list[str] = []
    attrs: list[list[int]] = []
    tags: list[list[int]] = []
    width = len(header)
    for i, row in enumerate(reader, start=2):
        if len(row) != width:
            raise DatasetError(f"row {i}: expected {width} cells, got {len(row)}")
        row_ids.append(row[0].strip())
        a_vals, t_vals = [], []
        for j, cell in enumerate(row[1:], start=2):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise DatasetError(f"row {i}, column {j}: cell {cell!r} is not 0 or 1")
            (a_vals if j <= attr_cols[-1][0] else t_vals).append(int(cell))
        attrs.append(a_vals)
        tags.append(t_vals)
    if not attrs:
        raise DatasetError("no data rows")
    if len(set(row_ids)) != len(row_ids):
        raise DatasetError("duplicate row ids")
    return Dataset(
        attribute_names=[n for _, n in attr_cols],
        tag_names=[n for _, n in tag_cols],
        attrs=np.array(attrs, dtype=np.uint8),
        tags=np.array(tags, dtype=np.uint8),
        row_ids=row_ids,
    )


def save_csv(ds: Dataset, path_or_file) -> None:
    """Write the canonical CSV form (load_csv round-trips it)."""
    if hasattr(path_or_file, "write"):
        _write(ds, path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(ds, fh)


def _write(ds: Dataset, fh) -> None:
    w = csv.writer(fh)
    w.writerow(["id"] + [ATTR_PREFIX + n for n in ds.attribute_names]
               + [TAG_PREFIX + n for n in ds.tag_names])
    for i in range(ds.n):
        w.writerow([ds.row_ids[i]] + list(map(int, ds.attrs[i])) + list(map(int, ds.tags[i])))


def slice_dataset(ds: Dataset, n: int | None = None, m: int | None = None,
                  r: int | None = None) -> Dataset:
    """Leading submatrix view: first n rows, m attributes, r tags."""
    n = ds.n if n is None else n
    m = ds.m if m is None else m
    r = ds.r if r is None else r
    if not (1 <= n <= ds.n and 1 <= m <= ds.m and 1 <= r <= ds.r):
        raise DatasetError(
            f"slice ({n},{m},{r}) out of range for dataset ({ds.n},{ds.m},{ds.r})")
    return Dataset(
        attribute_names=ds.attribute_names[:m],
        tag_names=ds.tag_names[:r],
        attrs=ds.attrs[:n, :m].copy(),
        tags=ds.tags[:n, :r].copy(),
        row_ids=ds.row_ids[:n],
    )


def attribute_blocks(m: int, k: int) -> list[list[int]]:
    """Split attributes 0..m-1 into k contiguous near-equal blocks.

    The first (m mod k) blocks get the extra attribute, so block sizes
    differ by at most one.
    """
    if k < 1:
        raise DatasetError("need at least one block")
    k = min(k, m)
    base, extra = divmod(m, k)
    blocks, start = [], 0
    for b in range(k):
        size = base + (1 if b < extra else 0)
        blocks.append(list(range(start, start + size)))
        start += size
    return blocks


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Correlated synthetic catalog.

    Attributes fall into four contiguous blocks with activation
    probabilities spec.group_probs.  Each tag draws a random attribute
    relation; a row's tag bit is 1 with probability f (the fraction of
    related attributes set) when f > 1/2, else it is 0.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    probs = np.empty(spec.m, dtype=np.float64)
    for block, p in zip(attribute_blocks(spec.m, len(spec.group_probs)), spec.group_probs):
        probs[block] = p
    attrs = (rng.random((spec.n, spec.m)) < probs).astype(np.uint8)

    lo, hi = spec.relation_size_range
    lo, hi = min(lo, spec.m), min(hi, spec.m)
    tags = np.zeros((spec.n, spec.r), dtype=np.uint8)
    for j in range(spec.r):
        size = int(rng.integers(lo, hi + 1))
        relation = rng.choice(spec.m, size=size, replace=False)
        f = attrs[:, relation].mean(axis=1)
        draws = rng.random(spec.n)
        tags[:, j] = ((f > 0.5) & (draws < f)).astype(np.uint8)

    return Dataset(
        attribute_names=[f"A{i + 1}" for i in range(spec.m)],
        tag_names=[f"T{j + 1}" for j in range(spec.r)],
        attrs=attrs,
        tags=tags,
    )
