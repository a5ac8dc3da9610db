"""Contingency tables: named factors with ordered levels over a dense count array.

Cells are stored as an N-dimensional float64 array with one axis per factor,
in C order, so flattening gives lexicographic cell order with the last factor
varying fastest.
"""
import csv
import io
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np


class TableError(ValueError):
    """Malformed table input: bad level label, duplicate cell, negative count."""


@dataclass(frozen=True)
class FactorSpec:
    name: str
    levels: tuple

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise TableError("factor name must be a nonempty string")
        levels = tuple(self.levels)
        if not levels:
            raise TableError(f"factor {self.name!r} needs at least one level")
        if len(set(levels)) != len(levels):
            raise TableError(f"factor {self.name!r} has duplicate level labels")
        object.__setattr__(self, "levels", levels)

    @property
    def size(self) -> int:
        return len(self.levels)

    def index(self, label) -> int:
        try:
            return self.levels.index(label)
        except ValueError:
            raise TableError(f"unknown level {label!r} for factor {self.name!r}") from None


class ContingencyTable:
    """Immutable multi-way table of nonnegative counts.

    Parameters
    ----------
    factors : sequence of FactorSpec
        Factor order defines the array axes.
    counts : array_like
        Either already shaped as ``(L_1, ..., L_k)`` or flat in
        last-factor-fastest order.
    """

    __slots__ = ("_factors", "_counts", "_names")

    def __init__(self, factors: Sequence[FactorSpec], counts):
        factors = tuple(factors)
        names = tuple(f.name for f in factors)
        if len(set(names)) != len(names):
            raise TableError("factor names must be distinct")
        shape = tuple(f.size for f in factors)
        arr = np.array(counts, dtype=np.float64)
        if arr.size != int(np.prod(shape, dtype=np.int64)):
            raise TableError(
                f"count array has {arr.size} entries, expected {int(np.prod(shape))}")
        arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise TableError("counts must be finite")
        if np.any(arr < 0):
            raise TableError("counts must be nonnegative")
        arr.flags.writeable = False
        self._factors = factors
        self._counts = arr
        self._names = names

    @property
    def factors(self) -> tuple:
        return self._factors

    @property
    def names(self) -> tuple:
        return self._names

    @property
    def counts(self) -> np.ndarray:
        """Read-only view of the count array, one axis per factor."""
        return self._counts

    @property
    def shape(self) -> tuple:
        return self._counts.shape

    @property
    def total(self) -> float:
        return float(self._counts.sum())

    def factor(self, name: str) -> FactorSpec:
        return self._factors[self.axis(name)]

    def axis(self, name: str) -> int:
        try:
            return self._names.index(name)
        except ValueError:
            raise TableError(f"unknown factor {name!r}") from None

    def axes(self, names: Iterable[str]) -> tuple:
        return tuple(self.axis(n) for n in names)

    def cell(self, labels: Sequence[Hashable]) -> float:
        """Count stored at the cell named by one level label per factor."""
        labels = tuple(labels)
        if len(labels) != len(self._factors):
            raise TableError(f"expected {len(self._factors)} labels, got {len(labels)}")
        idx = tuple(f.index(lab) for f, lab in zip(self._factors, labels))
        return float(self._counts[idx])

    def marginalize(self, keep: Iterable[str]) -> "ContingencyTable":
        return marginalize(self, keep)

    def with_counts(self, counts) -> "ContingencyTable":
        """Same factors, new counts (e.g. a fitted table)."""
        return ContingencyTable(self._factors, counts)

    def is_integral(self) -> bool:
        return bool(np.all(self._counts == np.round(self._counts)))

    def records(self):
        """Yield ``(labels, count)`` for every cell in storage order."""
        for idx in np.ndindex(*self.shape):
            labels = tuple(f.levels[i] for f, i in zip(self._factors, idx))
            yield labels, float(self._counts[idx])

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self._factors == other._factors and np.array_equal(self._counts, other._counts)

    __hash__ = None

    def __repr__(self):
        dims = "x".join(str(s) for s in self.shape) or "scalar"
        return f"ContingencyTable({list(self._names)}, {dims}, N={self.total:g})"


def from_records(factors: Sequence[FactorSpec], records) -> ContingencyTable:
    """Build a table from ``(labels, count)`` pairs; unlisted cells are zero."""
    factors = tuple(factors)
    counts = np.zeros(tuple(f.size for f in factors), dtype=np.float64)
    seen = set()
    for labels, count in records:
        labels = tuple(labels)
        if len(labels) != len(factors):
            raise TableError(f"record {labels!r} does not name one level per factor")
        idx = tuple(f.index(lab) for f, lab in zip(factors, labels))
        if idx in seen:
            raise TableError(f"duplicate cell {labels!r}")
        seen.add(idx)
        count = float(count)
        if not count >= 0:
            raise TableError(f"negative or invalid count {count!r} for cell {labels!r}")
        counts[idx] = count
    return ContingencyTable(factors, counts)


def marginalize(t: ContingencyTable, keep: Iterable[str]) -> ContingencyTable:
    """Sum out every factor not in ``keep``; kept factors retain table order."""
    keep = set(keep)
    unknown = keep.difference(t.names)
    if unknown:
        raise TableError(f"unknown factor(s): {sorted(unknown)}")
    drop = tuple(i for i, n in enumerate(t.names) if n not in keep)
    kept = tuple(f for f in t.factors if f.name in keep)
    return ContingencyTable(kept, t.counts.sum(axis=drop))


def read_csv(source) -> ContingencyTable:
    """Read a table in long CSV format (factor columns, then ``count``).

    Level order per factor is order of first appearance. ``source`` is a path
    or an open text stream.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return _read_csv_stream(fh)
    return _read_csv_stream(source)


def _read_csv_stream(fh) -> ContingencyTable:
    reader = csv.reader(fh)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise TableError("empty CSV input") from None
    if len(header) < 2 or header[-1] != "count":
        raise TableError("CSV header must list factor columns followed by 'count'")
    names = header[:-1]
    levels = [[] for _ in names]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise TableError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        labels = tuple(c.strip() for c in row[:-1])
        try:
            count = float(row[-1])
        except ValueError:
            raise TableError(f"line {lineno}: count {row[-1]!r} is not a number") from None
        for lv, lab in zip(levels, labels):
            if lab not in lv:
                lv.append(lab)
        rows.append((labels, count))
    factors = [FactorSpec(n, tuple(lv)) for n, lv in zip(names, levels)]
    if not rows:
        raise TableError("CSV contains no data rows")
    return from_records(factors, rows)


def to_csv(t: ContingencyTable, integral: bool | None = None) -> str:
    """Serialize to long CSV. Integral tables are written with integer counts."""
    if integral is None:
        integral = t.is_integral()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(t.names) + ["count"])
    for labels, count in t.records():
        writer.writerow(list(labels) + [str(int(count)) if integral else repr(count)])
    return buf.getvalue()


def write_csv(t: ContingencyTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(to_csv(t))
