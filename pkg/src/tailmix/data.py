"""Observations, samples, partitions and CSV ingestion."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from numbers import Integral
from typing import Iterable, Iterator

import numpy as np
import pandas as pd

from .errors import DataError, EmptyInputError, PartitionError, SchemaError, TuningError


def normalize_label(x) -> str:
    """Map a label to its canonical string form (integers become decimal strings)."""
    if isinstance(x, (bool, np.bool_)):
        return str(x)
    if isinstance(x, Integral):
        return str(int(x))
    return str(x)


def _label_order(labels: Iterable[str]) -> tuple[str, ...]:
    labels = set(labels)
    try:
        return tuple(sorted(labels, key=int))
    except ValueError:
        return tuple(sorted(labels))


def label_set(S) -> frozenset[str]:
    """Normalize a label or collection of labels to a frozenset of strings."""
    if isinstance(S, (str, Integral)):
        return frozenset([normalize_label(S)])
    return frozenset(normalize_label(s) for s in S)


@dataclass(frozen=True)
class Observation:
    y: float
    x: str


@dataclass(frozen=True)
class TuningConstants:
    """Multiplier and exponent of the cut rule ``C * (n ln ln n) ** exponent``."""

    C: float = 0.5
    exponent: float = 0.6

    def __post_init__(self):
        if not (self.C > 0 and np.isfinite(self.C)):
            raise TuningError(f"tuning constant C must be positive, got {self.C}")
        if not 0 < self.exponent < 1:
            raise TuningError(f"exponent must lie in (0, 1), got {self.exponent}")


@dataclass(frozen=True)
class Partition:
    """Disjoint label sets A, B and optionally C."""

    A: frozenset
    B: frozenset
    C: frozenset | None = None

    def __post_init__(self):
        sets = [self.A, self.B] + ([self.C] if self.C is not None else [])
        norm = [label_set(s) for s in sets]
        for name, s in zip("ABC", norm):
            if not s:
                raise PartitionError(f"subset {name} is empty")
        for i in range(len(norm)):
            for j in range(i + 1, len(norm)):
                common = norm[i] & norm[j]
                if common:
                    raise PartitionError(
                        f"subsets {'ABC'[i]} and {'ABC'[j]} overlap on {sorted(common)}")
        object.__setattr__(self, "A", norm[0])
        object.__setattr__(self, "B", norm[1])
        if self.C is not None:
            object.__setattr__(self, "C", norm[2])

    @property
    def sets(self) -> tuple[frozenset, ...]:
        return (self.A, self.B) if self.C is None else (self.A, self.B, self.C)

    def covers(self, labels: Iterable[str]) -> bool:
        return frozenset().union(*self.sets) == frozenset(labels)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"a,b|c|d"`` into a partition; each ``|``-field is a comma list."""
        fields = [f.strip() for f in text.split("|")]
        sets = [frozenset(t.strip() for t in f.split(",") if t.strip()) for f in fields]
        if len(sets) not in (2, 3):
            raise PartitionError(f"expected 2 or 3 '|'-separated sets, got {len(sets)}")
        return cls(*sets)


@dataclass(frozen=True, eq=False)
class Sample:
    """Immutable (Y, X) sample with X coded against a sorted label tuple.

    ``codes[i]`` indexes into ``labels``. Sorted per-subset copies of ``y`` are
    built lazily, once, under a lock.
    """

    y: np.ndarray
    codes: np.ndarray
    labels: tuple[str, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=np.float64)
        codes = np.array(self.codes, dtype=np.intp)
        if y.ndim != 1 or codes.shape != y.shape:
            raise DataError("y and codes must be 1-d arrays of equal length")
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise DataError(f"non-finite outcome at row {bad + 1}", row=bad + 1)
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.labels)):
            raise DataError("label code out of range")
        y.flags.writeable = False
        codes.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", tuple(self.labels))
        counts = np.bincount(codes, minlength=len(self.labels))
        object.__setattr__(self, "_counts", counts)

    @classmethod
    def from_arrays(cls, y, x) -> "Sample":
        """Build a sample from outcomes and raw labels (labels are normalized)."""
        x_norm = [normalize_label(v) for v in x]
        labels = _label_order(x_norm)
        index = {lab: k for k, lab in enumerate(labels)}
        codes = np.fromiter((index[v] for v in x_norm), dtype=np.intp, count=len(x_norm))
        return cls(np.asarray(y, dtype=np.float64), codes, labels)

    @classmethod
    def from_observations(cls, observations: Iterable[Observation]) -> "Sample":
        obs = list(observations)
        return cls.from_arrays([o.y for o in obs], [o.x for o in obs])

    @property
    def n(self) -> int:
        return int(self.y.size)

    @property
    def label_counts(self) -> dict[str, int]:
        return {lab: int(c) for lab, c in zip(self.labels, self._counts) if c > 0}

    @property
    def observations(self) -> Iterator[Observation]:
        for yi, ci in zip(self.y.tolist(), self.codes.tolist()):
            yield Observation(yi, self.labels[ci])

    def __len__(self):
        return self.n

    def validate_subset(self, S) -> frozenset[str]:
        s = label_set(S)
        if not s:
            raise PartitionError("label subset is empty")
        unknown = s.difference(self.labels)
        if unknown:
            raise PartitionError(f"unknown labels {sorted(unknown)}")
        return s

    def subset_size(self, S) -> int:
        s = self.validate_subset(S)
        return int(sum(self._counts[self.labels.index(lab)] for lab in s))

    def _mask(self, s: frozenset[str]) -> np.ndarray:
        wanted = np.zeros(len(self.labels), dtype=bool)
        for lab in s:
            wanted[self.labels.index(lab)] = True
        return wanted[self.codes]

    def sorted_subset(self, S) -> np.ndarray:
        """Ascending outcomes for X in S (read-only, cached)."""
        s = self.validate_subset(S)
        cached = self._cache.get(s)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._cache.get(s)
            if cached is None:
                cached = np.sort(self.y[self._mask(s)], kind="stable")
                cached.flags.writeable = False
                self._cache[s] = cached
        return cached

    def pooled_sorted(self) -> np.ndarray:
        return self.sorted_subset(self.labels)


def subset_view(sample: Sample, S) -> np.ndarray:
    """Outcomes with X in S, in row order."""
    s = sample.validate_subset(S)
    return sample.y[sample._mask(s)]


def ingest_csv(path, y_column: str = "y", x_column: str = "x") -> Sample:
    """Read a comma-delimited UTF-8 file with a header row into a Sample."""
    try:
        frame = pd.read_csv(path, dtype={x_column: str, y_column: str},
                            keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyInputError(f"{path}: no header or data rows") from None
    for col in (y_column, x_column):
        if col not in frame.columns:
            raise SchemaError(f"{path}: missing column {col!r}")
    if len(frame) == 0:
        raise EmptyInputError(f"{path}: no data rows")
    raw_y = frame[y_column]
    y = pd.to_numeric(raw_y.str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(y)
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise DataError(f"{path}: data row {row}: cannot use outcome {raw_y.iloc[row - 1]!r}",
                        row=row)
    x = frame[x_column].str.strip()
    labels = _label_order(x.unique())
    codes = pd.Categorical(x, categories=list(labels)).codes
    return Sample(y, codes.astype(np.intp), labels)
