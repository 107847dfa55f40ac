"""Dataset ingestion and synthesis.

Parses libsvm-format text (the a9a distribution format) into dense matrices,
generates seeded synthetic datasets, and splits rows into train/test.  Dense
storage is deliberate: a9a dense is ~32 MB at 64-bit, fine at desk scale, and
it keeps every gradient kernel free of sparse-matrix branching.

Only local files are read here; downloading lives in the CLI.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ParseError
from .shuffle import rng_for

_TOKEN = re.compile(r"\S+")
_LABELS = {"+1": 1.0, "1": 1.0, "-1": -1.0, "0": -1.0}

# stream ids far above any epoch index, so dataset draws never collide with a
# run's per-epoch permutation streams under the same seed
_STREAM_SUBSAMPLE = 1 << 40
_STREAM_SPLIT = (1 << 40) + 1
_STREAM_SYNTH = (1 << 40) + 2
_STREAM_GAUSS = (1 << 40) + 3


@dataclass
class DatasetMatrix:
    """Dense features with {-1,+1} labels and an optional train/test split."""

    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) float64 in {-1.0, +1.0}
    train_idx: np.ndarray | None = None
    test_idx: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.features.ndim != 2:
            raise InvalidArgument("features must be a 2-d array")
        if self.labels.shape != (self.features.shape[0],):
            raise InvalidArgument("labels length must match the number of rows")
        if not np.all(np.isfinite(self.features)):
            raise InvalidArgument("features contain NaN/Inf")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise InvalidArgument("labels must take values in {-1, +1}")
        if (self.train_idx is None) != (self.test_idx is None):
            raise InvalidArgument("train_idx and test_idx must be given together")
        if self.train_idx is not None:
            both = np.concatenate([self.train_idx, self.test_idx])
            seen = np.zeros(self.n, dtype=bool)
            if both.size != self.n or both.min() < 0 or both.max() >= self.n:
                raise InvalidArgument("split indices must partition [0, n)")
            seen[both] = True
            if not seen.all() or np.unique(both).size != self.n:
                raise InvalidArgument("split indices must partition [0, n)")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def labels01(self) -> np.ndarray:
        """{0,1} view of the labels, for logistic cross-entropy targets."""
        return (self.labels > 0).astype(np.float64)

    def rows(self, idx) -> "DatasetMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return DatasetMatrix(self.features[idx].copy(), self.labels[idx].copy())

    @property
    def train(self) -> "DatasetMatrix":
        if self.train_idx is None:
            raise InvalidArgument("dataset has no split")
        return self.rows(self.train_idx)

    @property
    def test(self) -> "DatasetMatrix":
        if self.test_idx is None:
            raise InvalidArgument("dataset has no split")
        return self.rows(self.test_idx)


def parse_libsvm(source, expected_dim: int | None = None) -> DatasetMatrix:
    """Parse libsvm text: per line "label idx:val idx:val ..." with 1-based,
    strictly increasing indices.

    Labels +1/1 map to +1, -1/0 map to -1.  Missing indices are zero-filled;
    the dimension is the largest index seen, or expected_dim if larger.  Any
    malformed token raises ParseError with its line and column.  Blank lines
    are skipped.
    """
    if isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
    elif isinstance(source, bytes):
        raw = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        raw = source.read()
    else:
        raise InvalidArgument(f"cannot read libsvm data from {type(source)!r}")
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = raw[: exc.start].count(b"\n") + 1
            raise ParseError("input is not valid UTF-8", line=line) from None
    else:
        text = raw

    labels: list[float] = []
    entries: list[list[tuple[int, float]]] = []
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        tokens = list(_TOKEN.finditer(line))
        label_tok = tokens[0]
        label = _LABELS.get(label_tok.group())
        if label is None:
            raise ParseError(
                f"label must be one of +1, 1, -1, 0, got {label_tok.group()!r}",
                line=lineno,
                column=label_tok.start() + 1,
            )
        row: list[tuple[int, float]] = []
        prev_index = 0
        for tok in tokens[1:]:
            col = tok.start() + 1
            pair = tok.group().split(":")
            if len(pair) != 2:
                raise ParseError(f"expected idx:val, got {tok.group()!r}", line=lineno, column=col)
            try:
                index = int(pair[0])
            except ValueError:
                raise ParseError(f"feature index {pair[0]!r} is not an integer", line=lineno, column=col) from None
            if index < 1:
                raise ParseError(f"feature index must be >= 1, got {index}", line=lineno, column=col)
            if index <= prev_index:
                raise ParseError(
                    f"feature indices must be strictly increasing, got {index} after {prev_index}",
                    line=lineno,
                    column=col,
                )
            try:
                value = float(pair[1])
            except ValueError:
                raise ParseError(f"feature value {pair[1]!r} is not a number", line=lineno, column=col) from None
            if not np.isfinite(value):
                raise ParseError(f"feature value {pair[1]!r} is not finite", line=lineno, column=col)
            prev_index = index
            row.append((index, value))
        max_index = max(max_index, prev_index)
        labels.append(label)
        entries.append(row)

    dim = max(max_index, expected_dim or 0)
    features = np.zeros((len(labels), dim))
    for r, row in enumerate(entries):
        for index, value in row:
            features[r, index - 1] = value
    return DatasetMatrix(features, np.asarray(labels))


def dump_libsvm(dataset: DatasetMatrix, path) -> None:
    """Write libsvm text that parse_libsvm round-trips to an identical matrix."""
    lines = []
    for r in range(dataset.n):
        parts = ["+1" if dataset.labels[r] > 0 else "-1"]
        row = dataset.features[r]
        for j in np.nonzero(row)[0]:
            parts.append(f"{j + 1}:{float(row[j])!r}")
        lines.append(" ".join(parts))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def subsample(dataset: DatasetMatrix, m: int, seed: int) -> DatasetMatrix:
    """m rows drawn without replacement; deterministic per seed."""
    if not 1 <= m <= dataset.n:
        raise InvalidArgument(f"m must be in [1, {dataset.n}], got {m}")
    idx = rng_for(seed, _STREAM_SUBSAMPLE).permutation(dataset.n)[:m]
    return dataset.rows(idx)


def train_test_split(dataset: DatasetMatrix, train_fraction: float, seed: int) -> DatasetMatrix:
    """Disjoint train/test index sets of sizes floor(fraction*n) and the rest."""
    if not 0.0 < train_fraction < 1.0:
        raise InvalidArgument(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = int(np.floor(train_fraction * dataset.n))
    if n_train == 0 or n_train == dataset.n:
        raise InvalidArgument(f"split sizes ({n_train}, {dataset.n - n_train}) leave one side empty")
    perm = rng_for(seed, _STREAM_SPLIT).permutation(dataset.n)
    return DatasetMatrix(
        dataset.features.copy(),
        dataset.labels.copy(),
        train_idx=np.sort(perm[:n_train]),
        test_idx=np.sort(perm[n_train:]),
    )


def make_synthetic_classification(
    n: int, d: int, seed: int, density: float = 0.11, flip_prob: float = 0.05
) -> DatasetMatrix:
    """Seeded binary-feature dataset in the mold of a9a (sparse 0/1 columns,
    labels from a random linear teacher with a little label noise).

    Serves as the offline stand-in when the real a9a file is not available.
    """
    if n < 1 or d < 1:
        raise InvalidArgument("n and d must be positive")
    rng = rng_for(seed, _STREAM_SYNTH)
    features = (rng.random((n, d)) < density).astype(np.float64)
    teacher = rng.standard_normal(d)
    margin = features @ teacher
    labels = np.where(margin - np.median(margin) > 0, 1.0, -1.0)
    flips = rng.random(n) < flip_prob
    labels[flips] *= -1.0
    return DatasetMatrix(features, labels)


def make_gaussian_features(n: int, d: int, seed: int) -> np.ndarray:
    """Standard normal feature matrix, seeded."""
    return rng_for(seed, _STREAM_GAUSS).standard_normal((n, d))
