"""
Labeled dataset loading, validation and partitioning.

This module provides the LabeledDataset class, the single source of truth for
the sample of (discrete label, continuous value) pairs, together with the CSV
reader and writer and the per-label partition used by the estimator.
"""

import csv
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from errors import DatasetError
from settings import DATASET_COLUMNS

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _frozen(array: np.ndarray) -> np.ndarray:
    """Return a read-only copy of an array."""
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """
    An ordered sample of (label, value) pairs.

    Labels are stored densified to 0..K-1 in ascending order of the original
    integer tokens; ``tokens[k]`` recovers the token for dense label ``k``.
    """

    labels: np.ndarray
    values: np.ndarray
    tokens: Tuple[int, ...]

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)

        if labels.ndim != 1 or values.ndim != 1 or labels.shape != values.shape:
            raise DatasetError("labels and values must be 1-d arrays of equal length")
        if labels.size == 0:
            raise DatasetError("empty dataset")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DatasetError(f"non-finite value at pair {bad}")
        if len(self.tokens) == 0 or len(set(self.tokens)) != len(self.tokens):
            raise DatasetError("label tokens must be non-empty and distinct")
        if labels.min() < 0 or labels.max() >= len(self.tokens):
            raise DatasetError("dense labels must index into tokens")

        object.__setattr__(self, 'labels', _frozen(labels))
        object.__setattr__(self, 'values', _frozen(values))
        object.__setattr__(self, 'tokens', tuple(int(t) for t in self.tokens))

    @classmethod
    def from_pairs(cls, labels: Sequence[int], values: Sequence[float]) -> 'LabeledDataset':
        """
        Build a dataset from raw integer label tokens and values.

        Args:
            labels: Arbitrary integer tokens, one per pair
            values: Finite reals, one per pair

        Returns:
            LabeledDataset with tokens densified in ascending order
        """
        raw = np.asarray(labels)
        if raw.size and not np.issubdtype(raw.dtype, np.integer):
            if not np.all(np.equal(np.mod(raw, 1), 0)):
                raise DatasetError("labels must be integers")
            raw = raw.astype(np.int64)
        tokens, dense = np.unique(raw, return_inverse=True)
        return cls(labels=dense.reshape(-1), values=values, tokens=tuple(tokens.tolist()))

    @property
    def n(self) -> int:
        """Total pair count."""
        return int(self.labels.size)

    @property
    def num_labels(self) -> int:
        """Number of distinct labels."""
        return len(self.tokens)

    @property
    def counts(self) -> np.ndarray:
        """Pair count per dense label."""
        return np.bincount(self.labels, minlength=self.num_labels)

    @property
    def pairs(self) -> List[Tuple[int, float]]:
        """The (token, value) pairs in original order."""
        token_array = np.asarray(self.tokens)
        return list(zip(token_array[self.labels].tolist(), self.values.tolist()))

    def index_of(self, token: int) -> int:
        """
        Get the dense label for an original token.

        Raises:
            DatasetError: The token does not occur in the dataset
        """
        try:
            return self.tokens.index(int(token))
        except ValueError as exc:
            raise DatasetError(f"unknown label {token}") from exc

    def token_labels(self) -> np.ndarray:
        """Original label tokens, one per pair."""
        return np.asarray(self.tokens, dtype=np.int64)[self.labels]


@dataclass(frozen=True, eq=False)
class LabelPartition:
    """The values carrying one label, in original sequence order."""

    label: int
    token: int
    values: np.ndarray = field(repr=False)
    count: int = 0


def partition(ds: LabeledDataset) -> List[LabelPartition]:
    """
    Split a dataset into one partition per label.

    Args:
        ds: Dataset to split

    Returns:
        Partitions ordered by dense label; their counts sum to ds.n
    """
    parts = []
    for label, token in enumerate(ds.tokens):
        values = _frozen(ds.values[ds.labels == label])
        parts.append(LabelPartition(label=label, token=token, values=values,
                                    count=int(values.size)))
    return parts


def label_frequencies(ds: LabeledDataset) -> Tuple[float, ...]:
    """
    Get n_x / n for every dense label.

    Each frequency is formed as an exact fraction before conversion, so the
    frequencies sum to one within one unit in the last place.
    """
    n = ds.n
    return tuple(float(Fraction(int(count), n)) for count in ds.counts)


def label_frequency(ds: LabeledDataset, label: int) -> float:
    """
    Get the relative frequency of one label.

    Args:
        ds: Dataset
        label: Original label token

    Returns:
        n_x / n in [0, 1]

    Raises:
        DatasetError: The label does not occur in the dataset
    """
    return label_frequencies(ds)[ds.index_of(label)]


def _parse_value(text: str) -> Optional[float]:
    """Parse a decimal with Python's correctly rounded float(); None if malformed.

    NaN and infinities parse here and are rejected later as non-finite.
    """
    if '_' in text:
        return None
    try:
        return float(text)
    except ValueError:
        return None


_INT64 = np.iinfo(np.int64)


def _parse_label(text: str) -> Optional[int]:
    """Parse a signed decimal integer label that fits in int64; None otherwise."""
    if not re.fullmatch(r'[+-]?\d+', text):
        return None
    label = int(text)
    return label if _INT64.min <= label <= _INT64.max else None


def _line_of(row_index: int) -> int:
    """Map a data-row index to its 1-based file line (line 1 is the header)."""
    return int(row_index) + 2


def load_csv(path: PathLike) -> LabeledDataset:
    """
    Load a `label,value` CSV file.

    Args:
        path: File with header `label,value` and rows `<integer>,<decimal>`

    Returns:
        LabeledDataset in row order with labels densified

    Raises:
        DatasetError: I/O failure, bad header, malformed row (with its line
            number), non-finite value, or no data rows
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            na_filter=False,
            skip_blank_lines=False,
            encoding='utf-8-sig',
            quoting=csv.QUOTE_NONE,
        )
    except FileNotFoundError as exc:
        raise DatasetError(f"{path}: no such file") from exc
    except pd.errors.EmptyDataError as exc:
        raise DatasetError(f"{path}: empty dataset") from exc
    except pd.errors.ParserError as exc:
        raise DatasetError(f"{path}: malformed row: {exc}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise DatasetError(f"{path}: cannot read file: {exc}") from exc

    header = tuple(str(name).strip() for name in frame.columns)
    if header != DATASET_COLUMNS:
        raise DatasetError(f"{path}: expected header 'label,value', got {','.join(header)!r}")

    frame = frame.fillna('')
    label_text = frame['label'].str.strip()
    value_text = frame['value'].str.strip()

    # Trailing blank lines are not rows
    filled = (label_text != '') | (value_text != '')
    if filled.any():
        last = int(np.flatnonzero(filled.to_numpy())[-1])
        label_text = label_text.iloc[: last + 1]
        value_text = value_text.iloc[: last + 1]
    else:
        raise DatasetError(f"{path}: empty dataset")

    labels = [_parse_label(text) for text in label_text]
    parsed = [_parse_value(text) for text in value_text]
    malformed = np.array([label is None or number is None
                          for label, number in zip(labels, parsed)])
    if malformed.any():
        row = int(np.flatnonzero(malformed)[0])
        raise DatasetError(
            f"{path}: line {_line_of(row)}: malformed row "
            f"{label_text.iloc[row]!r},{value_text.iloc[row]!r}"
        )

    values = np.array(parsed, dtype=np.float64)
    non_finite = ~np.isfinite(values)
    if non_finite.any():
        row = int(np.flatnonzero(non_finite)[0])
        raise DatasetError(
            f"{path}: line {_line_of(row)}: non-finite value {value_text.iloc[row]!r}"
        )

    ds = LabeledDataset.from_pairs(np.array(labels, dtype=np.int64), values)
    logger.debug("Loaded %d pairs with %d labels from %s", ds.n, ds.num_labels, path)
    return ds


def write_csv(ds: LabeledDataset, path: Union[PathLike, TextIO]) -> None:
    """
    Write a dataset as `label,value` CSV using the original label tokens.

    Values are written in shortest round-trip form, so load_csv recovers them
    exactly.
    """
    frame = pd.DataFrame({
        DATASET_COLUMNS[0]: ds.token_labels(),
        DATASET_COLUMNS[1]: [repr(v) for v in ds.values.tolist()],
    })
    try:
        frame.to_csv(path, index=False, lineterminator='\n')
    except OSError as exc:
        raise DatasetError(f"{path}: cannot write file: {exc}") from exc
