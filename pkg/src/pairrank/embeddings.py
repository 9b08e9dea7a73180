"""Word-embedding tables and sentence-vector composition.

Embedding files are plain UTF-8 text, one ``token v1 ... vd`` entry per
line. An optional word2vec-style ``<count> <dim>`` header line is
auto-detected, and lines starting with ``#`` are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence

import numpy as np


class EmbeddingError(ValueError):
    """Base class for embedding-file problems."""


class InconsistentDimensionError(EmbeddingError):
    pass


class DimensionMismatchError(EmbeddingError):
    pass


class EmptyTableError(EmbeddingError):
    pass


@dataclass
class EmbeddingTable:
    dimension: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    duplicates_skipped: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise EmbeddingError(f"dimension must be >= 1, got {self.dimension}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self.entries


@dataclass
class SentenceVector:
    values: np.ndarray
    dimension: int
    oov_count: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        assert self.values.shape == (self.dimension,)
        assert np.all(np.isfinite(self.values))


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace. No further normalization."""
    return text.lower().split()


def _is_header(fields: Sequence[str]) -> bool:
    if len(fields) != 2:
        return False
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def load_embedding_table(
    source: IO[str] | Iterable[str],
    expected_dimension: Optional[int] = None,
) -> EmbeddingTable:
    """Parse a text embedding file into an :class:`EmbeddingTable`.

    Duplicate tokens keep the first occurrence; the number skipped is
    recorded on the table. Raises on inconsistent dimensions, non-numeric
    fields, empty input, or a mismatch with ``expected_dimension``.
    """
    entries: dict[str, np.ndarray] = {}
    dimension: Optional[int] = None
    duplicates = 0
    first_data_line = True
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if first_data_line and _is_header(fields):
            first_data_line = False
            continue
        first_data_line = False
        token, raw = fields[0], fields[1:]
        if not raw:
            raise EmbeddingError(f"line {lineno}: token without vector")
        try:
            vec = np.array([float(x) for x in raw], dtype=float)
        except ValueError as exc:
            raise EmbeddingError(f"line {lineno}: non-numeric vector field") from exc
        if dimension is None:
            dimension = len(vec)
        elif len(vec) != dimension:
            raise InconsistentDimensionError(
                f"line {lineno}: expected {dimension} values, got {len(vec)}"
            )
        if token in entries:
            duplicates += 1
            continue
        entries[token] = vec
    if dimension is None or not entries:
        raise EmptyTableError("no embedding entries in input")
    if expected_dimension is not None and dimension != expected_dimension:
        raise DimensionMismatchError(
            f"table dimension {dimension} != expected {expected_dimension}"
        )
    return EmbeddingTable(dimension=dimension, entries=entries, duplicates_skipped=duplicates)


def save_embedding_table(table: EmbeddingTable, sink: IO[str]) -> None:
    """Write the table back out; floats use repr so reload is bit-exact."""
    for token, vec in table.entries.items():
        sink.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def compose_sentence_vector(
    tokens: Sequence[str],
    table: EmbeddingTable,
    strategy: str = "mean",
) -> SentenceVector:
    """Compose a fixed-length sentence vector from token embeddings.

    Out-of-vocabulary tokens are skipped and counted. With no token found
    (or an empty sentence) the zero vector comes back, oov_count equal to
    the sentence length.
    """
    if strategy != "mean":
        raise ValueError(f"unknown composition strategy: {strategy}")
    acc = np.zeros(table.dimension)
    found = 0
    for tok in tokens:
        vec = table.entries.get(tok)
        if vec is None:
            continue
        acc += vec
        found += 1
    if found == 0:
        return SentenceVector(np.zeros(table.dimension), table.dimension, len(tokens))
    return SentenceVector(acc / found, table.dimension, len(tokens) - found)
