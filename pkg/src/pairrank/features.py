"""Decomposed BLEU statistics and pairwise feature assembly.

A (hypothesis, reference) pair yields 16 fixed-order lexical features:
clipped n-gram precisions, matches and totals for n=1..4, both lengths,
their ratio, and the brevity penalty. Externally computed metric scores
and embedding similarities are appended in sorted-name order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

MAX_ORDER = 4


class NonFiniteFeature(ValueError):
    pass


@dataclass(frozen=True)
class NGramStats:
    order: int
    matches: int
    total: int

    def __post_init__(self):
        assert 1 <= self.order <= MAX_ORDER
        assert 0 <= self.matches <= self.total or self.total == 0 and self.matches == 0


@dataclass(frozen=True)
class BleuComponents:
    precisions: tuple[float, float, float, float]
    matches: tuple[int, int, int, int]
    totals: tuple[int, int, int, int]
    hyp_len: int
    ref_len: int
    length_ratio: float
    brevity_penalty: float

    def flatten(self) -> np.ndarray:
        """The 16 scalar features in declared order."""
        return np.array(
            list(self.precisions)
            + list(self.matches)
            + list(self.totals)
            + [self.hyp_len, self.ref_len, self.length_ratio, self.brevity_penalty],
            dtype=float,
        )


BLEUCOMP_FEATURE_NAMES: tuple[str, ...] = tuple(
    [f"precision_{n}" for n in range(1, 5)]
    + [f"matches_{n}" for n in range(1, 5)]
    + [f"total_{n}" for n in range(1, 5)]
    + ["hyp_len", "ref_len", "length_ratio", "brevity_penalty"]
)


@dataclass
class PairwiseFeatures:
    values: np.ndarray
    names: list[str]
    source_tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        assert len(self.values) == len(self.names)
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteFeature("feature vector contains non-finite values")


def ngram_stats(hyp: Sequence[str], ref: Sequence[str], order: int) -> NGramStats:
    """Clipped n-gram match count and hypothesis n-gram total."""
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [1, {MAX_ORDER}], got {order}")
    hyp_grams = Counter(tuple(hyp[i : i + order]) for i in range(len(hyp) - order + 1))
    ref_grams = Counter(tuple(ref[i : i + order]) for i in range(len(ref) - order + 1))
    total = max(0, len(hyp) - order + 1)
    matches = sum(min(c, ref_grams[g]) for g, c in hyp_grams.items())
    return NGramStats(order=order, matches=matches, total=total)


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    """BLEU's brevity penalty; 0 for an empty hypothesis by convention."""
    if hyp_len == 0:
        return 0.0
    if hyp_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def bleu_components(hyp: Sequence[str], ref: Sequence[str]) -> BleuComponents:
    stats = [ngram_stats(hyp, ref, n) for n in range(1, MAX_ORDER + 1)]
    precisions = tuple(s.matches / s.total if s.total > 0 else 0.0 for s in stats)
    hyp_len, ref_len = len(hyp), len(ref)
    ratio = hyp_len / ref_len if ref_len > 0 else 0.0
    return BleuComponents(
        precisions=precisions,
        matches=tuple(s.matches for s in stats),
        totals=tuple(s.total for s in stats),
        hyp_len=hyp_len,
        ref_len=ref_len,
        length_ratio=ratio,
        brevity_penalty=brevity_penalty(hyp_len, ref_len),
    )


def bleu_score(c: BleuComponents, smoothing: str = "none") -> float:
    """Scalar BLEU from its components.

    Orders with zero hypothesis n-grams are dropped from the geometric
    mean. ``add-one-on-zero`` smoothing replaces a zero-match precision
    with (matches+1)/(total+1); under ``none`` any zero precision makes
    the score 0.
    """
    if smoothing not in ("none", "add-one-on-zero"):
        raise ValueError(f"unknown smoothing: {smoothing}")
    log_sum = 0.0
    effective = 0
    for matches, total in zip(c.matches, c.totals):
        if total == 0:
            continue
        effective += 1
        if matches == 0:
            if smoothing == "none":
                return 0.0
            p = (matches + 1) / (total + 1)
        else:
            p = matches / total
        log_sum += math.log(p)
    if effective == 0:
        return 0.0
    return c.brevity_penalty * math.exp(log_sum / effective)


def assemble_pairwise(
    comps: BleuComponents,
    external_scores: Optional[Mapping[str, float]] = None,
    embedding_sims: Optional[Mapping[str, float]] = None,
) -> PairwiseFeatures:
    """Concatenate BLEU components, external scores, embedding similarities.

    Ordering is deterministic: the 16 BLEU components in declared order,
    then external scores sorted by name, then similarities sorted by name.
    """
    values = list(comps.flatten())
    names = list(BLEUCOMP_FEATURE_NAMES)
    tags = ["bleucomp"] * len(names)
    for source, tag in ((external_scores, "external"), (embedding_sims, "embedding-similarity")):
        if not source:
            continue
        for name in sorted(source):
            v = float(source[name])
            if not math.isfinite(v):
                raise NonFiniteFeature(f"non-finite value for feature {name!r}: {v}")
            values.append(v)
            names.append(name)
            tags.append(tag)
    return PairwiseFeatures(values=np.array(values), names=names, source_tags=tags)
