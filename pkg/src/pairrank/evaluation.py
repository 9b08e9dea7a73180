"""Kendall's tau over pairwise preference decisions.

Each evaluated tuple is concordant when the model's preferred hypothesis
matches the human one, disconcordant when it picks the other, and a tie
when the activation difference falls inside the tie band. Ties count
against the metric: tau = (c - d - t) / (c + d + t).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np

from .model import DEFAULT_TIE_EPSILON, Model, ModelInput, forward_batch, pack


class EmptyEvaluation(ValueError):
    pass


@dataclass
class PairCounts:
    concordant: int = 0
    disconcordant: int = 0
    ties: int = 0

    @property
    def total(self) -> int:
        return self.concordant + self.disconcordant + self.ties


@dataclass
class EvalReport:
    counts: PairCounts
    tau: float
    tie_epsilon: float
    per_split: dict[str, tuple[PairCounts, float]] = field(default_factory=dict)


def kendall_tau(counts: PairCounts) -> float:
    if counts.total == 0:
        raise EmptyEvaluation("no evaluated pairs")
    return (counts.concordant - counts.disconcordant - counts.ties) / counts.total


def _count(deltas: np.ndarray, labels: np.ndarray, tie_epsilon: float) -> PairCounts:
    tie = np.abs(deltas) <= tie_epsilon
    prefer_t1 = deltas > 0
    agree = prefer_t1 == (labels == 1)
    c = int(np.sum(~tie & agree))
    d = int(np.sum(~tie & ~agree))
    return PairCounts(concordant=c, disconcordant=d, ties=int(np.sum(tie)))


def evaluate(
    model: Model,
    examples: Sequence[tuple[ModelInput, int]],
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
    splits: Optional[Sequence[str]] = None,
) -> EvalReport:
    """Score every tuple and aggregate counts overall and per split."""
    if not examples:
        raise EmptyEvaluation("empty dataset")
    batch = pack([inp for inp, _ in examples])
    labels = np.array([y for _, y in examples])
    sigma, _ = forward_batch(model, batch)
    sigma_rev, _ = forward_batch(model, batch.swapped())
    deltas = sigma - sigma_rev
    counts = _count(deltas, labels, tie_epsilon)
    per_split: dict[str, tuple[PairCounts, float]] = {}
    if splits is not None:
        names = np.array(list(splits))
        for name in sorted(set(splits)):
            mask = names == name
            sc = _count(deltas[mask], labels[mask], tie_epsilon)
            per_split[name] = (sc, kendall_tau(sc))
    return EvalReport(
        counts=counts,
        tau=kendall_tau(counts),
        tie_epsilon=tie_epsilon,
        per_split=per_split,
    )


def save_report(report: EvalReport, sink: IO[str]) -> None:
    doc = {
        "counts": vars(report.counts),
        "tau": report.tau,
        "tie_epsilon": report.tie_epsilon,
        "per_split": {
            name: {"counts": vars(c), "tau": t} for name, (c, t) in report.per_split.items()
        },
    }
    json.dump(doc, sink)
