"""Cost functions, exact backpropagation, and the training loop.

Two per-example costs are available: the standard logistic
(cross-entropy) cost on the output activation, and a ranking cost that
pushes the activation difference between the two hypothesis orderings
toward the gold preference through saturated sigmoids, with a Gaussian
term that penalizes near-ties. A third schedule pre-trains under the
logistic cost and fine-tunes under the ranking cost.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np

from .evaluation import evaluate
from .model import (
    Batch,
    Model,
    ModelInput,
    backward_batch,
    forward_batch,
    pack,
    sigmoid,
)

LOGISTIC = "logistic"
KENDALL = "kendall"
LOGISTIC_THEN_KENDALL = "logistic-then-kendall"
COST_KINDS = (LOGISTIC, KENDALL, LOGISTIC_THEN_KENDALL)

SIGMA_CLAMP = 1e-12


class DivergenceError(RuntimeError):
    """Training produced a non-finite cost or parameter."""


class InvalidStep(ValueError):
    pass


@dataclass(frozen=True)
class CostConfig:
    kind: str = LOGISTIC
    gamma: float = 100.0
    beta: float = 100.0
    tie_weight: float = 1.0
    pretrain_epochs: Optional[int] = None

    def __post_init__(self):
        if self.kind not in COST_KINDS:
            raise ValueError(f"unknown cost kind: {self.kind}")
        if self.gamma <= 0 or self.beta <= 0 or self.tie_weight < 0:
            raise ValueError("gamma, beta must be positive; tie_weight non-negative")

    def phase_kind(self, epoch: int, total_epochs: int) -> str:
        """The effective cost kind at a given epoch of the schedule."""
        if self.kind != LOGISTIC_THEN_KENDALL:
            return self.kind
        pre = self.pretrain_epochs if self.pretrain_epochs is not None else total_epochs // 2
        return LOGISTIC if epoch < pre else KENDALL


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 10
    batch_size: int = 32
    shuffle_seed: int = 0
    l2: float = 0.0
    early_stop_patience: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("invalid training configuration")
        if self.l2 < 0 or self.early_stop_patience < 0:
            raise ValueError("l2 and early_stop_patience must be non-negative")


@dataclass
class EpochRecord:
    epoch: int
    cost_kind: str
    train_cost: float
    valid_tau: float
    seconds: float


@dataclass
class TrainReport:
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None

    def to_jsonl(self, sink: IO[str]) -> None:
        # Wall-clock is kept in memory only so identical runs serialize
        # to identical bytes.
        for r in self.epochs:
            json.dump(
                {
                    "epoch": r.epoch,
                    "cost_kind": r.cost_kind,
                    "train_cost": r.train_cost,
                    "valid_tau": r.valid_tau,
                },
                sink,
            )
            sink.write("\n")


def logistic_cost(sigma: float, y: int) -> float:
    s = min(max(sigma, SIGMA_CLAMP), 1.0 - SIGMA_CLAMP)
    return -(y * math.log(s) + (1 - y) * math.log(1.0 - s))


def kendall_cost(delta: float, y: int, cfg: CostConfig) -> float:
    g, b, lam = cfg.gamma, cfg.beta, cfg.tie_weight
    disagreement = y * sigmoid(-g * delta) + (1 - y) * sigmoid(g * delta)
    return float(disagreement + lam * math.exp(-b * delta * delta / 2.0))


def _batch_cost(model: Model, batch: Batch, ys: np.ndarray, cfg: CostConfig, kind: str) -> float:
    if kind == LOGISTIC:
        sigma, _ = forward_batch(model, batch)
        s = np.clip(sigma, SIGMA_CLAMP, 1.0 - SIGMA_CLAMP)
        return float(-np.sum(ys * np.log(s) + (1 - ys) * np.log(1.0 - s)))
    sigma, _ = forward_batch(model, batch)
    sigma_rev, _ = forward_batch(model, batch.swapped())
    delta = sigma - sigma_rev
    g, b, lam = cfg.gamma, cfg.beta, cfg.tie_weight
    cost = ys * sigmoid(-g * delta) + (1 - ys) * sigmoid(g * delta)
    cost = cost + lam * np.exp(-b * delta * delta / 2.0)
    return float(np.sum(cost))


def _batch_gradients(
    model: Model, batch: Batch, ys: np.ndarray, cfg: CostConfig, kind: str
) -> tuple[dict[str, np.ndarray], float]:
    """Summed parameter gradients and the batch cost, for one cost kind."""
    if kind == LOGISTIC:
        sigma, cache = forward_batch(model, batch, keep_cache=True)
        grads = backward_batch(model, batch, cache, sigma - ys)
        s = np.clip(sigma, SIGMA_CLAMP, 1.0 - SIGMA_CLAMP)
        cost = float(-np.sum(ys * np.log(s) + (1 - ys) * np.log(1.0 - s)))
        return grads, cost
    if kind != KENDALL:
        raise ValueError(f"cannot take gradients of unresolved cost kind {kind!r}")
    swapped = batch.swapped()
    sigma, cache = forward_batch(model, batch, keep_cache=True)
    sigma_rev, cache_rev = forward_batch(model, swapped, keep_cache=True)
    delta = sigma - sigma_rev
    g, b, lam = cfg.gamma, cfg.beta, cfg.tie_weight
    sig_neg = sigmoid(-g * delta)
    sig_pos = sigmoid(g * delta)
    dJ_dDelta = (
        -g * ys * sig_neg * (1.0 - sig_neg)
        + g * (1 - ys) * sig_pos * (1.0 - sig_pos)
        - lam * b * delta * np.exp(-b * delta * delta / 2.0)
    )
    # Delta sees sigma with +1 and sigma' with -1; each pass backprops
    # through its own logistic output.
    grads = backward_batch(model, batch, cache, dJ_dDelta * sigma * (1.0 - sigma))
    grads_rev = backward_batch(
        model, swapped, cache_rev, -dJ_dDelta * sigma_rev * (1.0 - sigma_rev)
    )
    for name in grads:
        grads[name] = grads[name] + grads_rev[name]
    cost = float(np.sum(ys * sig_neg + (1 - ys) * sig_pos + lam * np.exp(-b * delta * delta / 2.0)))
    return grads, cost


def _cost_highprec(model: Model, batch: Batch, ys: np.ndarray, cfg: CostConfig, kind: str):
    """Batch cost recomputed independently in extended precision.

    Used as the finite-difference oracle so that the difference quotient
    is not dominated by float64 rounding of the cost itself.
    """
    ld = np.longdouble
    p = {k: v.astype(ld) for k, v in model.params.items()}
    ys = ys.astype(ld)

    def fwd(P1, P2, Pr, F1, F2):
        if model.config.architecture == "multi-layer":
            H12 = np.tanh(np.hstack([P1, P2]) @ p["W12"].T + p["b12"])
            H1r = np.tanh(np.hstack([P1, Pr]) @ p["W1r"].T + p["b1r"])
            H2r = np.tanh(np.hstack([P2, Pr]) @ p["W2r"].T + p["b2r"])
            Z = np.hstack([H12, H1r, H2r, F1, F2])
        else:
            Z = np.hstack([P1, P2, Pr, F1, F2])
        return 1.0 / (1.0 + np.exp(-(Z @ p["w_out"] + p["b_out"])))

    P1, P2, Pr = batch.P1.astype(ld), batch.P2.astype(ld), batch.Pr.astype(ld)
    F1, F2 = batch.F1.astype(ld), batch.F2.astype(ld)
    sigma = fwd(P1, P2, Pr, F1, F2)
    if kind == LOGISTIC:
        s = np.clip(sigma, SIGMA_CLAMP, 1.0 - SIGMA_CLAMP)
        return -np.sum(ys * np.log(s) + (1 - ys) * np.log(1.0 - s))
    delta = sigma - fwd(P2, P1, Pr, F2, F1)
    g, b, lam = cfg.gamma, cfg.beta, cfg.tie_weight
    cost = ys / (1.0 + np.exp(g * delta)) + (1 - ys) / (1.0 + np.exp(-g * delta))
    return np.sum(cost + lam * np.exp(-b * delta * delta / 2.0))


def backward(
    model: Model,
    inp: ModelInput,
    y: int,
    cfg: CostConfig,
    kind: Optional[str] = None,
) -> dict[str, np.ndarray]:
    """Exact gradient of the per-example cost w.r.t. every parameter.

    For the pre-train/fine-tune schedule the effective phase must be
    passed explicitly via ``kind``.
    """
    kind = kind or cfg.kind
    grads, _ = _batch_gradients(model, pack([inp]), np.array([y], dtype=float), cfg, kind)
    return grads


def _resolved_kinds(cfg: CostConfig) -> tuple[str, ...]:
    if cfg.kind == LOGISTIC_THEN_KENDALL:
        return (LOGISTIC, KENDALL)
    return (cfg.kind,)


def grad_check(
    model: Model,
    examples: Sequence[tuple[ModelInput, int]],
    cfg: CostConfig,
    step: float = 1e-6,
) -> float:
    """Max relative error of analytic vs. central-difference gradients.

    The schedule cost kind checks both of its phases.
    """
    if not 0 < step <= 1e-3:
        raise InvalidStep(f"step must be in (0, 1e-3], got {step}")
    batch = pack([inp for inp, _ in examples])
    ys = np.array([y for _, y in examples], dtype=float)
    max_err = 0.0
    for kind in _resolved_kinds(cfg):
        analytic, _ = _batch_gradients(model, batch, ys, cfg, kind)
        for name in model.param_names:
            p = model.params[name]
            flat = p.reshape(-1) if p.ndim else p.reshape(1)
            a_flat = analytic[name].reshape(-1) if p.ndim else analytic[name].reshape(1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                p_plus = flat[i]
                c_plus = _cost_highprec(model, batch, ys, cfg, kind)
                flat[i] = orig - step
                p_minus = flat[i]
                c_minus = _cost_highprec(model, batch, ys, cfg, kind)
                flat[i] = orig
                # Effective step: the float64 perturbations round, so use
                # the realized parameter difference.
                numeric = float((c_plus - c_minus) / np.longdouble(p_plus - p_minus))
                denom = max(abs(a_flat[i]), abs(numeric), 1e-12)
                max_err = max(max_err, abs(a_flat[i] - numeric) / denom)
    return max_err


def train(
    model: Model,
    train_set: Sequence[tuple[ModelInput, int]],
    valid_set: Sequence[tuple[ModelInput, int]],
    tcfg: TrainConfig,
    ccfg: CostConfig,
) -> tuple[Model, TrainReport]:
    """Mini-batch gradient descent with seeded per-epoch shuffling.

    With early stopping enabled (patience > 0) the returned model is the
    best-validation-tau checkpoint; otherwise the final one.
    """
    report = TrainReport()
    if tcfg.epochs == 0 or not train_set:
        return model, report
    model = model.copy()
    batch_all = pack([inp for inp, _ in train_set])
    ys_all = np.array([y for _, y in train_set], dtype=float)
    n = len(ys_all)
    rng = np.random.default_rng(tcfg.shuffle_seed)
    best: Optional[Model] = None
    best_tau = -math.inf
    since_best = 0
    for epoch in range(tcfg.epochs):
        t0 = time.perf_counter()
        kind = ccfg.phase_kind(epoch, tcfg.epochs)
        perm = rng.permutation(n)
        epoch_cost = 0.0
        for start in range(0, n, tcfg.batch_size):
            idx = perm[start : start + tcfg.batch_size]
            batch = Batch(
                batch_all.P1[idx],
                batch_all.P2[idx],
                batch_all.Pr[idx],
                batch_all.F1[idx],
                batch_all.F2[idx],
            )
            grads, cost = _batch_gradients(model, batch, ys_all[idx], ccfg, kind)
            if not math.isfinite(cost):
                raise DivergenceError(f"non-finite cost at epoch {epoch}")
            epoch_cost += cost
            for name in model.param_names:
                g = grads[name]
                if tcfg.l2 > 0 and name.startswith(("W", "w")):
                    g = g + tcfg.l2 * model.params[name]
                model.params[name] = model.params[name] - tcfg.learning_rate * g
                if not np.all(np.isfinite(model.params[name])):
                    raise DivergenceError(f"non-finite parameter {name} at epoch {epoch}")
        valid_tau = evaluate(model, valid_set).tau if valid_set else float("nan")
        report.epochs.append(
            EpochRecord(
                epoch=epoch,
                cost_kind=kind,
                train_cost=epoch_cost,
                valid_tau=valid_tau,
                seconds=time.perf_counter() - t0,
            )
        )
        if valid_set and valid_tau > best_tau:
            best_tau = valid_tau
            best = model.copy()
            report.best_epoch = epoch
            since_best = 0
        else:
            since_best += 1
        if tcfg.early_stop_patience > 0 and since_best > tcfg.early_stop_patience:
            break
    if tcfg.early_stop_patience > 0 and best is not None:
        return best, report
    return model, report
