"""Command-line front end: extract, train, evaluate, predict, gradcheck.

Every subcommand is a thin wrapper over the library; all randomness is
seeded via flags, and a JSON config file can supply any flag's value
(explicit flags win).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import data_ingest, evaluation, training
from .embeddings import load_embedding_table
from .features import BLEUCOMP_FEATURE_NAMES
from .model import (
    DEFAULT_TIE_EPSILON,
    ModelConfig,
    decide,
    init_model,
    load_model,
    predict_delta,
    save_model,
)
from .training import CostConfig, TrainConfig, grad_check, train

TRAIN_DEFAULTS = {
    "cost": "logistic",
    "epochs": 10,
    "lr": 0.01,
    "batch_size": 32,
    "seed": 0,
    "shuffle_seed": 0,
    "hidden": 4,
    "arch": "multi-layer",
    "gamma": 100.0,
    "beta": 100.0,
    "tie_weight": 1.0,
    "pretrain_epochs": None,
    "l2": 0.0,
    "patience": 0,
}


def _load_data(path: str, embeddings_path: Optional[str]):
    with open(path, encoding="utf-8") as f:
        dataset = data_ingest.load_dataset(f)
    table = None
    if embeddings_path:
        with open(embeddings_path, encoding="utf-8") as f:
            table = load_embedding_table(f)
    examples = data_ingest.vectorize(dataset, table)
    return dataset, table, examples


def _merged_options(args: argparse.Namespace) -> dict:
    """Hard defaults, overridden by the config file, overridden by flags."""
    opts = dict(TRAIN_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as f:
            file_opts = json.load(f)
        unknown = set(file_opts) - set(opts)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        opts.update(file_opts)
    for key in opts:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    return opts


def _cost_config(opts: dict) -> CostConfig:
    return CostConfig(
        kind=opts["cost"],
        gamma=float(opts["gamma"]),
        beta=float(opts["beta"]),
        tie_weight=float(opts["tie_weight"]),
        pretrain_epochs=None if opts["pretrain_epochs"] is None else int(opts["pretrain_epochs"]),
    )


def cmd_extract(args) -> int:
    dataset, _, examples = _load_data(args.data, args.embeddings)
    if args.schema:
        for name in list(BLEUCOMP_FEATURE_NAMES) + dataset.feature_schema:
            print(name)
        return 0
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for t, (inp, y) in zip(dataset.tuples, examples):
            json.dump(
                {
                    "id": t.id,
                    "split": t.split,
                    "y": y,
                    "phi_t1r": inp.phi_t1r.tolist(),
                    "phi_t2r": inp.phi_t2r.tolist(),
                    "psi_t1": inp.psi_t1.tolist(),
                    "psi_t2": inp.psi_t2.tolist(),
                    "psi_r": inp.psi_r.tolist(),
                },
                sink,
            )
            sink.write("\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    return 0


def cmd_train(args) -> int:
    opts = _merged_options(args)
    dataset, table, examples = _load_data(args.data, args.embeddings)
    if args.valid:
        _, _, valid = _load_data(args.valid, args.embeddings)
    else:
        valid = examples
    sentence_dim = dataset.sentence_dim or (table.dimension if table else 0)
    pairwise_dim = len(examples[0][0].phi_t1r) if examples else 0
    config = ModelConfig(
        sentence_dim=sentence_dim,
        pairwise_dim=pairwise_dim,
        hidden_per_block=int(opts["hidden"]),
        architecture=opts["arch"],
        seed=int(opts["seed"]),
    )
    tcfg = TrainConfig(
        learning_rate=float(opts["lr"]),
        epochs=int(opts["epochs"]),
        batch_size=int(opts["batch_size"]),
        shuffle_seed=int(opts["shuffle_seed"]),
        l2=float(opts["l2"]),
        early_stop_patience=int(opts["patience"]),
    )
    model, report = train(init_model(config), examples, valid, tcfg, _cost_config(opts))
    with open(args.out, "w", encoding="utf-8") as f:
        save_model(model, f)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            report.to_jsonl(f)
    final_tau = report.epochs[-1].valid_tau if report.epochs else float("nan")
    print(f"trained {len(report.epochs)} epochs, final valid tau {final_tau:.4f}")
    return 0


def _print_tau_table(report: evaluation.EvalReport) -> None:
    rows = sorted(report.per_split) or ["all"]
    taus = [report.per_split[s][1] for s in rows] if report.per_split else [report.tau]
    header = "".join(f"{s:>12}" for s in rows + ["AVG"])
    values = "".join(f"{t * 100:12.2f}" for t in taus + [float(np.mean(taus))])
    print(header)
    print(values)


def cmd_evaluate(args) -> int:
    dataset, _, examples = _load_data(args.data, args.embeddings)
    with open(args.model, encoding="utf-8") as f:
        model = load_model(f)
    report = evaluation.evaluate(
        model, examples, tie_epsilon=args.tie_epsilon, splits=data_ingest.splits_of(dataset)
    )
    _print_tau_table(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            evaluation.save_report(report, f)
    return 0


def cmd_predict(args) -> int:
    dataset, _, examples = _load_data(args.data, args.embeddings)
    with open(args.model, encoding="utf-8") as f:
        model = load_model(f)
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for t, (inp, _) in zip(dataset.tuples, examples):
            pred = predict_delta(model, inp)
            json.dump(
                {
                    "id": t.id,
                    "sigma": pred.sigma,
                    "sigma_rev": pred.sigma_rev,
                    "delta": pred.delta,
                    "decision": decide(pred.delta, args.tie_epsilon),
                },
                sink,
            )
            sink.write("\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    return 0


def cmd_gradcheck(args) -> int:
    from .synthetic import interaction_rule_dataset, linear_rule_dataset

    config = ModelConfig(
        sentence_dim=3,
        pairwise_dim=2,
        hidden_per_block=args.hidden,
        architecture=args.arch,
        seed=args.seed,
    )
    model = init_model(config)
    # Mix sentence and pairwise features into one batch of inputs.
    examples = []
    sent = interaction_rule_dataset(8, sentence_dim=3, seed=args.seed)
    pair = linear_rule_dataset(8, pairwise_dim=2, seed=args.seed + 1)
    for (si, _), (pi, y) in zip(sent, pair):
        si.phi_t1r, si.phi_t2r = pi.phi_t1r, pi.phi_t2r
        examples.append((si, y))
    cfg = CostConfig(kind=args.cost)
    err = grad_check(model, examples, cfg, step=args.step)
    print(f"max relative error {err:.3e}")
    return 0 if err <= 1e-5 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairrank")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract", help="extract feature vectors from a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--schema", action="store_true", help="print the feature schema and exit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a ranking model")
    p.add_argument("--data", required=True)
    p.add_argument("--valid")
    p.add_argument("--embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--config", help="JSON file of option values; flags override")
    p.add_argument("--cost", choices=training.COST_KINDS)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--shuffle-seed", dest="shuffle_seed", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--arch", choices=["multi-layer", "single-layer"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--tie-weight", dest="tie_weight", type=float)
    p.add_argument("--pretrain-epochs", dest="pretrain_epochs", type=int)
    p.add_argument("--l2", type=float)
    p.add_argument("--patience", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a model, print per-split tau")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float, default=DEFAULT_TIE_EPSILON)
    p.add_argument("--report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="write per-tuple decisions")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float, default=DEFAULT_TIE_EPSILON)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gradcheck", help="finite-difference gradient self-check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost", choices=training.COST_KINDS, default="logistic")
    p.add_argument("--arch", choices=["multi-layer", "single-layer"], default="multi-layer")
    p.add_argument("--hidden", type=int, default=4)
    p.add_argument("--step", type=float, default=1e-6)
    p.set_defaults(func=cmd_gradcheck)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
