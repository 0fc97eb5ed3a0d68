"""Single command-line entry point exposing every operation.

Structured results (JSON/JSONL) go to stdout or ``--out``; human-readable
summaries go to stderr. Exit codes: 0 success, 2 invalid input (including
usage errors), 1 internal error. Failures print a machine-readable
``{"error": ..., "message": ...}`` object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ablation as ablation_mod
from . import metrics as metrics_mod
from .adapters import AdapterSet, ModelDims, REFERENCE_DIMS, count_adapter_params
from .assembly import assemble, truncate
from .data import PrepareLimits, compute_stats, prepare_examples, read_records
from .errors import AdapterQaError, InputError, SchemaError
from .linearize import linearize
from .tables import HierarchicalTable
from .toymodel import (
    ToyConfig,
    TrainConfig,
    build_toy_model,
    grad_check,
    make_copy_task,
    train_adapters,
)

DEFAULT_SEED = 6


@dataclass
class GlobalConfig:
    seed: int = DEFAULT_SEED
    precision: str = "double"


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_json(path: str) -> object:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def _summary(message: str):
    print(message, file=sys.stderr)


def cmd_linearize(args, _cfg: GlobalConfig) -> int:
    table = HierarchicalTable.from_json_dict(_load_json(args.infile))
    flat = linearize(table)
    _write_output(flat.text + "\n", args.out)
    _summary(f"linearized {flat.pair_count} key:value pairs")
    return 0


def cmd_assemble(args, _cfg: GlobalConfig) -> int:
    if args.batch is not None:
        lines = []
        with open(args.batch, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"invalid JSON: {exc}", line_no) from exc
                if not isinstance(obj, dict) or "question" not in obj:
                    raise SchemaError("batch line must be an object with 'question'", line_no)
                seq = assemble(obj["question"], obj.get("title", ""), obj.get("context", ""))
                if args.max_tokens is not None:
                    seq = truncate(seq, args.max_tokens)
                lines.append(seq.rendered)
        _write_output("".join(line + "\n" for line in lines), args.out)
        _summary(f"assembled {len(lines)} sequences")
        return 0

    if args.question is None:
        raise InputError("either --question or --batch is required")
    context = ""
    if args.context is not None:
        context = args.context
    elif args.context_file is not None:
        context = Path(args.context_file).read_text(encoding="utf-8")
    seq = assemble(args.question, args.title, context)
    if args.max_tokens is not None:
        seq = truncate(seq, args.max_tokens)
    _write_output(seq.rendered + "\n", args.out)
    _summary(f"assembled {seq.n_tokens} tokens")
    return 0


def cmd_eval(args, _cfg: GlobalConfig) -> int:
    report = metrics_mod.evaluate_predictions(args.pred, args.ref, jobs=args.jobs)
    payload = json.dumps(report.to_json_dict())
    _write_output(payload + "\n", args.out)
    if args.out is not None:
        sys.stdout.write(payload + "\n")
    _summary(
        f"n={report.n_examples} rouge1_f={report.rouge1.f1:.4f} "
        f"rouge2_f={report.rouge2.f1:.4f} rougeL_f={report.rougeL.f1:.4f} "
        f"bleu={report.bleu:.2f}"
    )
    return 0


def _dims_from_args(args) -> ModelDims:
    if args.config is None:
        return REFERENCE_DIMS
    obj = _load_json(args.config)
    if not isinstance(obj, dict):
        raise SchemaError("dims config must be a JSON object")
    return ModelDims.from_json_dict(obj)


def cmd_count_params(args, _cfg: GlobalConfig) -> int:
    dims = _dims_from_args(args)
    active = AdapterSet.full(dims)
    if args.ablation is not None:
        obj = _load_json(args.ablation)
        if not isinstance(obj, dict):
            raise SchemaError("ablation config must be a JSON object")
        config = ablation_mod.AblationConfig(
            removed_encoder=tuple(obj.get("removed_encoder", [])),
            removed_decoder=tuple(obj.get("removed_decoder", [])),
            label=obj.get("label", ""),
        )
        active = ablation_mod.apply_ablation(active, config)
    count, percent = count_adapter_params(dims, active)
    payload = {"trainable": count, "percent": percent,
               "active_layers": active.n_active_layers}
    _write_output(json.dumps(payload) + "\n", args.out)
    _summary(f"{count:,} trainable parameters ({percent:.2f}%)")
    return 0


def cmd_plan_ablation(args, _cfg: GlobalConfig) -> int:
    dims = _dims_from_args(args)
    if args.mode == "uniform":
        plan = ablation_mod.uniform_ablation_plan(dims)
    else:
        plan = ablation_mod.grid_ablation_plan(dims)
    rows = ablation_mod.cost_plan(plan, dims)
    _write_output(ablation_mod.manifest_lines(rows), args.out)
    _summary(f"{len(rows)} configurations ({args.mode})")
    return 0


def _toy_config(args, cfg: GlobalConfig) -> ToyConfig:
    return ToyConfig(
        d_model=args.d_model,
        bottleneck=args.bottleneck,
        n_encoder_layers=args.enc_layers,
        n_decoder_layers=args.dec_layers,
        vocab_size=args.vocab,
        seed=cfg.seed,
        precision=cfg.precision,
    )


def cmd_gradcheck(args, cfg: GlobalConfig) -> int:
    model = build_toy_model(_toy_config(args, cfg))
    model.randomize_adapters(seed=cfg.seed + 1, scale=0.1)
    rng = np.random.default_rng(cfg.seed + 2)
    source = rng.integers(2, model.cfg.vocab_size, size=(args.batch, args.seq_len))
    target = rng.integers(2, model.cfg.vocab_size, size=(args.batch, args.seq_len))
    report = grad_check(model, source, target, eps=args.eps)
    payload = report.to_json_dict()
    del payload["per_parameter"]  # keep stdout compact; the maximum is what matters
    _write_output(json.dumps(payload) + "\n", args.out)
    _summary(
        f"checked {report.n_params_checked} trainable scalars, "
        f"max relative error {report.max_rel_error:.3e} ({report.worst_parameter})"
    )
    return 0


def cmd_train_toy(args, cfg: GlobalConfig) -> int:
    if args.task != "copy":
        raise InputError(f"unknown task {args.task!r}; available: copy")
    model = build_toy_model(_toy_config(args, cfg))
    source, target = make_copy_task(
        n_examples=args.examples, seq_len=args.seq_len,
        vocab_size=model.cfg.vocab_size, seed=cfg.seed,
    )
    train_cfg = TrainConfig(learning_rate=args.lr, steps=args.steps, optimizer=args.optimizer)
    log = train_adapters(model, source, target, train_cfg)
    _write_output(json.dumps(log.to_json_dict()) + "\n", args.out)
    _summary(
        f"{args.steps} steps: loss {log.initial_loss:.4f} -> {log.final_loss:.4f} "
        f"(ratio {log.final_loss / log.initial_loss:.3f})"
    )
    return 0


def cmd_stats(args, _cfg: GlobalConfig) -> int:
    records = read_records(args.infile, args.modality)
    stats = compute_stats(records)
    _write_output(json.dumps(stats.to_json_dict()) + "\n", args.out)
    _summary(f"{stats.n_samples} records")
    return 0


def cmd_prepare(args, _cfg: GlobalConfig) -> int:
    records = read_records(args.infile, args.modality)
    limits = PrepareLimits(
        max_input_tokens=args.max_tokens,
        max_target_tokens=args.max_target_tokens,
        answer_index=args.answer_index,
    )
    examples = prepare_examples(records, limits)
    lines = "".join(
        json.dumps({"input": seq.rendered, "target": target}) + "\n"
        for seq, target in examples
    )
    _write_output(lines, args.out)
    _summary(f"prepared {len(examples)} examples")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adapterqa",
        description="Table linearization, prompted inputs, adapter accounting, "
                    "ablation planning, toy adapter training, and text metrics.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--precision", choices=("single", "double"), default="double")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("linearize", help="flatten a table JSON file to key:value text")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_linearize)

    p = add_parser("assemble", help="build a prompted input sequence")
    p.add_argument("--question", default=None)
    p.add_argument("--title", default="")
    p.add_argument("--context", default=None)
    p.add_argument("--context-file", default=None)
    p.add_argument("--batch", default=None, help="JSONL file with question/title/context per line")
    p.add_argument("--max-tokens", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_assemble)

    p = add_parser("eval", help="ROUGE and BLEU of line-aligned files")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = add_parser("count-params", help="trainable-parameter accounting")
    p.add_argument("--config", default=None, help="dims JSON (defaults to the reference dims)")
    p.add_argument("--ablation", default=None, help="JSON with removed_encoder/removed_decoder")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_count_params)

    p = add_parser("plan-ablation", help="enumerate pruning experiments with costs")
    p.add_argument("--mode", choices=("uniform", "grid"), required=True)
    p.add_argument("--dims", dest="config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plan_ablation)

    def add_toy_flags(p):
        p.add_argument("--d-model", type=int, default=32)
        p.add_argument("--bottleneck", type=int, default=8)
        p.add_argument("--enc-layers", type=int, default=2)
        p.add_argument("--dec-layers", type=int, default=2)
        p.add_argument("--vocab", type=int, default=64)
        p.add_argument("--seq-len", type=int, default=6)
        p.add_argument("--out", default=None)

    p = add_parser("gradcheck", help="finite-difference audit of adapter gradients")
    add_toy_flags(p)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--batch", type=int, default=2)
    p.set_defaults(func=cmd_gradcheck)

    p = add_parser("train-toy", help="train adapters on a synthetic task")
    add_toy_flags(p)
    p.add_argument("--task", default="copy")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--examples", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.set_defaults(func=cmd_train_toy)

    p = add_parser("stats", help="dataset statistics from a JSONL record file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--modality", choices=("table", "text"), required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    p = add_parser("prepare", help="records -> prompted (input, target) JSONL")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--modality", choices=("table", "text"), required=True)
    p.add_argument("--max-tokens", type=int, default=None)
    p.add_argument("--max-target-tokens", type=int, default=None)
    p.add_argument("--answer-index", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)  # accepted for interface parity
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_prepare)

    return parser


def _error_payload(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    cfg = GlobalConfig(seed=args.seed, precision=args.precision)
    try:
        return args.func(args, cfg)
    except InputError as exc:
        print(_error_payload(exc), file=sys.stderr)
        return 2
    except (AdapterQaError, OSError) as exc:
        print(_error_payload(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
