"""Command-line entry point: gen, train, dismantle, eval, sir and stats."""

from __future__ import annotations

import argparse
import logging
import sys
import types
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Literal, Sequence, Union, get_args, get_origin

import pandas as pd

from hyperdismantle import __version__
from hyperdismantle.config import (
    DEFAULT_LOG_LEVEL,
    BaseConfig,
    EvalConfig,
    GenConfig,
    RunManifest,
    SirConfig,
    TrainConfig,
    configure_logging,
    load_config_file,
    resolve,
)
from hyperdismantle.dismantling import anc, dismantle
from hyperdismantle.errors import HyperDismantleError
from hyperdismantle.graph import build_strategy, run_pipeline
from hyperdismantle.hypergraph import summarize
from hyperdismantle.io import (
    file_digest,
    load_checkpoint,
    load_hypernetwork,
    save_checkpoint,
    save_hyperedge_list,
    save_id_map,
    write_manifest,
    write_table,
)
from hyperdismantle.synthgen import generate_batch
from hyperdismantle.training import train
from hyperdismantle.types import Context, State

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 2


def _flag_type(annotation: Any) -> tuple[Callable[[str], Any], List[str] | None]:
    origin = get_origin(annotation)
    if origin is Literal:
        return str, [str(a) for a in get_args(annotation)]
    if origin in (Union, types.UnionType):
        inner = [a for a in get_args(annotation) if a is not type(None)]
        return _flag_type(inner[0])
    if origin is tuple:
        return str, None
    return annotation, None


def _add_config_flags(
    parser: argparse.ArgumentParser,
    model: type[BaseConfig],
    skip: Iterable[str] = (),
) -> None:
    """Expose every field of ``model`` as ``--field-name``; defaults stay on the model."""
    taken = {action.dest for action in parser._actions}
    group = parser.add_argument_group(model.__name__)
    for name, info in model.model_fields.items():
        if name in taken or name in skip:
            continue
        kind, choices = _flag_type(info.annotation)
        group.add_argument(
            f"--{name.replace('_', '-')}",
            dest=name,
            type=kind,
            choices=choices,
            default=None,
            help=f"{info.description or name} (default: {info.default})",
        )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="KEY=VALUE file with configuration defaults")
    parser.add_argument("--manifest", type=Path, help="Where to write the run manifest")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")


def _add_dataset(parser: argparse.ArgumentParser, fmt: str = "hyperedge-list", many: bool = False) -> None:
    parser.add_argument("datasets" if many else "dataset", type=Path, nargs="*" if many else None)
    parser.add_argument(
        "--format", dest="dataset_format", choices=["hyperedge-list", "contact-timestamps"], default=fmt
    )
    parser.add_argument("--gcc", action="store_true", help="Keep only the giant connected component")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdismantle",
        description="Dismantle hypernetworks with learned and greedy strategies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate synthetic hypernetworks")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out-dir", type=Path, required=True)
    _add_common(gen)
    _add_config_flags(gen, GenConfig)

    trainer = commands.add_parser("train", help="Train the dismantling agent")
    trainer.add_argument("--checkpoint", type=Path, required=True, help="Best-validation weights")
    trainer.add_argument("--curve", type=Path, required=True, help="Validation curve CSV")
    trainer.add_argument("--last-checkpoint", type=Path, help="Weights after the final episode")
    _add_common(trainer)
    _add_config_flags(trainer, TrainConfig)
    _add_config_flags(trainer, GenConfig)

    single = commands.add_parser("dismantle", help="Dismantle one dataset with one strategy")
    _add_dataset(single)
    single.add_argument("--strategy", required=True, help="HD, HDA, HHD, HHDA, CI, AGENT or RANDOM")
    single.add_argument("--checkpoint", type=Path, help="Agent weights for --strategy agent")
    single.add_argument("--out", type=Path, required=True, help="Trace CSV")
    single.add_argument("--summary", type=Path, help="ANC summary CSV")
    _add_common(single)
    _add_config_flags(single, EvalConfig, skip=("strategies", "threads"))

    evaluate = commands.add_parser("eval", help="ANC table across strategies")
    _add_dataset(evaluate, many=True)
    evaluate.add_argument("--synthetic", type=int, default=0, help="Also evaluate this many generated instances")
    evaluate.add_argument("--checkpoint", type=Path)
    evaluate.add_argument("--out", type=Path, required=True)
    _add_common(evaluate)
    _add_config_flags(evaluate, EvalConfig)
    _add_config_flags(evaluate, GenConfig)

    sir = commands.add_parser("sir", help="Epidemic containment by immunization")
    _add_dataset(sir, fmt="contact-timestamps")
    sir.add_argument("--checkpoint", type=Path)
    sir.add_argument("--out", type=Path, required=True)
    _add_common(sir)
    _add_config_flags(sir, SirConfig)
    _add_config_flags(sir, EvalConfig, skip=("budget", "method"))

    stats = commands.add_parser("stats", help="Dataset statistics table")
    _add_dataset(stats, many=True)
    stats.add_argument("--out", type=Path, required=True)
    _add_common(stats)
    return parser


def _resolve(model: type[BaseConfig], args: argparse.Namespace) -> Any:
    file_values = load_config_file(args.config) if args.config else {}
    return resolve(model, file_values, vars(args))


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_manifest(
    args: argparse.Namespace,
    started_at: datetime,
    configs: Dict[str, BaseConfig],
    seed: int,
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    default_path: Path,
) -> None:
    manifest = RunManifest(
        command=args.command,
        config={
            "argv": {k: _jsonable(v) for k, v in vars(args).items()},
            **{name: cfg.model_dump(mode="json") for name, cfg in configs.items()},
        },
        seed=seed,
        input_digests={str(path): file_digest(path) for path in inputs},
        outputs=[str(path) for path in outputs],
        version=__version__,
        started_at=started_at,
        finished_at=datetime.now(timezone.utc),
    )
    write_manifest(manifest, args.manifest or default_path)


def _run_gen(args: argparse.Namespace, started_at: datetime) -> None:
    cfg = _resolve(GenConfig, args)
    outputs = []
    for i, G in enumerate(generate_batch(cfg, args.count)):
        path = args.out_dir / f"hypernetwork_{i:04d}.txt"
        save_hyperedge_list(G, path)
        outputs.append(path)
    logger.info("[GEN] wrote %d hypernetworks to %s", len(outputs), args.out_dir)
    _write_manifest(args, started_at, {"gen": cfg}, cfg.seed, [], outputs, args.out_dir / "manifest.json")


def _run_train(args: argparse.Namespace, started_at: datetime) -> None:
    cfg = _resolve(TrainConfig, args)
    gen_cfg = _resolve(GenConfig, args)
    result = train(cfg, gen_cfg, progress=not args.quiet and sys.stderr.isatty())
    meta = {"initial_anc": result.initial_anc, "best_anc": result.best_anc, "updates": result.updates}
    save_checkpoint(result.params, args.checkpoint, meta)
    outputs = [args.checkpoint, args.curve]
    if args.last_checkpoint:
        save_checkpoint(result.last_params, args.last_checkpoint, meta)
        outputs.append(args.last_checkpoint)
    write_table(pd.DataFrame(result.curve, columns=["episode", "anc"]), args.curve)
    logger.info("[TRAIN] best validation ANC %.6f (initial %.6f)", result.best_anc, result.initial_anc)
    _write_manifest(
        args,
        started_at,
        {"train": cfg, "gen": gen_cfg},
        cfg.seed,
        [],
        outputs,
        args.checkpoint.with_suffix(".manifest.json"),
    )


def _context(args: argparse.Namespace, cfg: EvalConfig) -> Context:
    return Context(
        dataset_format=args.dataset_format,
        gcc=args.gcc,
        batch_frac=cfg.batch_frac,
        budget=cfg.budget,
        ci_radius=cfg.ci_radius,
        method=cfg.method,
        seed=cfg.seed,
        params=load_checkpoint(args.checkpoint) if args.checkpoint else None,
    )


def _run_dismantle(args: argparse.Namespace, parser: argparse.ArgumentParser, started_at: datetime) -> None:
    if args.strategy.upper() == "AGENT" and args.checkpoint is None:
        parser.error("--strategy agent requires --checkpoint")
    cfg = _resolve(EvalConfig, args)
    context = _context(args, cfg)
    G, id_map = load_hypernetwork(args.dataset, args.dataset_format, gcc=args.gcc)
    strategy = build_strategy(args.strategy, context)
    trace = dismantle(G, strategy, cfg.batch_frac, budget=cfg.budget, method=cfg.method)
    score = anc(trace)

    frame = pd.DataFrame(
        {
            "step": range(1, len(trace) + 1),
            "removed": [" ".join(str(id_map[v]) for v in batch) for batch in trace.batches],
            "connectivity": trace.connectivity,
        }
    )
    write_table(frame, args.out)
    summary_path = args.summary or args.out.with_name(f"{args.out.stem}_summary.csv")
    summary = pd.DataFrame(
        [{"dataset": args.dataset.stem, "strategy": strategy.name, "batches": len(trace), "anc": score}]
    )
    write_table(summary, summary_path)
    outputs = [args.out, summary_path]
    if args.gcc:
        map_path = args.out.with_name(f"{args.out.stem}_ids.csv")
        save_id_map(id_map, map_path)
        outputs.append(map_path)
    logger.info("[EVAL] %s on %s: ANC %.6f", strategy.name, args.dataset.name, score)
    inputs = [args.dataset] + ([args.checkpoint] if args.checkpoint else [])
    _write_manifest(
        args, started_at, {"eval": cfg}, cfg.seed, inputs, outputs, args.out.with_suffix(".manifest.json")
    )


def _run_eval(args: argparse.Namespace, started_at: datetime) -> None:
    cfg = _resolve(EvalConfig, args)
    gen_cfg = _resolve(GenConfig, args)
    context = _context(args, cfg)
    context.update(mode="eval", synthetic=args.synthetic, gen_config=gen_cfg)
    final = run_pipeline(
        State(datasets=[str(p) for p in args.datasets], strategies=list(cfg.strategies)), context, cfg.threads
    )
    write_table(pd.DataFrame(final["table"]), args.out)
    inputs = list(args.datasets) + ([args.checkpoint] if args.checkpoint else [])
    _write_manifest(
        args,
        started_at,
        {"eval": cfg, "gen": gen_cfg},
        cfg.seed,
        inputs,
        [args.out],
        args.out.with_suffix(".manifest.json"),
    )


def _run_sir(args: argparse.Namespace, started_at: datetime) -> None:
    sir_cfg = _resolve(SirConfig, args)
    cfg = _resolve(EvalConfig, args)
    context = _context(args, cfg)
    context.update(mode="sir", sir_config=sir_cfg)
    final = run_pipeline(State(datasets=[str(args.dataset)], strategies=list(cfg.strategies)), context, cfg.threads)
    write_table(pd.DataFrame(final["table"]), args.out)
    inputs = [args.dataset] + ([args.checkpoint] if args.checkpoint else [])
    _write_manifest(
        args,
        started_at,
        {"sir": sir_cfg, "eval": cfg},
        sir_cfg.seed,
        inputs,
        [args.out],
        args.out.with_suffix(".manifest.json"),
    )


def _run_stats(args: argparse.Namespace, started_at: datetime) -> None:
    rows = []
    for path in args.datasets:
        G, _ = load_hypernetwork(path, args.dataset_format, gcc=args.gcc)
        rows.append({"dataset": path.stem, **summarize(G)})
    write_table(pd.DataFrame(rows), args.out)
    _write_manifest(
        args, started_at, {}, 0, list(args.datasets), [args.out], args.out.with_suffix(".manifest.json")
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("WARNING" if args.quiet else DEFAULT_LOG_LEVEL)
    started_at = datetime.now(timezone.utc)
    try:
        if args.command == "gen":
            _run_gen(args, started_at)
        elif args.command == "train":
            _run_train(args, started_at)
        elif args.command == "dismantle":
            _run_dismantle(args, parser, started_at)
        elif args.command == "eval":
            _run_eval(args, started_at)
        elif args.command == "sir":
            _run_sir(args, started_at)
        else:
            _run_stats(args, started_at)
    except HyperDismantleError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
