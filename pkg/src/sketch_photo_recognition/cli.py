"""
Command line interface.

Every subcommand returns a process exit code: 0 success, 2 config error,
3 data error, 4 numeric error, 1 anything unexpected.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import torch

from .config.settings import AppConfig, ConfigLoader
from .config.presets import get_preset_description, get_preset_names
from .data.images import align_image, center_crop, from_tensor, load_image, save_image, to_tensor
from .data.manifest import Manifest, load_manifest
from .data.toy_dataset import ToyDatasetSpec, generate_toy_dataset
from .evaluation import (
    cross_partition_eval,
    export_report,
    fixed_model_factory,
    pipeline_model_factory,
    report_means,
    write_sweep_csv,
)
from .graph import train_pipeline
from .networks.serialization import load_model, read_payload
from .training.checkpoint import Checkpoint
from .utils.exception_handler import ConfigError, CropSizeError, safe_execute
from .utils.logging_utils import WorkflowLogger


# configuration


def _load_config(args: argparse.Namespace, base: Optional[AppConfig] = None) -> AppConfig:
    """Effective config: preset/file/overrides, or a checkpoint's config plus overrides."""
    if base is not None and not args.config and not args.preset:
        config = base
        for text in args.overrides:
            key, value = ConfigLoader.parse_override(text)
            config = ConfigLoader.with_override(config, key, value)
        if args.seed is not None:
            config = ConfigLoader.with_override(config, "seed", args.seed)
    else:
        config = ConfigLoader.load(args.config, args.preset, args.overrides, args.seed)
    if args.output_dir:
        config = ConfigLoader.with_override(config, "output_dir", args.output_dir)
    if getattr(args, "steps", None):
        config = ConfigLoader.with_override(config, "eval.steps", parse_step_arg(args.steps))
    WorkflowLogger.print_config(ConfigLoader.dump(config))
    return config


def parse_step_arg(text: str) -> List[int]:
    if text == "all":
        return [1, 2, 3]
    try:
        steps = sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError:
        raise ConfigError(f"--step must be 'all' or a comma list of 1, 2, 3; got '{text}'")
    if not steps or any(s not in (1, 2, 3) for s in steps):
        raise ConfigError(f"--step must be 'all' or a comma list of 1, 2, 3; got '{text}'")
    return steps


def parse_eyes(text: str):
    try:
        lx, ly, rx, ry = (float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"--eyes must be 'lx,ly,rx,ry'; got '{text}'")
    return (lx, ly), (rx, ry)


def _manifest_or_config(path: Optional[str], config_path: Optional[str], what: str) -> Manifest:
    path = path or config_path
    if not path:
        raise ConfigError(f"No {what} manifest given on the command line or in the config")
    return load_manifest(path)


def _optional_manifest(path: Optional[str], config_path: Optional[str]) -> Optional[Manifest]:
    path = path or config_path
    return load_manifest(path) if path else None


# commands


@safe_execute("gen-data")
def _cmd_gen_data(args: argparse.Namespace) -> int:
    WorkflowLogger.print_header("🎨 TOY DATASET GENERATION")
    spec = ToyDatasetSpec(
        n_identities=args.identities,
        images_per_identity=args.per_id,
        image_size=args.size,
        seed=args.seed,
        identity_offset=args.identity_offset,
        photo_only=args.photo_only,
    )
    manifest = generate_toy_dataset(spec, Path(args.output), force=args.force)
    WorkflowLogger.print_success(f"Wrote {len(manifest.records)} images; manifest at {manifest.path}")
    return 0


@safe_execute("train")
def _cmd_train(args: argparse.Namespace) -> int:
    WorkflowLogger.print_header("🏋️ THREE-STEP TRAINING")
    steps = parse_step_arg(args.step)
    resume = Checkpoint.load(args.resume) if args.resume else None
    if steps[0] > 1 and resume is None and not args.allow_fresh:
        raise ConfigError(
            f"Entering the pipeline at step {steps[0]} needs --resume CHECKPOINT "
            f"(or --allow-fresh to start from fresh parameters)"
        )
    config = _load_config(args, base=resume.config if resume else None)
    checkpoint = train_pipeline(config, steps, resume=resume, output_dir=config.output_dir)
    WorkflowLogger.print_summary({
        "final step": checkpoint.step,
        "checkpoint": checkpoint.path or "not saved",
        "AdaCos scale": f"{float(checkpoint.model.adacos.scale):.4f}",
    })
    return 0


def _same_file(a: Optional[str], b: Optional[str]) -> bool:
    return bool(a and b) and Path(a).resolve() == Path(b).resolve()


def _model_factory(config: AppConfig, checkpoint: Optional[Checkpoint], dataset: Manifest, output_dir: Path):
    """Model factory for eval plus the notes it adds to the report."""
    if checkpoint is None:
        return pipeline_model_factory(config, None, output_dir), []
    if checkpoint.step == 2 and checkpoint.is_complete:
        return pipeline_model_factory(config, checkpoint, output_dir), []

    trained_on = checkpoint.config.data.target_manifest
    if _same_file(dataset.path, trained_on):
        raise ConfigError(
            f"The step-{checkpoint.step} model in {checkpoint.path} was trained on {trained_on}; "
            f"scoring it there counts training identities. Pass --manifest with disjoint identities, "
            f"or a step-2 checkpoint to train step 3 per partition"
        )
    note = (f"fixed step-{checkpoint.step} model {checkpoint.path}: partition train identities unused, "
            f"target identities assumed disjoint from its training data")
    WorkflowLogger.print_warning(note)
    return fixed_model_factory(checkpoint.model), [note]


def _sweep_values(param: str, text: str) -> list:
    """Comma-separated values, or ';'-separated when values are lists such as eval.steps."""
    parts = text.split(";") if ";" in text else text.split(",")
    return [ConfigLoader.parse_override(f"{param}={part.strip()}")[1] for part in parts if part.strip()]


def _value_label(value) -> str:
    if isinstance(value, (list, tuple)):
        return "+".join(str(v) for v in value)
    return str(value)


@safe_execute("eval")
def _cmd_eval(args: argparse.Namespace) -> int:
    WorkflowLogger.print_header("🔎 CROSS-MODAL IDENTIFICATION")
    checkpoint = Checkpoint.load(args.checkpoint) if args.checkpoint else None
    config = _load_config(args, base=checkpoint.config if checkpoint else None)
    dataset = _manifest_or_config(args.manifest, config.data.target_manifest, "target")
    distractors = _optional_manifest(args.distractors, config.data.distractor_manifest)
    partitions = args.partitions or config.eval.partitions

    output_dir = Path(config.output_dir) / "eval"
    factory, notes = _model_factory(config, checkpoint, dataset, output_dir / "runs")
    report = cross_partition_eval(
        dataset,
        factory,
        n_partitions=partitions,
        split=(config.eval.train_count, config.eval.test_count),
        seed=config.seed,
        ranks=config.eval.ranks,
        distractors=distractors,
        config=config,
        notes=notes,
    )
    csv_path, summary_path = export_report(report, output_dir)
    WorkflowLogger.print_rank_table(report.ranks, report_means(report), {k: report.std(k) for k in report.ranks})
    WorkflowLogger.print_summary({
        "gallery size": report.gallery_size,
        "distractors": report.n_distractors,
        "CMC": csv_path,
        "summary": summary_path,
    })
    return 0


@safe_execute("sweep")
def _cmd_sweep(args: argparse.Namespace) -> int:
    WorkflowLogger.print_header("🔁 PARAMETER SWEEP", args.param)
    base = _load_config(args)
    values = _sweep_values(args.param, args.values)
    # validates the path before any training
    ConfigLoader.with_override(base, args.param, values[0])

    step2 = Checkpoint.load(args.checkpoint) if args.checkpoint else None
    dataset = _manifest_or_config(args.manifest, base.data.target_manifest, "target")
    distractors = _optional_manifest(args.distractors, base.data.distractor_manifest)
    partitions = args.partitions or base.eval.partitions
    sweep_dir = Path(base.output_dir) / "sweep"

    rows = []
    for value in values:
        WorkflowLogger.print_section(f"{args.param} = {value}")
        config = ConfigLoader.with_override(base, args.param, value)
        run_dir = sweep_dir / f"{args.param}={_value_label(value)}"
        report = cross_partition_eval(
            dataset,
            pipeline_model_factory(config, step2, run_dir),
            n_partitions=partitions,
            split=(config.eval.train_count, config.eval.test_count),
            seed=config.seed,
            ranks=config.eval.ranks,
            distractors=distractors,
            config=config,
        )
        export_report(report, run_dir)
        rows.append((_value_label(value), report))
        WorkflowLogger.print_sweep_row(args.param, value, report_means(report))

    path = write_sweep_csv(rows, base.eval.ranks, sweep_dir / "comparison.csv")
    WorkflowLogger.print_success(f"Comparison table written to {path}")
    return 0


@safe_execute("synthesize")
def _cmd_synthesize(args: argparse.Namespace) -> int:
    """The direction must match the input modality; this cannot be checked."""
    model = load_model(Path(args.checkpoint))
    data = model.config.data
    if args.direction == "photo2sketch":
        channels, generator = data.photo_channels, model.gen_sketch
    else:
        channels, generator = data.sketch_channels, model.gen_photo

    image = load_image(Path(args.input), channels=channels)
    if args.eyes:
        left, right = parse_eyes(args.eyes)
        image = align_image(image, left, right, data.canonical_eyes, data.initial_size)
    if image.shape[0] != image.shape[1] or image.shape[0] < data.image_size:
        raise CropSizeError(
            f"Input is {image.shape[1]}×{image.shape[0]}; expected a square of at least {data.image_size} "
            f"(pass --eyes to align it)"
        )
    image = center_crop(image, data.image_size)

    model.eval()
    with torch.no_grad():
        synthesized = generator(model.encode(to_tensor(image).unsqueeze(0)))[0]
    save_image(from_tensor(synthesized), Path(args.output))
    WorkflowLogger.print_success(f"{args.direction} image written to {args.output}")
    return 0


@safe_execute("inspect")
def _cmd_inspect(args: argparse.Namespace) -> int:
    path = Path(args.checkpoint)
    payload = read_payload(path)
    if "step" in payload:
        checkpoint = Checkpoint.load(path)
        metadata, model = checkpoint.metadata(), checkpoint.model
    else:
        model = load_model(path)
        metadata = {"model file": path.name, "identities (AdaCos)": model.adacos.n_classes}
    WorkflowLogger.print_checkpoint_table(metadata, model.tensor_shapes())
    return 0


# parser


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="YAML config file")
    parser.add_argument("--preset", type=str, default=None, choices=get_preset_names(),
                        help="; ".join(f"{n}: {get_preset_description(n)}" for n in get_preset_names()))
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="Dotted config override, repeatable (e.g. train.step3.weights.lambda_w=0.5)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output-dir", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchrec",
        description="Sketch-photo synthesis and cross-modal face recognition",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-data", help="Generate a procedural toy photo/sketch dataset")
    p_gen.add_argument("--identities", type=int, required=True)
    p_gen.add_argument("--per-id", type=int, default=1, help="Views per identity and modality")
    p_gen.add_argument("--size", type=int, default=64)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--identity-offset", type=int, default=0)
    p_gen.add_argument("--photo-only", action="store_true")
    p_gen.add_argument("--output", type=str, required=True)
    p_gen.add_argument("--force", action="store_true", help="Replace an existing dataset in --output")
    p_gen.set_defaults(func=_cmd_gen_data)

    p_train = sub.add_parser("train", help="Run training steps")
    _add_config_options(p_train)
    p_train.add_argument("--step", type=str, default="all", help="'all' or a comma list such as 2,3")
    p_train.add_argument("--resume", type=str, default=None, help="Checkpoint to resume or start from")
    p_train.add_argument("--allow-fresh", action="store_true",
                         help="Allow entering after step 1 without a checkpoint")
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("eval", help="Cross-partition identification and report export")
    _add_config_options(p_eval)
    p_eval.add_argument("--checkpoint", type=str, default=None,
                        help="Step-2 checkpoint (step 3 runs per partition) or a trained model")
    p_eval.add_argument("--manifest", type=str, default=None, help="Target manifest")
    p_eval.add_argument("--distractors", type=str, default=None, help="Distractor photo manifest")
    p_eval.add_argument("--partitions", type=int, default=None)
    p_eval.add_argument("--steps", type=str, default=None,
                        help="Training steps per partition, 'all' or a comma list such as 2,3 (eval.steps)")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="Train and evaluate once per value of one parameter")
    _add_config_options(p_sweep)
    p_sweep.add_argument("--param", type=str, required=True, help="Dotted config path")
    p_sweep.add_argument("--values", type=str, required=True,
                         help="Comma-separated values; separate with ';' when values are lists ('[2,3];[3]')")
    p_sweep.add_argument("--checkpoint", type=str, default=None, help="Shared step-2 checkpoint")
    p_sweep.add_argument("--manifest", type=str, default=None)
    p_sweep.add_argument("--distractors", type=str, default=None)
    p_sweep.add_argument("--partitions", type=int, default=None)
    p_sweep.add_argument("--steps", type=str, default=None, help="Training steps per partition (eval.steps)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_syn = sub.add_parser("synthesize", help="Synthesize a sketch from a photo or a photo from a sketch")
    p_syn.add_argument("--checkpoint", type=str, required=True)
    p_syn.add_argument("--input", type=str, required=True)
    p_syn.add_argument("--output", type=str, required=True)
    p_syn.add_argument("--direction", choices=["photo2sketch", "sketch2photo"], required=True)
    p_syn.add_argument("--eyes", type=str, default=None, help="Eye centers 'lx,ly,rx,ry' to align the input")
    p_syn.set_defaults(func=_cmd_synthesize)

    p_inspect = sub.add_parser("inspect", help="Print checkpoint metadata and tensor shapes")
    p_inspect.add_argument("checkpoint", type=str)
    p_inspect.set_defaults(func=_cmd_inspect)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
