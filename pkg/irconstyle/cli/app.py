"""
Command-line surface: train, eval, infer, ablate, gradcheck, params, corpus

stdout carries exactly one JSON document per invocation (a result or an
error record); logs go to stderr.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from irconstyle.degradations import parse_degradation, read_png, write_corpus, write_png
from irconstyle.diagnostics import parameter_report, run_gradient_suite
from irconstyle.errors import ConfigError, ConStyleError
from irconstyle.settings import Settings, configure_logging
from irconstyle.trainer import (
    IRConStyleModel,
    TrainConfig,
    TrainState,
    evaluate,
    infer_image,
    load_config,
    run_ablation,
    train,
)
from irconstyle.trainer import checkpoint

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage errors as ConfigError instead of exiting"""

    def error(self, message: str):
        raise ConfigError(message, field="argv")


def _emit(payload: Any) -> None:
    print(json.dumps(payload, sort_keys=True), flush=True)


def _with_seed(cfg: TrainConfig, seed: Optional[int]) -> TrainConfig:
    return cfg if seed is None else cfg.model_copy(update={"seed": seed})


def _run_dir(args: argparse.Namespace, cfg: TrainConfig, settings: Settings, leaf: str) -> Path:
    """--output-dir, then the config, then CONSTYLE_OUTPUT_DIR/<leaf>"""
    return Path(args.output_dir or cfg.output_dir or Path(settings.output_dir) / leaf)


def load_model(ckpt: Optional[str]) -> Optional[IRConStyleModel]:
    """Model restored from a checkpoint; "none" selects pass-through mode"""
    if ckpt is None or ckpt.lower() == "none":
        return None
    model = TrainState.from_checkpoint(checkpoint.load(ckpt)).model
    model.eval()
    return model


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    out = _run_dir(args, cfg, settings, "train")
    state = train(cfg, resume=args.resume, threads=settings.threads, output_dir=out)
    _emit({"iteration": state.iteration, "checkpoint": str(out / "final.ckpt"),
           "loss_log": str(out / "losses.jsonl")})
    return 0


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    spec = parse_degradation(args.sigma)
    report = evaluate(load_model(args.ckpt), args.manifest, spec, seed=args.seed, name=args.name)
    print(report.model_dump_json(), flush=True)
    return 0


def cmd_infer(args: argparse.Namespace, settings: Settings) -> int:
    image = read_png(args.input)
    model = load_model(args.ckpt)
    restored = image if model is None else infer_image(model, image)
    write_png(args.output, restored)
    _emit({"in": str(args.input), "out": str(args.output),
           "height": int(restored.shape[1]), "width": int(restored.shape[2])})
    return 0


def cmd_ablate(args: argparse.Namespace, settings: Settings) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    out = _run_dir(args, cfg, settings, "ablation")
    report = run_ablation(cfg, output_dir=str(out), threads=settings.threads,
                          include_loss_ablations=args.loss_ablations)
    print(report.model_dump_json(), flush=True)
    return 0


def cmd_gradcheck(args: argparse.Namespace, settings: Settings) -> int:
    try:
        results = run_gradient_suite(args.op, seed=args.seed)
    except KeyError as exc:
        raise ConfigError(exc.args[0], field="op") from exc
    passed = all(r["passed"] for r in results.values())
    _emit({"passed": passed, "checks": results})
    return 0 if passed else 1


def cmd_params(args: argparse.Namespace, settings: Settings) -> int:
    cfg = load_config(args.config) if args.config else TrainConfig()
    _emit(parameter_report(_with_seed(cfg, args.seed)))
    return 0


def cmd_corpus(args: argparse.Namespace, settings: Settings) -> int:
    manifest = write_corpus(args.out, count=args.count, size=args.size, seed=args.seed)
    _emit({"manifest": str(manifest), "count": args.count})
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], int]] = {
    "train": cmd_train,
    "eval": cmd_eval,
    "infer": cmd_infer,
    "ablate": cmd_ablate,
    "gradcheck": cmd_gradcheck,
    "params": cmd_params,
    "corpus": cmd_corpus,
}


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="irconstyle", description="ConStyle-guided image restoration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("eval", help="PSNR/SSIM of a checkpoint over a manifest")
    p.add_argument("--ckpt", required=True, help='checkpoint path or "none" for pass-through')
    p.add_argument("--manifest", required=True)
    p.add_argument("--sigma", required=True, help="fixed sigma or lo:hi")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="eval")

    p = sub.add_parser("infer", help="restore a single PNG")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)

    p = sub.add_parser("ablate", help="guideline (and optional loss) ablations")
    p.add_argument("--config", required=True)
    p.add_argument("--loss-ablations", action="store_true")
    p.add_argument("--output-dir", default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    p.add_argument("--op", action="append", default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("params", help="per-module parameter totals")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("corpus", help="write a synthetic PNG corpus and manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=12)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit status"""
    try:
        settings = Settings.from_env()
        configure_logging(settings.log_level)
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, settings)
    except ConStyleError as exc:
        logger.error("%s", exc)
        _emit(exc.to_record())
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        _emit({"error": type(exc).__name__, "message": str(exc), "exit_code": 3})
        return 3
    except Exception as exc:  # noqa: BLE001 - last-resort error line
        logger.exception("unexpected failure")
        _emit({"error": type(exc).__name__, "message": str(exc), "exit_code": 1})
        return 1
