"""Command-line entry point: ``myosub <command> --config run.json``."""

import argparse
import contextlib
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import experiments
from .config import COMMANDS, RunConfig
from .errors import InputError, TrainingError
from .experiments import bandwidth_for
from .generator import TrainConfig, sample_lens
from .io import (
    load_dataset,
    load_model,
    read_lens,
    save_model,
    write_csv,
    write_lens,
    write_loss_history,
)
from .kernel_mmd import KernelSpec, myopicity_test
from .training import train_vgan

log = logging.getLogger("myosub")

THREADS_ENV = "MYOSUB_THREADS"


def _bool(text):
    if text.lower() in ("1", "true", "yes"):
        return True
    if text.lower() in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="myosub", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output path (overrides output_path)")
    parser.add_argument("-v", "--verbose", action="store_true")
    group = parser.add_argument_group("training overrides")
    for f in dataclasses.fields(TrainConfig):
        kind = _bool if f.type in (bool, "bool") else (int if f.type in (int, "int") else float)
        group.add_argument(f"--{f.name}", type=kind, default=None)
    return parser


def resolve_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    cfg.command = args.command
    overrides = {
        f.name: getattr(args, f.name)
        for f in dataclasses.fields(TrainConfig)
        if getattr(args, f.name) is not None
    }
    if overrides:
        cfg.train = dataclasses.replace(cfg.train, **overrides)
    if args.out is not None:
        cfg.output_path = args.out
    return cfg.validate()


def thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{THREADS_ENV} must be positive")
    return value


def _emit(rows, columns, path):
    write_csv(sys.stdout if path is None else path, rows, columns)


def _train(cfg):
    data, _ = load_dataset(cfg.dataset_path)
    spec = KernelSpec(bandwidth_for(data, cfg.kernel_rows, cfg.train.seed))
    result = train_vgan(data, cfg.train, spec)
    save_model(cfg.output_path, result.net, cfg.train, result.kernel, result.autoencoder)
    loss_path = cfg.loss_path or str(Path(cfg.output_path).with_suffix(".loss.csv"))
    write_loss_history(loss_path, result.loss_history)
    log.info("saved model to %s and loss history to %s", cfg.output_path, loss_path)


def _lens_for(cfg):
    if cfg.lens_path is not None:
        return read_lens(cfg.lens_path), None
    model = load_model(cfg.model_path)
    return sample_lens(model["net"], cfg.lens_samples, cfg.train.seed), model["kernel"]


def _sample(cfg):
    lens, _ = _lens_for(cfg)
    log.info("identity mask frequency %.4f", lens.identity_frequency())
    write_lens(sys.stdout if cfg.output_path is None else cfg.output_path, lens)


def _test_myopicity(cfg):
    data, _ = load_dataset(cfg.dataset_path)
    lens, kernel = _lens_for(cfg)
    if kernel is None:
        kernel = KernelSpec(bandwidth_for(data, cfg.kernel_rows, cfg.train.seed))
    result = myopicity_test(data, lens, kernel, cfg.alpha, cfg.num_permutations, cfg.train.seed)
    row = dataclasses.asdict(result)
    _emit([row], list(row), cfg.output_path)


def _od_bench(cfg):
    data, labels = load_dataset(cfg.dataset_path)
    if labels is None:
        raise InputError(f"{cfg.dataset_path}: od-bench needs a 'label' column")
    rows = experiments.run_od_benchmark(
        data,
        labels,
        methods=cfg.methods,
        detectors=(cfg.detector,),
        repetitions=cfg.repetitions,
        train=cfg.train,
        seed=cfg.train.seed,
        k=cfg.k,
        fb_k=cfg.fb_k,
        lens_samples=cfg.lens_samples,
        alpha=cfg.alpha,
        num_permutations=cfg.num_permutations,
        test_rows=cfg.test_rows,
        kernel_rows=cfg.kernel_rows,
        myopicity=cfg.myopicity,
    )
    _emit(rows, experiments.OD_COLUMNS, cfg.output_path)


def _synth_lens(cfg):
    rows = experiments.run_lens_experiment(
        cfg.F_values,
        repetitions=cfg.repetitions,
        n=cfg.n or 10000,
        train=cfg.train,
        seed=cfg.train.seed,
        lens_samples=cfg.lens_samples,
        kernel_rows=cfg.kernel_rows,
    )
    _emit(rows, experiments.LENS_COLUMNS, cfg.output_path)


def _scalability(cfg, cap):
    if cap not in (None, 1):
        raise InputError(f"scalability runs need {THREADS_ENV}=1")
    with threadpool_limits(limits=1):
        rows = experiments.run_scalability(
            cfg.d_values,
            n=cfg.n or 1000,
            train=cfg.train,
            seed=cfg.train.seed,
            time_budget=cfg.time_budget,
        )
    _emit(rows, experiments.SCALABILITY_COLUMNS, cfg.output_path)


HANDLERS = {
    "train": _train,
    "sample": _sample,
    "test-myopicity": _test_myopicity,
    "od-bench": _od_bench,
    "synth-lens": _synth_lens,
}


def run(cfg, cap=None):
    if cfg.command == "scalability":
        _scalability(cfg, cap)
        return
    limit = threadpool_limits(limits=cap) if cap is not None else contextlib.nullcontext()
    with limit:
        HANDLERS[cfg.command](cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        run(cfg, thread_cap())
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"myosub: error: {exc}", file=sys.stderr)
        return 2
    except TrainingError as exc:
        print(f"myosub: training failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
