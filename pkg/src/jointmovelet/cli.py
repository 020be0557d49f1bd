"""Command-line front end.

Subcommands: ``validate``, ``build-dict``, ``classify``, ``evaluate``, ``run``
and ``export-timeline``. The dataset root in the config can be overridden
with the ``JOINTMOVELET_DATA`` environment variable.

Exit status is 0 on success, 1 when some participant/method failed and 2 for
a bad config, missing dataset or missing artifact.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .classify import classify_series, map_to_accel_timestamps
from .core import ActivityLabel, Mode
from .errors import ArtifactMissing, ConfigInvalid, DatasetMissing, MoveletError
from .evaluate import ActivityGroup, confusion_matrix, group_average_accuracy, format_group_tables
from .ingest import dataset_root, load_step, load_training
from .pipeline import (
    build_dictionary,
    dictionary_from_dict,
    dictionary_to_dict,
    dump_json,
    load_config,
    read_timeline,
    run_experiment,
    timeline_to_dict,
    write_artifacts,
)

log = logging.getLogger("jointmovelet")


def _config(args, **overrides):
    cfg = load_config(args.config, **overrides)
    env_root = dataset_root()
    if env_root is not None:
        cfg = dataclasses.replace(cfg, dataset_root=env_root)
    if not cfg.dataset_root.is_dir():
        raise DatasetMissing(f"dataset root not found: {cfg.dataset_root}")
    return cfg


def _write(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def cmd_validate(args) -> int:
    cfg = _config(args, participants=args.participants)
    failures = 0
    for p in cfg.participants:
        counts: dict = {}
        try:
            recs = [load_training(cfg.dataset_root, p, **cfg.recording_kwargs(gyro=True))]
            for step in cfg.steps:
                rec = load_step(cfg.dataset_root, p, step, **cfg.recording_kwargs(gyro=True))
                recs.append(rec)
                for label, k in rec.accel.counts().items():
                    counts[label] = counts.get(label, 0) + k
        except MoveletError as exc:
            failures += 1
            print(f"participant {p}: FAILED {type(exc).__name__}: {exc}")
            continue
        summary = ", ".join(f"{label.value}={counts.get(label, 0)}" for label in ActivityLabel)
        print(f"participant {p}: ok ({len(recs)} recordings) {summary}")
    return 1 if failures else 0


def cmd_build_dict(args) -> int:
    cfg = _config(args)
    mode = Mode.parse(args.mode)
    training = load_training(cfg.dataset_root, args.participant,
                             **cfg.recording_kwargs(gyro=mode is not Mode.ACCEL))
    d = build_dictionary(training, mode, person=args.participant, window=cfg.window,
                         training_seconds=cfg.training_seconds)
    _write(args.output, dump_json({"config_hash": cfg.config_hash, **dictionary_to_dict(d, mode)}))
    return 0


def cmd_classify(args) -> int:
    cfg = _config(args)
    mode = Mode.parse(args.mode)
    kwargs = cfg.recording_kwargs(gyro=mode is not Mode.ACCEL)
    if args.dictionary:
        path = Path(args.dictionary)
        if not path.is_file():
            raise ArtifactMissing(f"dictionary artifact not found: {path}")
        d = dictionary_from_dict(json.loads(path.read_text()))
    else:
        training = load_training(cfg.dataset_root, args.participant, **kwargs)
        d = build_dictionary(training, mode, person=args.participant, window=cfg.window,
                             training_seconds=cfg.training_seconds)
    rec = load_step(cfg.dataset_root, args.participant, args.step, **kwargs)
    tl = classify_series(rec, d, mode, cfg.vote_window)
    if mode is Mode.GYRO:
        tl = map_to_accel_timestamps(tl, rec.accel.timestamps, rec.accel.labels)
    meta = {"config_hash": cfg.config_hash, "participant": args.participant,
            "mode": mode.value, "step": args.step}
    _write(args.output, dump_json(timeline_to_dict(tl, **meta)))
    return 0


def cmd_evaluate(args) -> int:
    timelines = [read_timeline(p) for p in args.timelines]
    cm = confusion_matrix(timelines)
    groups = {}
    for g in ActivityGroup:
        try:
            groups[g.value] = round(group_average_accuracy(cm, g), 6)
        except MoveletError:
            groups[g.value] = None
    if args.text:
        lines = [cm.to_text(), ""]
        lines += [f"{g:<12}{'-' if v is None else f'{v:.1f}':>8}" for g, v in groups.items()]
        _write(args.output, "\n".join(lines) + "\n")
    else:
        _write(args.output, dump_json({**cm.to_dict(), "group_accuracy": groups}))
    return 0


def cmd_run(args) -> int:
    overrides = {"participants": args.participants, "modes": args.modes}
    if args.workers:
        overrides["workers"] = args.workers
    cfg = _config(args, **overrides)
    result = run_experiment(cfg)
    written = write_artifacts(result, args.out)
    tables = {p: pr.groups for p, pr in result.participants.items() if pr.modes}
    if tables:
        print(format_group_tables(tables))
    print(f"wrote {len(written)} files to {args.out} (config {cfg.config_hash})")
    for err in result.errors:
        print(f"error: {err}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_export_timeline(args) -> int:
    tl = read_timeline(args.timeline)
    if args.format == "json":
        text = dump_json(timeline_to_dict(tl))
    else:
        rows = ["elapsed_seconds\ttruth\tpredicted"]
        for t, g, p in zip(tl.timestamps, tl.truth, tl.predicted):
            rows.append(f"{t:.6f}\t{'unlabeled' if g is None else g.value}\t{p.value}")
        text = "\n".join(rows) + "\n"
    _write(args.output, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jointmovelet", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", "-c", required=True, help="INI experiment config")
        return p

    p = with_config(sub.add_parser("validate", help="parse and check every configured file"))
    p.add_argument("--participants", type=lambda s: tuple(s.split(",")))
    p.set_defaults(func=cmd_validate)

    p = with_config(sub.add_parser("build-dict", help="build one participant's dictionary"))
    p.add_argument("--participant", required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_build_dict)

    p = with_config(sub.add_parser("classify", help="classify one test step"))
    p.add_argument("--participant", required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--dictionary", help="dictionary JSON from build-dict")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="confusion matrix of timeline artifacts")
    p.add_argument("timelines", nargs="+")
    p.add_argument("--text", action="store_true", help="aligned text instead of JSON")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_evaluate)

    p = with_config(sub.add_parser("run", help="run every participant and method"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--participants", type=lambda s: tuple(s.split(",")))
    p.add_argument("--modes", type=lambda s: tuple(s.split(",")))
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("export-timeline", help="timeline as plot-ready TSV or JSON")
    p.add_argument("timeline")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_export_timeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigInvalid, DatasetMissing, ArtifactMissing) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except MoveletError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
