"""Command-line front end: score, batch, compare, curve.

Every invocation must name an explicit mode (nb-raw, nb-lqo, wb, wb-c2); the
mode string is embedded in all outputs so results stay attributable to a
specific version.  Exit codes: 0 success, 1 scoring/runtime error, 2 flag
errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .compare import batch_score, compare, read_manifest, scatter_csv
from .config import MODES, PesqConfig, mode_provenance
from .mos_mapping import NB_KIND, WB_KIND, curve_csv
from .multichannel import STRATEGIES, score_multichannel
from .signal_io import read_wav

_STEREO_FLAGS = {
    "dmx": "mono-dmx",
    "avg": "avg-scores",
    "per-channel": "per-channel",
    "interleave": "interleave",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="pesqkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score one reference/degraded pair")
    score.add_argument("--ref", required=True, help="reference WAV path")
    score.add_argument("--deg", required=True, help="degraded WAV path")
    score.add_argument("--rate", required=True, type=int, choices=(8000, 16000))
    score.add_argument("--mode", required=True, choices=MODES)
    score.add_argument("--stereo", choices=sorted(_STEREO_FLAGS), default="dmx")
    score.add_argument("--format", choices=("text", "json"), default="text")

    batch = sub.add_parser("batch", help="score a ref,deg manifest CSV")
    batch.add_argument("--manifest", required=True)
    batch.add_argument("--rate", required=True, type=int, choices=(8000, 16000))
    batch.add_argument("--mode", required=True, choices=MODES)
    batch.add_argument("--stereo", choices=sorted(_STEREO_FLAGS), default="dmx")
    batch.add_argument("--out", required=True, help="per-item scores CSV to write")

    cmp_p = sub.add_parser("compare", help="difference statistics of two score CSVs")
    cmp_p.add_argument("--a", required=True, help="first scores CSV (from batch)")
    cmp_p.add_argument("--b", required=True, help="second scores CSV (from batch)")
    cmp_p.add_argument("--scatter", help="optional scatter CSV to write")
    cmp_p.add_argument("--report", help="optional JSON report to write")

    curve = sub.add_parser("curve", help="emit a raw-to-MOS mapping curve CSV")
    curve.add_argument("--kind", required=True, choices=("nb", "wb"))
    curve.add_argument("--out", help="output CSV (default: stdout)")
    return parser


def _mode_config(args) -> PesqConfig:
    try:
        return PesqConfig.from_mode(args.mode, args.rate)
    except ValueError as exc:
        # invalid flag combination, e.g. wideband at 8 kHz
        print(f"pesqkit: error: {exc}", file=sys.stderr)
        raise SystemExit(2) from exc


def _run_score(args) -> int:
    cfg = _mode_config(args)
    strategy = _STEREO_FLAGS[args.stereo]
    try:
        ref = read_wav(args.ref)
        deg = read_wav(args.deg)
        result = score_multichannel(ref, deg, cfg, strategy)
    except (OSError, ValueError) as exc:
        print(f"pesqkit: error: {exc}", file=sys.stderr)
        return 1

    if args.format == "json":
        payload = {
            "mode": result.mode,
            "provenance": mode_provenance(result.mode),
            "strategy": result.strategy,
            "score": result.score,
        }
        if result.per_channel is not None:
            payload["per_channel"] = result.per_channel
        print(json.dumps(payload))
    else:
        if result.per_channel is not None:
            channels = " ".join(f"{s:.3f}" for s in result.per_channel)
            print(f"{result.score:.3f} [{result.mode}/{result.strategy}] channels: {channels}")
        else:
            print(f"{result.score:.3f} [{result.mode}/{result.strategy}]")
    return 0


def _run_batch(args) -> int:
    cfg = _mode_config(args)
    strategy = _STEREO_FLAGS[args.stereo]
    try:
        pairs = read_manifest(args.manifest)
    except (OSError, ValueError) as exc:
        print(f"pesqkit: error: {exc}", file=sys.stderr)
        return 1

    result = batch_score(pairs, cfg, strategy)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ref", "deg", "mode", "score"])
        for item in result.items:
            score = "" if item.score is None else repr(item.score)
            writer.writerow([item.ref, item.deg, cfg.mode, score])

    ok = len(result.scores)
    failed = len(result.failures)
    for item in result.failures:
        print(f"pesqkit: failed {item.ref} vs {item.deg}: {item.error}", file=sys.stderr)
    print(f"{ok} scored, {failed} failed [{cfg.mode}] -> {args.out}")
    return 0 if ok > 0 else 1


def _read_scores_csv(path) -> tuple[list[str], list[float | None]]:
    labels, scores = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "score" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a CSV with a 'score' column")
        for i, row in enumerate(reader):
            text = (row["score"] or "").strip()
            labels.append(row.get("deg") or row.get("ref") or str(i))
            scores.append(float(text) if text else None)
    return labels, scores


def _run_compare(args) -> int:
    try:
        labels_a, a = _read_scores_csv(args.a)
        _, b = _read_scores_csv(args.b)
        if len(a) != len(b):
            raise ValueError(f"mismatched score files: {len(a)} vs {len(b)} rows")
        # failed items (empty score on either side) pair up positionally and
        # are excluded from the statistics, not zero-filled
        kept = [(la, x, y) for la, x, y in zip(labels_a, a, b)
                if x is not None and y is not None]
        failures = len(a) - len(kept)
        labels = [la for la, _, _ in kept]
        a = [x for _, x, _ in kept]
        b = [y for _, _, y in kept]
        stats = compare(a, b)
    except (OSError, ValueError) as exc:
        print(f"pesqkit: error: {exc}", file=sys.stderr)
        return 1

    report = dict(stats.to_dict())
    report["failures"] = failures
    text = json.dumps(report)
    print(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    if args.scatter:
        with open(args.scatter, "w") as fh:
            fh.write(scatter_csv(a, b, labels))
    return 0


def _run_curve(args) -> int:
    kind = NB_KIND if args.kind == "nb" else WB_KIND
    text = curve_csv(kind)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "score": _run_score,
        "batch": _run_batch,
        "compare": _run_compare,
        "curve": _run_curve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
