"""Command line interface.

    semlink sweep  [--config FILE] [--ebno GRID] [--channel KINDS] ...
    semlink single [--sentence TEXT] [--ebno DB] [--channel KIND] ...

Config files are flat ``key = value`` lines (# comments allowed) using the
same keys as the flags; flags override file values.  Grid syntax is either
a comma list ("0,2,4.5") or an inclusive range "start:stop:step".
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .core import LinkError, ParameterError
from .sweep import (
    DEFAULT_GRID,
    SweepConfig,
    format_csv,
    run_sweep,
    single_report,
    write_csv,
)


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse "a,b,c" or "start:stop:step" (inclusive) into a float tuple."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"range grid must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ParameterError(f"non-numeric grid bound in {text!r}") from None
        if step <= 0:
            raise ParameterError(f"grid step must be positive, got {step}")
        values = []
        current = start
        # Half-step slack keeps the inclusive endpoint robust to float drift.
        while current <= stop + step * 1e-9:
            values.append(round(current, 9))
            current += step
        if not values:
            raise ParameterError(f"empty grid from {text!r}")
        return tuple(values)
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ParameterError(f"non-numeric grid entry in {text!r}") from None


_BOOL_KEYS = {"semantic"}
_INT_KEYS = {"trials_per_point", "seed", "workers", "bleu_max_n"}


def read_config_file(path: str) -> dict:
    """Flat key=value config file -> dict of SweepConfig fields."""
    valid = {f.name for f in dataclasses.fields(SweepConfig)}
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key or not value:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            if key not in valid:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, value)
    return values


def _coerce(key: str, value: str):
    if key == "ebno_grid_db":
        return parse_grid(value)
    if key == "channels":
        return tuple(c.strip() for c in value.split(",") if c.strip())
    if key in _BOOL_KEYS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ParameterError(f"boolean key {key} got {value!r}")
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise ParameterError(f"integer key {key} got {value!r}") from None
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--codec", help="reference or external:HOST:PORT")
    parser.add_argument("--seed", type=int, help="global seed")
    parser.add_argument("--decoder", help="sc, scl:L, or scl:L:crc11|crc24")
    parser.add_argument("--sanitize", choices=("clamp", "raw"),
                        help="receive-side float repair policy")
    parser.add_argument("--fmt", choices=("fp32", "fixed16"),
                        help="tensor serialization format")
    parser.add_argument("--sentences", dest="sentences_file",
                        help="corpus file, one sentence per line")
    parser.add_argument("--semantic", action="store_true", default=None,
                        help="also score embedding similarity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semlink",
        description="link-level simulator for semantic text transmission")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a (channel x Eb/N0) grid sweep")
    _add_common(sweep)
    sweep.add_argument("--ebno", help='grid: "0,2,4" or "0:14:2" (inclusive)')
    sweep.add_argument("--channel", help="comma list of awgn,rayleigh")
    sweep.add_argument("--trials", type=int, help="trials per grid cell")
    sweep.add_argument("--workers", type=int, help="parallel worker processes")
    sweep.add_argument("--out", help="CSV output path (default stdout)")

    single = sub.add_parser("single", help="transmit one sentence and report")
    _add_common(single)
    single.add_argument("--sentence", help="text to send (default: first corpus line)")
    single.add_argument("--ebno", type=float, default=10.0, help="Eb/N0 in dB")
    single.add_argument("--channel", default="awgn", choices=("awgn", "rayleigh"))
    return parser


_FLAG_TO_FIELD = {
    "codec": "codec", "seed": "seed", "decoder": "decoder",
    "sanitize": "sanitize", "fmt": "fmt", "sentences_file": "sentences_file",
    "semantic": "semantic", "trials": "trials_per_point", "workers": "workers",
    "out": "out",
}


def _config_from_args(args: argparse.Namespace) -> SweepConfig:
    values: dict = {}
    if args.config:
        values.update(read_config_file(args.config))
    for flag, fieldname in _FLAG_TO_FIELD.items():
        flag_value = getattr(args, flag, None)
        if flag_value is not None:
            values[fieldname] = flag_value
    if args.command == "sweep":
        if getattr(args, "ebno", None):
            values["ebno_grid_db"] = parse_grid(args.ebno)
        if getattr(args, "channel", None):
            values["channels"] = tuple(
                c.strip() for c in args.channel.split(",") if c.strip())
    return SweepConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "sweep":
            rows = run_sweep(config)
            if config.out:
                write_csv(rows, config.out)
                print(f"wrote {len(rows)} rows to {config.out}")
            else:
                sys.stdout.write(format_csv(rows))
        else:
            report = single_report(config, args.sentence, args.channel, args.ebno)
            _print_single(report)
    except (LinkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _print_single(report) -> None:
    print(f"channel:      {report.channel} @ {report.ebno_db} dB (seed {report.seed})")
    print(f"sent:         {report.sentence_in}")
    print(f"received:     {report.sentence_out}")
    print(f"blocks:       {report.blocks_errored}/{report.blocks_total} errored")
    print(f"bit errors:   {report.bits_errored}/{report.bits_total} "
          f"(ber {report.bits_errored / max(report.bits_total, 1):.3e})")
    per_n = report.scores.bleu_per_n
    orders = " ".join(f"{n}:{per_n[n]:.4f}" for n in sorted(per_n))
    print(f"bleu:         {orders}")
    print(f"composite:    {report.scores.bleu_composite:.4f}")
    if report.scores.semantic_similarity is not None:
        print(f"semantic sim: {report.scores.semantic_similarity:.4f}")


if __name__ == "__main__":
    sys.exit(main())
