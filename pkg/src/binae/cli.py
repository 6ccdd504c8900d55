"""``binae <experiment> [options]``: run an experiment and write its table."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Any

from . import __version__
from .experiments import DRIVERS, EXPERIMENTS, Table, resolve_config

EXIT_OK, EXIT_IO, EXIT_CONFIG = 0, 1, 2


def fmt(value: Any) -> str:
    """Six significant digits for floats; integers and strings as they are."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.6g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        return None if math.isnan(value) else float(fmt(value))
    if hasattr(value, "item"):  # numpy scalar
        return _json_value(value.item())
    return value


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt(_json_value(row[c])) for c in table.columns])
    return buf.getvalue()


def to_json(cfg: dict, table: Table, runtime: float) -> str:
    doc = {
        "config": {k: _json_value(v) for k, v in sorted(cfg.items())},
        "rows": [{c: _json_value(row[c]) for c in table.columns} for row in table.rows],
        "runtime_seconds": round(runtime, 3),
        "version": __version__,
    }
    if table.artifacts:
        doc["config"]["artifacts"] = table.artifacts
    return json.dumps(doc, indent=2) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        out = []
        for part in text.split(","):
            part = part.strip()
            if ":" in part:
                a, b, *step = (int(p) for p in part.split(":"))
                out.extend(range(a, b + 1, step[0] if step else 1))
            elif part:
                out.append(int(part))
        return out
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binae", description="Binary autoencoder experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--nx", type=int, dest="n_x")
    p.add_argument("--ny", type=int, dest="n_y")
    p.add_argument("--ax", type=int, dest="a_x")
    p.add_argument("--aw", type=int, dest="a_w")
    p.add_argument("--model", help="threshold, kwta or bmp; comma-separate several")
    p.add_argument("--decoder", choices=("transpose", "random", "pairwise"))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--values", type=_int_list, help="sweep values, e.g. 1,2,5 or 10:40:5")
    p.add_argument("--samples", type=int, help="random starts per weight draw (attractor-census)")
    p.add_argument("--policy", choices=("fixed", "optimized", "both"),
                   help="decode policy (attractor-census, analytic-compare)")
    p.add_argument("--axr", type=int, help="fixed output count for the decoder MI (mi-curve)")
    p.add_argument("--encoder", choices=("linear", "pairwise"), help="hidden pre-activation (map-curve)")
    p.add_argument("--out", type=Path, help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    overrides = vars(args).copy()
    experiment = overrides.pop("experiment")
    out, form = overrides.pop("out"), overrides.pop("format")
    if overrides.get("decoder") == "random":
        overrides["decoder"] = "independent-random"
    try:
        cfg = resolve_config(experiment, **overrides)
        start = time.perf_counter()
        table = DRIVERS[experiment](cfg)
        runtime = time.perf_counter() - start
    except ValueError as exc:
        print(f"binae: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = to_csv(table) if form == "csv" else to_json(cfg, table, runtime)
    try:
        if out is None:
            sys.stdout.write(text)
        else:
            out.write_text(text, encoding="utf-8", newline="\n")
            if table.artifacts:
                side = out.with_name(out.name + ".counterexamples.json")
                side.write_text(json.dumps(table.artifacts, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"binae: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    stream = sys.stderr if out is None else sys.stdout
    for line in table.summary:
        print(line, file=stream)
    print(f"{experiment}: {len(table.rows)} rows in {runtime:.2f} s", file=stream)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
