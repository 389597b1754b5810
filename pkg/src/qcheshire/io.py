"""Interferogram files (CSV / JSON) and report rendering."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .synth import Interferogram

CSV_HEADER = "chi_rad,counts,sigma"


class DataError(ValueError):
    """Malformed input data; ``line`` is 1-based when known."""

    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


def _fmt(x: float) -> str:
    return repr(float(x))


def format_csv(ifg: Interferogram) -> str:
    counts = ifg.meta.get("kind") == "counts"
    lines = [f"# {k}={ifg.meta[k]}" for k in sorted(ifg.meta)]
    lines.append(CSV_HEADER)
    for c, v, s in zip(ifg.chi, ifg.value, ifg.sigma):
        val = str(int(v)) if counts else _fmt(v)
        lines.append(f"{_fmt(c)},{val},{_fmt(s)}")
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> Interferogram:
    meta: dict[str, str] = {}
    rows: list[tuple[float, float, float]] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise DataError(f"expected header {CSV_HEADER!r}, got {line!r}", lineno)
            header_seen = True
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise DataError(f"expected 3 columns, got {len(cells)}", lineno)
        try:
            row = tuple(float(c) for c in cells)
        except ValueError:
            raise DataError(f"non-numeric cell in row {line!r}", lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise DataError(f"non-finite value in row {line!r}", lineno)
        if row[2] <= 0:
            raise DataError("sigma must be positive", lineno)
        rows.append(row)
    if not header_seen:
        raise DataError(f"missing header {CSV_HEADER!r}")
    if not rows:
        raise DataError("no data rows")
    arr = np.array(rows)
    return Interferogram(arr[:, 0], arr[:, 1], arr[:, 2], meta)


def format_json(ifg: Interferogram) -> str:
    d = {
        "meta": {k: ifg.meta[k] for k in sorted(ifg.meta)},
        "chi_rad": ifg.chi.tolist(),
        "counts": ifg.value.tolist(),
        "sigma": ifg.sigma.tolist(),
    }
    return json.dumps(d, indent=1) + "\n"


def parse_json(text: str) -> Interferogram:
    try:
        d = json.loads(text)
        return Interferogram(d["chi_rad"], d["counts"], d["sigma"], {str(k): str(v) for k, v in d["meta"].items()})
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed interferogram JSON: {exc}") from exc


def write_interferogram(ifg: Interferogram, path, fmt: str = "csv") -> Path:
    path = Path(path)
    text = format_csv(ifg) if fmt == "csv" else format_json(ifg)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def read_interferogram(path) -> Interferogram:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return parse_json(text)
    return parse_csv(text)


def published_values() -> dict:
    with resources.files("qcheshire").joinpath("data/published.json").open(encoding="utf-8") as fh:
        return json.load(fh)


def write_report(report: dict, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return path


def _fmt_cell(v, e) -> str:
    return f"{v:7.4f}({e:.4f})" if e is not None else f"{v:7.4f}"


def render_matrix(title: str, rows, cols, values, errors=None) -> str:
    out = [title, "        " + "".join(f"{c:>18}" for c in cols)]
    for r, label in enumerate(rows):
        cells = "".join(
            f"{_fmt_cell(values[r][c], errors[r][c] if errors is not None else None):>18}" for c in range(len(cols))
        )
        out.append(f"{label:<8}{cells}")
    return "\n".join(out)


def render_text(report: dict) -> str:
    """Human-readable rendering of a report produced by ``qcheshire.reproduce``."""
    lines = [f"target: {report['target']}  mode: {report['mode']}  runs: {report.get('runs', 1)}"]
    for key, block in report.items():
        if not isinstance(block, dict) or "values" not in block or "rows" not in block:
            continue
        lines.append("")
        lines.append(render_matrix(key, block["rows"], block["columns"], block["values"], block.get("errors")))
    if "flags" in report:
        lines.append("")
        lines.append("flags:")
        for name, ok in report["flags"].items():
            lines.append(f"  {name}: {'ok' if ok else 'MISMATCH'}")
    if "scan" in report:
        lines.append("")
        lines.append("current_A  contrast")
        for cur, con in report["scan"]:
            lines.append(f"{cur:9.4f}  {con:.6f}")
    return "\n".join(lines) + "\n"
