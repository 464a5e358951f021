"""Deterministic CSV and JSON rendering for CLI outputs.

CSV files carry a `# key = value` metadata block (tool banner, scenario echo,
run summaries) above a single header row and data rows; every float cell is
written with 17 significant digits so files round-trip exactly. JSON reports
keep insertion order and rely on shortest-repr floats for the same property.
"""

from __future__ import annotations

import json
import sys

from . import __version__


def fmt_float(x: float) -> str:
    """Fixed-width scientific cell: 17 significant digits, lowercase e."""
    return format(float(x), ".16e")


def meta_repr(value) -> str:
    """Lossless single-line rendering for `# key = value` metadata."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(repr(float(c)) for c in value)
    return str(value)


def cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def render_csv(meta: dict, columns: list[str], rows) -> str:
    """Assemble a full CSV document; `meta` keys keep insertion order."""
    lines = [f"# armdyn {__version__}"]
    for key, value in meta.items():
        lines.append(f"# {key} = {meta_repr(value)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(cell(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def json_doc(scenario_echo: dict, body: dict) -> dict:
    doc: dict = {"tool": "armdyn", "version": __version__,
                 "scenario": scenario_echo}
    doc.update(body)
    return doc


def complex_pair(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def state_doc(s) -> dict:
    return {"theta1": float(s[0]), "p1": float(s[1]),
            "theta2": float(s[2]), "p2": float(s[3])}


def emit(text: str, out: str | None) -> None:
    """Write to the output path, or stdout when no path was given."""
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def load_report(path: str) -> dict:
    """Load a JSON report produced by :func:`render_json`."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
