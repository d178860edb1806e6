"""Deterministic CSV emission.

RFC-4180-style: comma separated, '.' decimal separator, one header row.
A single leading comment line records the artifact version, the preset
(or command) that produced the file, and the seed, so every artifact is
self-describing and byte-identical across reruns.
"""

from __future__ import annotations

from . import __version__

__all__ = ["format_cell", "write_csv"]


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.16e}"  # 17 significant digits, scientific
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path: str, columns, rows, *, meta: dict) -> None:
    """Write rows with a comment line carrying ``meta`` key=value pairs."""
    tags = ", ".join(f"{k}={v}" for k, v in meta.items())
    lines = [f"# zenosim {__version__}, {tags}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\r\n".join(lines) + "\r\n")
