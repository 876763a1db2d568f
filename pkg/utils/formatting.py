"""
Output Formatting
Renders result rows as csv, tsv or aligned text, with locale-free number formatting
"""
import csv
import io
import math
from typing import List, Optional, Sequence

HEAVY_TAIL_COMMENT = "# heavy-tail: grid-sensitive"


def format_number(value: float, precision: str = "table", decimals: Optional[int] = None) -> str:
    """
    Locale-independent rendering of one number.

    With precision "full" the shortest round-tripping repr is used. With
    "table", `decimals` fixes the places after the point (SRM values use
    3) and otherwise 6 significant digits are printed.
    """
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    if precision == "full":
        return repr(value)
    if decimals is not None:
        text = f"{value:.{decimals}f}"
        # no "-0.000"
        return text[1:] if text.startswith("-") and float(text) == 0.0 else text
    return f"{value:.6g}"


def render_rows(header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str = "csv",
                comments: Optional[Sequence[Optional[str]]] = None) -> str:
    """
    Render a header plus rows of already formatted cells.

    Args:
        header: column names
        rows: one sequence of strings per row
        fmt: csv, tsv or pretty
        comments: per-row trailing comment, shown in pretty mode only

    Returns:
        Text ending in a newline
    """
    if fmt in ("csv", "tsv"):
        buffer = io.StringIO()
        writer = csv.writer(buffer, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt != "pretty":
        raise ValueError(f"unknown output format {fmt!r}")

    table: List[List[str]] = [list(header)] + [list(row) for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for index, row in enumerate(table):
        cells = [cell.rjust(width) if index else cell.ljust(width) for cell, width in zip(row, widths)]
        line = "  ".join(cells)
        comment = comments[index - 1] if comments and index else None
        if comment:
            line += "  " + comment
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"
