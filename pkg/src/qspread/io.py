"""Plain-text serialization for matrices, spreads, and point sets.

Matrix text: one line per row, one symbol per coordinate (element index
into the documented field enumeration).  Fields of order at most ten use
concatenated single digits; larger orders separate indices with spaces.
A spread file starts with the header line ``q v k n`` followed by the n
member matrices separated by blank lines.  A point-set file starts with
``q v n`` followed by n coordinate rows; a point of multiplicity m
appears on m consecutive rows.  The filename ``-`` means stdin/stdout.
"""

import sys

from .errors import InconsistentInput
from .geometry import PointSet, Subspace, normalize_point
from .gf import field_new
from .spreads import PartialSpread

__all__ = [
    "format_point_set",
    "format_spread",
    "format_subspace",
    "format_vector",
    "parse_point_set",
    "parse_spread",
    "read_text",
    "write_text",
]


def format_vector(field, vec) -> str:
    if field.q <= 10:
        return "".join(str(c) for c in vec)
    return " ".join(str(c) for c in vec)


def _parse_row(line: str) -> tuple[int, ...]:
    if " " in line:
        return tuple(int(tok) for tok in line.split())
    return tuple(int(ch) for ch in line)


def format_subspace(sub: Subspace) -> str:
    return "\n".join(format_vector(sub.field, row) for row in sub.matrix)


def format_spread(spread: PartialSpread) -> str:
    head = f"{spread.field.q} {spread.v} {spread.k} {spread.size}"
    blocks = [format_subspace(member) for member in spread.members]
    return "\n\n".join([head] + blocks) + "\n"


def _header_ints(line: str, count: int, what: str) -> tuple[int, ...]:
    parts = line.split()
    if len(parts) != count:
        raise InconsistentInput(
            f"{what} header needs {count} integers, got {line!r}"
        )
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise InconsistentInput(f"non-integer in {what} header: {line!r}") from None


def parse_spread(text: str) -> PartialSpread:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise InconsistentInput("empty spread file")
    q, v, k, n = _header_ints(lines[0], 4, "spread")
    field = field_new(q)
    blocks: list[list[tuple[int, ...]]] = []
    current: list[tuple[int, ...]] = []
    for line in lines[1:]:
        line = line.strip()
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        row = _parse_row(line)
        if len(row) != v:
            raise InconsistentInput(f"row width {len(row)} does not match v={v}")
        current.append(row)
    if current:
        blocks.append(current)
    if len(blocks) != n:
        raise InconsistentInput(f"expected {n} matrices, found {len(blocks)}")
    members = []
    for rows in blocks:
        sub = Subspace.from_rows(field, v, rows)
        if sub.dim != k:
            raise InconsistentInput(
                f"matrix spans dimension {sub.dim}, expected {k}"
            )
        members.append(sub)
    return PartialSpread(field, v, k, tuple(members))


def format_point_set(ps: PointSet) -> str:
    head = f"{ps.field.q} {ps.v} {ps.size}"
    rows = []
    for point in sorted(ps.counts):
        rows.extend([format_vector(ps.field, point)] * ps.counts[point])
    return "\n".join([head] + rows) + "\n"


def parse_point_set(text: str) -> PointSet:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise InconsistentInput("empty point-set file")
    q, v, n = _header_ints(lines[0], 3, "point-set")
    field = field_new(q)
    counts: dict = {}
    for line in lines[1:]:
        row = _parse_row(line)
        if len(row) != v:
            raise InconsistentInput(f"row width {len(row)} does not match v={v}")
        point = normalize_point(field, row)
        counts[point] = counts.get(point, 0) + 1
    total = sum(counts.values())
    if total != n:
        raise InconsistentInput(f"expected {n} points, found {total}")
    return PointSet(field, v, counts)


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
