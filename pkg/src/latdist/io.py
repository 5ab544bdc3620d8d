"""Matrix files and run reports (JSON, exact rationals as strings)."""
from __future__ import annotations

import hashlib
import json
import math
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path

from .errors import RankDeficient
from .exactmat import RatMatrix, as_rat, gram_schmidt

FLOAT_DIGITS = 12
_RAT = re.compile(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*")


class ParseError(ValueError):
    pass


def rat_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ParseError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ParseError(f"rationals must be strings or integers, got {s!r}")
    if not _RAT.fullmatch(s):
        raise ParseError(f"expected an integer or 'p/q' string, got {s!r}")
    try:
        return as_rat(s.replace(" ", ""))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"not a rational: {s!r}") from exc


def round_float(x: float):
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return float(f"{x:.{FLOAT_DIGITS}g}")


def to_jsonable(obj):
    """Fractions -> "p/q", floats -> 12 significant digits, matrices -> grids."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, float):
        return round_float(obj)
    if isinstance(obj, RatMatrix):
        return [[rat_str(v) for v in row] for row in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def matrix_to_dict(B: RatMatrix, label: str | None = None) -> dict:
    d = {"n": B.cols, "basis": to_jsonable(B)}
    if B.rows != B.cols:
        d["rows"] = B.rows
    if label:
        d["label"] = label
    return d


def matrix_from_dict(d: dict, require_full_rank: bool = True) -> tuple[RatMatrix, str | None]:
    if not isinstance(d, dict) or "basis" not in d:
        raise ParseError("matrix file needs a 'basis' field")
    grid = d["basis"]
    if not isinstance(grid, list) or not grid or not all(isinstance(r, list) for r in grid):
        raise ParseError("'basis' must be a non-empty list of rows")
    width = len(grid[0])
    if any(len(r) != width for r in grid):
        raise ParseError("ragged basis rows")
    B = RatMatrix([[parse_rat(v) for v in r] for r in grid])
    n = d.get("n", B.cols)
    if n != B.cols:
        raise ParseError(f"'n' = {n} does not match {B.cols} basis columns")
    if require_full_rank:
        try:
            gram_schmidt(B)
        except RankDeficient as exc:
            raise RankDeficient(f"basis is rank deficient: {exc}") from exc
    return B, d.get("label")


def parse_plain(text: str) -> RatMatrix:
    """Whitespace-separated integer rows."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise ParseError(f"plain matrix format accepts integers only: {line!r}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("plain matrix must be a non-empty rectangular grid")
    return RatMatrix(rows)


def load_matrix(path, require_full_rank: bool = True) -> tuple[RatMatrix, str | None]:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc
        return matrix_from_dict(data, require_full_rank)
    B = parse_plain(text)
    if require_full_rank:
        gram_schmidt(B)
    return B, None


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n"


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(path, B: RatMatrix, label: str | None = None) -> None:
    atomic_write(path, dumps(matrix_to_dict(B, label)))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
