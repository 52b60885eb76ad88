"""
CSV ingestion and document rendering.

Row numbers in errors count data rows from 1; a header line is not counted.
Without a header, column names are 0-based column indices.
"""
import csv
import io
import json
import logging
import math
from typing import Any, List, Optional, Tuple

import numpy as np

from hindsight.cli.models import InputSpec, SeriesKind
from hindsight.core.config import get_settings
from hindsight.core.exceptions import ConfigError, InputError
from hindsight.core.types import ReturnSeries, Strategy

logger = logging.getLogger(__name__)


def _read_rows(spec: InputSpec) -> Tuple[Optional[List[str]], List[Tuple[int, List[str]]]]:
    """
    (header, [(data row number, cells)]); blank lines are numbered but skipped.

    A 0-byte file has no header even when one is expected.
    """
    try:
        with open(spec.path, newline="", encoding="utf-8") as handle:
            lines = list(csv.reader(handle, delimiter=spec.delimiter))
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {spec.path}: {e}")
    except csv.Error as e:
        raise InputError(f"malformed CSV in {spec.path}: {e}")

    header = None
    if spec.header and lines:
        header = [cell.strip() for cell in lines[0]]
        lines = lines[1:]
    rows = [(number, row) for number, row in enumerate(lines, start=1) if any(cell.strip() for cell in row)]
    return header, rows


def _column_index(header: Optional[List[str]], name: str) -> int:
    if header is not None:
        if name not in header:
            raise InputError(f"missing column {name!r}; found {', '.join(header)}")
        return header.index(name)
    try:
        index = int(name)
    except ValueError:
        raise ConfigError(f"column {name!r} must be a 0-based index when the file has no header")
    if index < 0:
        raise ConfigError(f"column index must be >= 0, got {index}")
    return index


def _cell(row: List[str], index: int, number: int, name: str) -> str:
    if index >= len(row):
        raise InputError(f"missing value for column {name!r}", row=number)
    return row[index].strip()


def _number(text: str, number: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"non-numeric {name} {text!r}", row=number)
    if not math.isfinite(value):
        raise InputError(f"{name} {text!r} is not finite", row=number)
    return value


def _empty_series(spec: InputSpec) -> ReturnSeries:
    if spec.kind is SeriesKind.PRICE:
        raise InputError("a price series needs at least 2 rows, got 0")
    logger.debug(f"[IO] loaded {spec.path} | kind={spec.kind.value} | n=0")
    return ReturnSeries([], labels=() if spec.timestamp_column is not None else None)


def load_series(spec: InputSpec) -> ReturnSeries:
    """
    Returns from a CSV column.

    kind=price produces n-1 log returns ln(p_t / p_{t-1}) from n prices,
    labelled with the timestamp of the later price.

    Raises:
        InputError: unreadable file, missing column, non-numeric or
            non-finite value, non-positive price, fewer than 2 prices
    """
    header, rows = _read_rows(spec)
    if not rows and header is None:
        return _empty_series(spec)
    value_index = _column_index(header, spec.value_column)
    stamp_index = _column_index(header, spec.timestamp_column) if spec.timestamp_column is not None else None

    values, labels = [], []
    for number, row in rows:
        value = _number(_cell(row, value_index, number, spec.value_column), number, "value")
        if spec.kind is SeriesKind.PRICE and value <= 0:
            raise InputError(f"price {value} is not positive", row=number)
        values.append(value)
        if stamp_index is not None:
            labels.append(_cell(row, stamp_index, number, spec.timestamp_column))

    if spec.kind is SeriesKind.PRICE:
        if len(values) < 2:
            raise InputError(f"a price series needs at least 2 rows, got {len(values)}")
        returns = np.diff(np.log(np.array(values)))
        labels = labels[1:]
    else:
        returns = np.array(values, dtype=float)

    logger.debug(f"[IO] loaded {spec.path} | kind={spec.kind.value} | n={returns.size}")
    return ReturnSeries(returns, labels=tuple(labels) if stamp_index is not None else None)


def load_positions(spec: InputSpec) -> Strategy:
    """
    0/1 positions from spec.positions_column, aligned with load_series.

    For kind=price the first row has no return, so its position is ignored.
    """
    if spec.positions_column is None:
        raise ConfigError("objective=report needs a positions column")
    header, rows = _read_rows(spec)
    if not rows and header is None:
        return Strategy.empty(0)
    index = _column_index(header, spec.positions_column)
    if spec.kind is SeriesKind.PRICE:
        rows = rows[1:]

    positions = []
    for number, row in rows:
        value = _number(_cell(row, index, number, spec.positions_column), number, "position")
        if value not in (0.0, 1.0):
            raise InputError(f"position {value} is not 0 or 1", row=number)
        positions.append(int(value))
    return Strategy(np.array(positions, dtype=np.int8))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def format_float(value: float, digits: Optional[int] = None) -> str:
    """Fixed significant-digit float text; infinities and NaN become quoted strings."""
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    if math.isnan(value):
        return '"nan"'
    digits = digits or get_settings().float_digits
    text = format(value, f".{digits}g")
    # whole floats keep a decimal point
    return text if any(c in text for c in ".en") else text + ".0"


def _encode(obj: Any, indent: int, level: int, digits: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj), digits)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1, digits)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1, digits)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def render_json(document: Any, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, 17 significant digits, "inf" for infinity."""
    return _encode(document, indent, 0, get_settings().float_digits) + "\n"


def render_csv(document: dict) -> str:
    """One trade per row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["start", "end", "start_label", "end_label"])
    for trade in document.get("strategy", []):
        writer.writerow([
            trade["start"],
            trade["end"],
            "" if trade["start_label"] is None else trade["start_label"],
            "" if trade["end_label"] is None else trade["end_label"],
        ])
    return buffer.getvalue()
