# utils/export.py

import io
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import orjson
import pandas as pd
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from constants import CSV_FLOAT_FORMAT, TABLE_SIGNIFICANT_DIGITS

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE


def to_json(document: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, shortest round-trip floats."""
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json")
    return orjson.dumps(document, option=JSON_OPTIONS).decode("utf-8")


def to_csv(rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def format_cell(value: Any, digits: int = TABLE_SIGNIFICANT_DIGITS) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else ("yes" if value else "no")
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.{digits}g}"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def to_table(rows: Iterable[Mapping[str, Any]], columns: Sequence[str], title: Optional[str] = None) -> str:
    """Plain-text rich table with floats cut to six significant digits."""
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*(format_cell(row.get(column)) for column in columns))
    buffer = io.StringIO()
    Console(file=buffer, width=160, color_system=None, force_terminal=False).print(table)
    return buffer.getvalue()


def key_value_rows(document: Mapping[str, Any], skip: Iterable[str] = ()) -> List[Dict[str, Any]]:
    skip = set(skip)
    return [{"field": k, "value": v} for k, v in document.items() if k not in skip]


def write_output(text: str, path: Optional[Path] = None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)
