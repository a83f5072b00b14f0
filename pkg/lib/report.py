"""
Report module - Serializes estimates, audits and study results to JSON and CSV
"""
import csv
import io
import json
import logging
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 15


def format_number(value) -> str:
    """Decimal text with 15 significant digits; times keep the text they were read with"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.{SIGNIFICANT_DIGITS}g}"


def to_jsonable(value):
    """Times become decimal strings, probabilities JSON numbers"""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dumps_json(doc) -> str:
    """Sorted, indented JSON text ending in a newline"""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2) + '\n'


def write_json(path, doc):
    Path(path).write_text(dumps_json(doc))
    logger.info(f"Wrote {path}")


def render_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(cell) if not isinstance(cell, str) else cell for cell in row])
    return buffer.getvalue()


def write_csv(path, header, rows):
    Path(path).write_text(render_csv(header, rows))
    logger.info(f"Wrote {path}")


def compute_summary(values):
    """Median and quartiles of a list of errors"""
    if not values:
        return {
            'count': 0,
            'median': None,
            'q1': None,
            'q3': None,
            'min': None,
            'max': None,
        }

    data = np.asarray(values, dtype=float)
    q1, median, q3 = np.percentile(data, [25, 50, 75])
    return {
        'count': len(values),
        'median': float(median),
        'q1': float(q1),
        'q3': float(q3),
        'min': float(data.min()),
        'max': float(data.max()),
    }
