"""
Reading and writing series as comma-separated files.

Two layouts are accepted, told apart by the header line:

::

  time,price      prices, loaded as a PriceSeries
  time,level      log-return levels, loaded as a LevelSeries

Numbers are parsed with ``float`` and so never depend on the locale.
"""

import csv
import hashlib
import io
import logging
import math

import numpy as np

from .errors import DataError, DomainError, FormatError, SizeError
from .plot_data import format_number
from .series_core import (TIMESTAMP_TOLERANCE, LevelSeries, PriceSeries, Provenance,
                          check_grid)

log = logging.getLogger(__name__)

PRICE_HEADER = ("time", "price")
LEVEL_HEADER = ("time", "level")


def _number(text, line, what):
    try:
        value = float(text)
    except ValueError:
        raise FormatError("line %d: %s %r is not a number" % (line, what, text))
    if not math.isfinite(value):
        raise FormatError("line %d: %s %r is not finite" % (line, what, text))
    return value


def read_levels_csv(path, tolerance=TIMESTAMP_TOLERANCE):
    """
    Reads a ``time,price`` or ``time,level`` file. Returns a
    :py:class:`PriceSeries` or a :py:class:`LevelSeries` whose
    provenance records the path, the SHA-256 digest of the file bytes
    and the number of data rows.

    Errors name the offending line, counting the header as line 1.
    """
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise DataError("cannot read %s: %s" % (path, exc.strerror or exc))
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        raise FormatError("%s is not UTF-8 text" % path)

    reader = csv.reader(io.StringIO(text, newline=""))
    header = None
    times, values = [], []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = tuple(cell.strip() for cell in row)
        if header is None:
            header = tuple(cell.lower() for cell in cells)
            if header not in (PRICE_HEADER, LEVEL_HEADER):
                raise FormatError("line %d: header must be time,price or time,level, not %s"
                                  % (line, ",".join(cells)))
            continue
        if len(cells) != 2:
            raise FormatError("line %d: expected 2 fields, got %d" % (line, len(cells)))
        time = _number(cells[0], line, "time")
        value = _number(cells[1], line, header[1])
        if header == PRICE_HEADER and not value > 0:
            raise DomainError("line %d: non-positive price %r" % (line, value))
        if times and not time > times[-1]:
            raise FormatError("line %d: time %r does not increase" % (line, time))
        times.append(time)
        values.append(value)

    if header is None:
        raise FormatError("%s is empty" % path)
    if len(values) < 2:
        raise SizeError("%s holds %d data rows; at least 2 are required" % (path, len(values)))

    provenance = Provenance(str(path), digest, len(values))
    log.info("read %d rows of %s from %s (sha256 %s)", len(values), header[1], path, digest[:12])
    if header == PRICE_HEADER:
        return PriceSeries(times, values, provenance=provenance)

    step = (times[-1] - times[0]) / (len(times) - 1)
    check_grid(times, step, tolerance)
    return LevelSeries(values, step=step, origin_time=times[0], provenance=provenance)


def write_levels_csv(levels, path):
    """
    Writes a level series as ``time,level`` with 17 significant digits,
    so that :py:func:`read_levels_csv` reads the identical values back.
    """
    times = levels.origin_time + levels.step * np.arange(len(levels))
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(LEVEL_HEADER)
            for time, value in zip(times, levels.values):
                writer.writerow((format_number(time), format_number(value)))
    except OSError as exc:
        raise DataError("cannot write %s: %s" % (path, exc.strerror or exc))
    log.info("wrote %d levels to %s", len(levels), path)
