"""
Tools for emitting figure-ready datasets. Each
:py:class:`PlotDataset` becomes one comma-separated file, and
:py:func:`emit_plot_data` writes a ``manifest.json`` beside them that
documents every file's columns, so any external plotting tool can
pick them up.
"""

import json
import logging
import math
import numbers
import os
import re
from collections import OrderedDict

from .errors import DataError, UsageError

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
FLOAT_FORMAT = "%.17g"


def format_number(value):
    """
    Formats a number for CSV output with 17 significant digits, which
    reads back to the identical double. Non-finite values become
    ``nan``, ``inf`` or ``-inf``.
    """
    if isinstance(value, bool) or value is None:
        raise ValueError("not a number: %r" % (value,))
    if isinstance(value, numbers.Integral):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return FLOAT_FORMAT % value


class PlotDataset(object):
    """
    A named table of numbers. Since every dataset ends up as a file on
    disk, names are restricted to letters, digits, ``_``, ``-`` and
    ``.`` and columns must be unique.
    """

    def __init__(self, name, columns, rows=(), description=""):
        """Creates a new dataset.

        Raises :class:`UsageError` if any of the parameters are invalid.

        :Parameters:
          - `name`: File stem of the dataset, e.g. ``variance_curve``.
          - `columns`: Column names, in output order.
          - `rows` (optional): Sequences of numbers, one per row, each as
            long as `columns`.
          - `description` (optional): Free text copied into the manifest.
        """
        self.name = name
        self.columns = columns
        self.description = description
        self._rows = []
        for row in rows:
            self.add_row(row)

    @property
    def name(self):
        return self._name

    @name.setter
    def name(self, value):
        if not isinstance(value, str) or not re.match(r"[A-Za-z0-9_.-]+$", value):
            raise UsageError("dataset name must match [A-Za-z0-9_.-]+, not %r" % (value,))
        self._name = value

    @property
    def columns(self):
        """The column names of this dataset, as a tuple."""
        return self._columns

    @columns.setter
    def columns(self, value):
        value = tuple(value)
        if not value:
            raise UsageError("dataset %s needs at least one column" % self.name)
        if len(set(value)) != len(value):
            raise UsageError("dataset %s has repeated columns: %s" % (self.name, ", ".join(value)))
        for column in value:
            if not re.match(r"[A-Za-z0-9_]+$", column):
                raise UsageError("column name must match [A-Za-z0-9_]+, not %r" % (column,))
        self._columns = value

    @property
    def rows(self):
        return list(self._rows)

    @property
    def filename(self):
        return "%s.csv" % self.name

    def add_row(self, row):
        row = tuple(row)
        if len(row) != len(self.columns):
            raise UsageError("dataset %s expects %d values per row, got %d"
                             % (self.name, len(self.columns), len(row)))
        self._rows.append(row)

    def column(self, name):
        index = self.columns.index(name)
        return [row[index] for row in self._rows]

    def __len__(self):
        return len(self._rows)

    def __str__(self):
        """
        Returns the CSV text of this dataset: a header line followed by
        one line per row, with ``\\n`` line endings.
        """
        lines = [",".join(self.columns)]
        for row in self._rows:
            lines.append(",".join(format_number(value) for value in row))
        return "\n".join(lines) + "\n"

    def manifest_entry(self):
        entry = OrderedDict()
        entry["file"] = self.filename
        entry["columns"] = list(self.columns)
        entry["rows"] = len(self)
        entry["description"] = self.description
        return entry


def emit_plot_data(datasets, directory):
    """
    Writes every dataset to ``<directory>/<name>.csv`` plus a
    ``manifest.json`` listing each file exactly once, in the given
    order. The directory is created if missing. Returns the list of
    paths written, manifest last.
    """
    datasets = list(datasets)
    names = [dataset.name for dataset in datasets]
    duplicates = sorted(set(name for name in names if names.count(name) > 1))
    if duplicates:
        raise UsageError("duplicate dataset names: %s" % ", ".join(duplicates))

    manifest = OrderedDict()
    manifest["datasets"] = [dataset.manifest_entry() for dataset in datasets]
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
        for dataset in datasets:
            path = os.path.join(directory, dataset.filename)
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(str(dataset))
            written.append(path)
            log.debug("wrote %s (%d rows)", path, len(dataset))

        path = os.path.join(directory, MANIFEST_NAME)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(manifest, handle, indent=2)
            handle.write("\n")
        written.append(path)
    except OSError as exc:
        raise DataError("cannot write plot data to %s: %s" % (directory, exc.strerror or exc))
    log.info("wrote %d plot datasets to %s", len(datasets), directory)
    return written
