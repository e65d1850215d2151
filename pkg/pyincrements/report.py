"""
Contains the class which represents a structured run report. This
encapsulates the versioned document every command writes, so that two
runs with identical inputs produce byte-identical files.
"""

import dataclasses
import json
import logging
import math
import numbers
from collections import OrderedDict
from collections.abc import Mapping
from enum import Enum

import numpy as np

from .errors import DataError, FormatError, UsageError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SECTIONS = ("input", "config", "verdicts", "estimates", "decisions_metadata")


def to_plain(value):
    """
    Converts ``value`` into JSON-ready builtins: dataclasses and mappings
    become ordered objects, arrays and tuples become lists, numpy scalars
    become Python numbers and non-finite floats become ``None``. Objects
    with a ``to_plain`` method are asked to convert themselves.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Enum):
        return to_plain(value.value)
    if hasattr(value, "to_plain"):
        return to_plain(value.to_plain())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return OrderedDict((f.name, to_plain(getattr(value, f.name)))
                           for f in dataclasses.fields(value))
    if isinstance(value, Mapping):
        return OrderedDict((str(k), to_plain(v)) for k, v in value.items())
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    raise UsageError("cannot place %s in a report" % type(value).__name__)


class Report(object):
    """
    This class represents the document a command writes. The document
    always has the same shape:

    ::

      {"schema_version": 1,
       "input": {...}, "config": {...}, "verdicts": {...},
       "estimates": {...}, "decisions_metadata": {...}}

    Entries keep the order in which they were set. Plot datasets can be
    attached for :py:func:`~pyincrements.plot_data.emit_plot_data`; they
    are not part of the document.
    """

    def __init__(self, **sections):
        """
        Creates a report, optionally pre-filling sections from mappings
        passed by keyword (``input=...``, ``config=...`` and so on).
        """
        self.sections = OrderedDict((name, OrderedDict()) for name in SECTIONS)
        self.plot_datasets = []
        for name, values in sections.items():
            self.update(name, values)

    def _section(self, name):
        if name not in self.sections:
            raise UsageError("unknown report section %r; expected one of %s"
                             % (name, ", ".join(SECTIONS)))
        return self.sections[name]

    def set(self, section, key, value):
        """Sets ``key`` inside ``section`` to the plain form of ``value``."""
        self._section(section)[str(key)] = to_plain(value)

    def update(self, section, values):
        for key, value in values.items():
            self.set(section, key, value)

    def get(self, section, key, default=None):
        return self._section(section).get(key, default)

    def add_plot_data(self, dataset):
        self.plot_datasets.append(dataset)

    def to_document(self):
        document = OrderedDict()
        document["schema_version"] = SCHEMA_VERSION
        document.update(self.sections)
        return document

    @classmethod
    def from_document(cls, document):
        """Rebuilds a report from a decoded document, checking its shape."""
        if not isinstance(document, Mapping) or "schema_version" not in document:
            raise FormatError("report has no schema_version")
        if document["schema_version"] != SCHEMA_VERSION:
            raise FormatError("unsupported report schema_version %r"
                              % (document["schema_version"],))
        unknown = [key for key in document if key != "schema_version" and key not in SECTIONS]
        if unknown:
            raise FormatError("unknown report sections: %s" % ", ".join(unknown))
        report = cls()
        for name in SECTIONS:
            report.sections[name] = OrderedDict(document.get(name, {}))
        return report

    def __eq__(self, other):
        if not isinstance(other, Report):
            return NotImplemented
        return self.to_document() == other.to_document()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __str__(self):
        """
        Returns the JSON text of the document, two-space indented, with
        a trailing newline. Floats are written in their shortest form
        that reads back to the same double.
        """
        return json.dumps(self.to_document(), indent=2, allow_nan=False,
                          ensure_ascii=False) + "\n"


def write_report(report, path):
    """Writes ``report`` to ``path`` as UTF-8 JSON."""
    text = str(report)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise DataError("cannot write report to %s: %s" % (path, exc.strerror or exc))
    log.info("wrote report to %s", path)


def read_report(path):
    """Reads a report written by :py:func:`write_report`."""
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle, object_pairs_hook=OrderedDict)
    except OSError as exc:
        raise DataError("cannot read report %s: %s" % (path, exc.strerror or exc))
    except ValueError as exc:
        raise FormatError("report %s is not valid JSON: %s" % (path, exc))
    return Report.from_document(document)
