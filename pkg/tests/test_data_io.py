"""
Contains tests for reading and writing series files.
"""

import hashlib

import numpy as np
import pytest

from pyincrements.data_io import read_levels_csv, write_levels_csv
from pyincrements.errors import DataError, DomainError, FormatError, SizeError
from pyincrements.generators import ArchParams, gen_arch1
from pyincrements.series_core import LevelSeries, PriceSeries


def write(tmp_path, text, name="series.csv"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8"))
    return str(path)


class TestReadLevelsCsv(object):

    def test_prices(self, tmp_path):
        """
        Tests reading a minimal price file.
        """
        series = read_levels_csv(write(tmp_path, "time,price\n0,100\n1,105\n"))
        assert isinstance(series, PriceSeries)
        assert 2 == len(series.prices)
        assert [100.0, 105.0] == list(series.prices)

    def test_levels(self, tmp_path):
        """
        Tests reading a minimal level file.
        """
        series = read_levels_csv(write(tmp_path, "time,level\n0,0\n1,0.5\n"))
        assert isinstance(series, LevelSeries)
        assert 2 == len(series)
        assert 1.0 == series.step

    def test_provenance(self, tmp_path):
        """
        Tests that the path, digest and row count are recorded.
        """
        text = "time,level\n0,0\n1,0.5\n2,0.25\n"
        path = write(tmp_path, text)
        prov = read_levels_csv(path).provenance
        assert path == prov.path
        assert hashlib.sha256(text.encode("utf-8")).hexdigest() == prov.digest
        assert 3 == prov.rows

    def test_tolerates_layout(self, tmp_path):
        """
        Tests that a byte-order mark, CRLF endings, spaces, blank lines
        and header case are accepted.
        """
        text = "\ufeffTime, Level\r\n0, 0\r\n\r\n1, 1e-3\r\n"
        series = read_levels_csv(write(tmp_path, text))
        assert [0.0, 0.001] == list(series.values)

    def test_non_positive_price(self, tmp_path):
        """
        Tests that a non-positive price is reported at its line.
        """
        with pytest.raises(DomainError) as info:
            read_levels_csv(write(tmp_path, "time,price\n0,-5\n"))
        assert "line 2" in str(info.value)
        assert "non-positive price" in str(info.value)

    def test_unknown_header(self, tmp_path):
        """
        Tests that mixed or unknown headers are refused.
        """
        for header in ("time,value", "time,price,level", "price,time"):
            with pytest.raises(FormatError) as info:
                read_levels_csv(write(tmp_path, header + "\n0,1\n1,2\n"))
            assert "line 1" in str(info.value)

    def test_malformed_row(self, tmp_path):
        """
        Tests that a bad row is reported with its line number.
        """
        with pytest.raises(FormatError) as info:
            read_levels_csv(write(tmp_path, "time,level\n0,0\n1,abc\n"))
        assert "line 3" in str(info.value)
        with pytest.raises(FormatError) as info:
            read_levels_csv(write(tmp_path, "time,level\n0,0\n1,2,3\n"))
        assert "line 3" in str(info.value)

    def test_not_finite(self, tmp_path):
        """
        Tests that nan and inf are refused.
        """
        with pytest.raises(FormatError):
            read_levels_csv(write(tmp_path, "time,level\n0,0\n1,nan\n"))

    def test_non_monotone_time(self, tmp_path):
        """
        Tests that time must increase.
        """
        with pytest.raises(FormatError) as info:
            read_levels_csv(write(tmp_path, "time,price\n0,1\n2,1\n1,1\n"))
        assert "line 4" in str(info.value)

    def test_irregular_grid(self, tmp_path):
        """
        Tests that irregular level timestamps are refused.
        """
        with pytest.raises(FormatError):
            read_levels_csv(write(tmp_path, "time,level\n0,0\n1,0\n3,0\n4,0\n"))

    def test_too_short(self, tmp_path):
        """
        Tests that a single row is a size error.
        """
        with pytest.raises(SizeError):
            read_levels_csv(write(tmp_path, "time,level\n0,0\n"))

    def test_empty(self, tmp_path):
        """
        Tests that an empty file is a format error.
        """
        with pytest.raises(FormatError):
            read_levels_csv(write(tmp_path, ""))

    def test_missing(self, tmp_path):
        """
        Tests that a missing file is a data error.
        """
        with pytest.raises(DataError):
            read_levels_csv(str(tmp_path / "missing.csv"))


class TestWriteLevelsCsv(object):

    def test_round_trip(self, tmp_path):
        """
        Tests that written levels read back to the identical doubles.
        """
        levels = gen_arch1(ArchParams(0.2, 0.5), 1000, seed=51)
        path = str(tmp_path / "a.csv")
        write_levels_csv(levels, path)
        back = read_levels_csv(path)
        assert np.array_equal(levels.values, back.values)
        assert levels.step == back.step

    def test_layout(self, tmp_path):
        """
        Tests the exact file layout.
        """
        path = tmp_path / "b.csv"
        write_levels_csv(LevelSeries([0.0, 0.5, 0.25], step=0.5), str(path))
        assert "time,level\n0,0\n0.5,0.5\n1,0.25\n" == path.read_text()

    def test_unwritable(self, tmp_path):
        """
        Tests that an unwritable path is a data error.
        """
        with pytest.raises(DataError):
            write_levels_csv(LevelSeries([0.0, 1.0]), str(tmp_path / "no" / "such" / "c.csv"))
