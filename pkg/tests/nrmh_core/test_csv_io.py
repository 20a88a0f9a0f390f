import numpy as np
import pytest

from nrmh.nrmh_core.csv_io import read_matrix_csv, read_vector_csv, write_matrix_csv
from nrmh.nrmh_core.errors import ConfigError


def test_matrix_csv_round_trip_is_exact(tmp_path):
    M = np.array([[1.0 / 3.0, np.sqrt(2.0)], [-1e-300, 12345.678]])
    write_matrix_csv(tmp_path / "m.csv", M)
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "m.csv"), M)


def test_read_matrix_csv_plain_file(tmp_path):
    (tmp_path / "v.csv").write_text("1,0,0\n0,1,0\n0,0,0.25\n", encoding="utf-8")
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "v.csv"), np.diag([1.0, 1.0, 0.25]))


def test_read_matrix_csv_errors(tmp_path):
    with pytest.raises(ConfigError):
        read_matrix_csv(tmp_path / "missing.csv")

    (tmp_path / "ragged.csv").write_text("1,2\n3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_matrix_csv(tmp_path / "ragged.csv")

    (tmp_path / "inf.csv").write_text("1,inf\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_matrix_csv(tmp_path / "inf.csv")


def test_read_vector_csv(tmp_path):
    (tmp_path / "row.csv").write_text("0.2,0.3,0.5\n", encoding="utf-8")
    (tmp_path / "col.csv").write_text("0.2\n0.3\n0.5\n", encoding="utf-8")
    np.testing.assert_array_equal(read_vector_csv(tmp_path / "row.csv"), [0.2, 0.3, 0.5])
    np.testing.assert_array_equal(read_vector_csv(tmp_path / "col.csv"), [0.2, 0.3, 0.5])

    write_matrix_csv(tmp_path / "square.csv", np.eye(2))
    with pytest.raises(ConfigError):
        read_vector_csv(tmp_path / "square.csv")
