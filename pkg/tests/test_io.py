import numpy as np
import pytest

from jitterscale.errors import SystemParseError
from jitterscale.io import discrete_from_dict, load_system, parse_matrix, system_from_dict


def test_parse_matrix_shapes():
    assert parse_matrix(3, "D").shape == (1, 1)
    assert parse_matrix([1, 2], "C").shape == (1, 2)
    np.testing.assert_array_equal(parse_matrix([[1, 2], [3, 4]], "A"), [[1, 2], [3, 4]])


@pytest.mark.parametrize("obj, where", [
    ([[1, 2], [3]], r"A\[1\]"),
    ([[1, 2], [3, "x"]], r"A\[1\]\[1\]"),
    ([[1, 2], 3], r"A\[1\]"),
    ([], "A"),
    ([[True, 1]], r"A\[0\]\[0\]"),
])
def test_parse_matrix_errors_name_position(obj, where):
    with pytest.raises(SystemParseError, match=where):
        parse_matrix(obj, "A")


def test_system_with_ts():
    sys, ts = system_from_dict({"A": [[-1]], "B": [[1]], "C": [[1]], "D": [[0]], "ts": 0.1})
    assert ts == 0.1 and sys.n_states == 1


def test_nested_system_key():
    sys, ts = system_from_dict({"case": "a", "system": {"A": [[-2.2]], "B": [[1.1]],
                                                        "C": [[1]], "D": [[0]]}})
    assert sys.A[0, 0] == -2.2 and ts is None


def test_missing_key():
    with pytest.raises(SystemParseError, match="D"):
        system_from_dict({"A": [[-1]], "B": [[1]], "C": [[1]]})


def test_dimension_error_becomes_parse_error():
    with pytest.raises(SystemParseError):
        system_from_dict({"A": [[-1]], "B": [[1], [2]], "C": [[1]], "D": [[0]]})


def test_bad_ts():
    with pytest.raises(SystemParseError):
        system_from_dict({"A": [[-1]], "B": [[1]], "C": [[1]], "D": [[0]], "ts": -1})


def test_discrete_needs_dt():
    data = {"A_d": [[1]], "B_d": [[0.1]], "C": [[1]], "D": [[0]]}
    with pytest.raises(SystemParseError):
        discrete_from_dict(data)
    assert discrete_from_dict(data, dt=0.1).dt == 0.1


def test_malformed_json_reports_line_and_column(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{\n  "A": [[1]],\n  "B": [[1]]\n  "C": 1}')
    with pytest.raises(SystemParseError, match=r"line 4, column 3"):
        load_system(p)
