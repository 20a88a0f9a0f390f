import pytest

from nrmh.nrmh_core.validators import (
    _validate_baseline,
    _validate_dimension,
    _validate_optional_nonnegative,
    _validate_optional_positive,
    _validate_seed,
    _validate_skew_source,
    _validate_start,
    parse_bool,
)


@pytest.mark.parametrize(
    "value,expected",
    [
        ("true", True),
        ("Yes", True),
        (" on ", True),
        ("1", True),
        ("enabled", True),
        ("false", False),
        ("0", False),
        ("whatever", False),
        (None, False),
        (True, True),
        (False, False),
    ],
)
def test_parse_bool(value, expected):
    assert parse_bool(value) is expected


def test_validate_dimension():
    assert _validate_dimension("3") == 3
    assert _validate_dimension(9) == 9
    assert _validate_dimension(None) is None
    with pytest.raises(ValueError, match="Must be one of: 3, 9"):
        _validate_dimension(4)


def test_validate_seed():
    assert _validate_seed("42") == 42
    assert _validate_seed("0x2a") == 42
    assert _validate_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(ValueError):
        _validate_seed(2**64)
    with pytest.raises(ValueError):
        _validate_seed("-1")


def test_validate_skew_source():
    assert _validate_skew_source("optimize") == "optimize"
    assert _validate_skew_source(" my_skew.CSV ") == "my_skew.CSV"
    assert _validate_skew_source(None) is None
    with pytest.raises(ValueError, match="or a .csv path"):
        _validate_skew_source("skew.txt")
    with pytest.raises(ValueError):
        _validate_skew_source("  ")


def test_validate_baseline():
    assert _validate_baseline("MALA") == "mala"
    assert _validate_baseline("none") == "none"
    assert _validate_baseline(False) == "none"
    assert _validate_baseline("yes") == "mala"
    assert _validate_baseline("off") == "none"
    with pytest.raises(ValueError):
        _validate_baseline("hmc")


def test_validate_start():
    assert _validate_start("0.5, -1, 2e-3") == [0.5, -1.0, 0.002]
    assert _validate_start([1.0]) == [1.0]
    assert _validate_start(None) is None
    with pytest.raises(ValueError):
        _validate_start("1;2")


def test_validate_optional_numbers():
    assert _validate_optional_positive("0.25") == 0.25
    assert _validate_optional_positive(None) is None
    assert _validate_optional_nonnegative("0") == 0.0
    with pytest.raises(ValueError):
        _validate_optional_positive("0")
    with pytest.raises(ValueError):
        _validate_optional_nonnegative("nan")
