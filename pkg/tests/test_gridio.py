import numpy as np
import pytest

from gwsplice.cylinders import CylinderMap, Grid, GridError
from gwsplice.gridio import GridFileError, antipodal_profile, format_grid, parse_grid, read_grid, write_grid


def _same(a: CylinderMap, b: CylinderMap):
    assert a.grid == b.grid
    assert np.array_equal(a.remainder, b.remainder)
    assert (a.const is None) == (b.const is None)
    if a.const is not None:
        assert np.array_equal(a.const, b.const)
    assert (a.profile is None) == (b.profile is None)


@pytest.mark.parametrize("kind", ["none", "single", "antipodal"])
def test_round_trip(rng, tmp_path, kind):
    g = Grid(-1.5, 3.25, 12, 8)
    rem = rng.normal(size=(12, 8, 3)) * 1e3 ** rng.uniform(-1, 1)
    const = None if kind == "none" else rng.normal(size=3)
    prof = antipodal_profile(g) if kind == "antipodal" else None
    u = CylinderMap(g, rem, const, prof)
    _same(parse_grid(format_grid(u)), u)
    path = write_grid(tmp_path / "u.csv", u)
    _same(read_grid(path), u)
    assert format_grid(read_grid(path)) == format_grid(u)


def test_header_layout():
    g = Grid(0.0, 1.0, 4, 4)
    text = format_grid(CylinderMap(g, np.zeros((4, 4, 2)), [1.0, 2.0]))
    assert text.splitlines()[0] == "# 2 4 4 0.0 1.0 single 1.0 2.0"
    assert len(text.splitlines()) == 1 + 16


@pytest.mark.parametrize("text", [
    "",
    "2 4 4 0 1 none\n",
    "# 2 4 4 0 1\n",
    "# 2 4 x 0 1 none\n",
    "# 1 4 4 0 1 weird\n",
    "# 1 4 4 0 1 none 3.0\n",
    "# 2 4 4 0 1 single 3.0\n",
    "# 1 4 4 0 1 none\n" + "0\n" * 15,
    "# 1 4 4 0 1 none\n" + "0,0\n" * 16,
])
def test_malformed(text):
    with pytest.raises(GridFileError):
        parse_grid(text)


def test_invalid_grid_in_file():
    with pytest.raises(GridError):
        parse_grid("# 1 2 4 0 1 none\n" + "0\n" * 8)
