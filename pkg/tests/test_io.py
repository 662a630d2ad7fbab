import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eikonal_lab import io
from eikonal_lab.numerics import Grid1D, Grid2D
from eikonal_lab.phase_space import SystemParams, WaveFunction, wigner_from_wavefunction

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, st.integers(-10**12, 10**12), st.booleans()), min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    io.write_csv(path, ["f", "i", "b"], rows)
    header, back = io.read_csv(path)
    assert header == ["f", "i", "b"]
    for (f, i, b), (f2, i2, b2) in zip(rows, back):
        assert float(f2) == f and i2 == i and b2 is b


def test_json_is_canonical(tmp_path):
    a = io.dumps({"b": np.float64(0.1), "a": [np.int64(2), np.bool_(True)]})
    b = io.dumps({"a": [2, True], "b": 0.1})
    assert a == b
    io.write_json(tmp_path / "x.json", {"z": 1})
    assert io.read_json(tmp_path / "x.json") == {"z": 1}


def test_tables_in_both_formats(tmp_path):
    rows = [[1.5, 2], [0.1, -3]]
    for fmt, suffix in (("csv", ".csv"), ("json", ".json"), ("svg", ".csv")):
        p = io.write_table(tmp_path / fmt, ["a", "b"], rows, fmt)
        assert p.suffix == suffix
        assert io.read_table(p) == (["a", "b"], rows)


def test_state_files_round_trip(tmp_path):
    sys_ = SystemParams(2.0, 0.5)
    g = Grid1D.from_bounds(-6, 6, 64)
    psi = WaveFunction.gaussian(g, 0.3, 1.1, 0.7, sys_)
    io.save_wavefunction(tmp_path / "psi.csv", psi, sys_)
    back, s2 = io.load_wavefunction(tmp_path / "psi.csv")
    assert s2 == sys_ and back.grid == g
    assert np.array_equal(back.values, psi.values)

    rho = wigner_from_wavefunction(psi, sys_, Grid1D.from_bounds(-2, 4, 48))
    io.save_density(tmp_path / "rho.csv", rho, sys_)
    r2, s3 = io.load_density(tmp_path / "rho.csv")
    assert s3 == sys_ and r2.grid == rho.grid
    assert np.array_equal(r2.values, rho.values)
    with pytest.raises(ValueError):
        io.load_density(tmp_path / "psi.csv")


def test_headerless_state_file_rejected(tmp_path):
    (tmp_path / "bad.csv").write_text("x,re,im\n0,1,0\n")
    with pytest.raises(ValueError):
        io.load_wavefunction(tmp_path / "bad.csv")


def test_finite_or_none():
    assert io.finite_or_none(1.0) == 1.0
    assert io.finite_or_none(math.inf) is None
