import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbl.diagnostics import (
    EmptyRegionError,
    OnewaySetup,
    Region,
    config_hash,
    energy_l2,
    error_decomposition,
    interior_error,
    interior_region,
    oneway_report,
    plateau_index,
)
from fbl.grid_basis import jgl_grid
from fbl.vorder import Layer, VariableOrderProfile


def test_interior_error_trivial():
    a = np.linspace(0, 1, 7)
    linf, err = interior_error(a, a, np.ones(7, bool))
    assert linf == 0.0 and np.all(err == 0.0)


def test_interior_error_offset():
    a = np.linspace(0, 1, 7)
    linf, _ = interior_error(a + 0.25, a, np.ones(7, bool))
    assert linf == 0.25


def test_interior_error_empty_region():
    with pytest.raises(EmptyRegionError):
        interior_error(np.zeros(3), np.zeros(3), np.zeros(3, bool))
    with pytest.raises(EmptyRegionError):
        energy_l2(np.zeros(5), np.zeros(5, bool), jgl_grid(4))


def test_energy_of_constant():
    g = jgl_grid(20, 0, 0, -5.0, 5.0)
    assert energy_l2(np.ones(21), np.ones(21, bool), g) == pytest.approx(np.sqrt(10.0), rel=1e-13)


def test_region_masks():
    prof = VariableOrderProfile((-5.0, 5.0), right=Layer(1.0, 0.5, 20.0))
    r = interior_region(prof)
    assert r.x == (-5.0, 4.5)
    x = np.array([-5.0, 0.0, 4.5, 4.6])
    np.testing.assert_array_equal(r.mask(x), [True, True, True, False])
    box = Region((-1.0, 1.0), (0.0, 1.0))
    m = box.mask(np.array([-2.0, 0.0]), np.array([0.5, 2.0]))
    np.testing.assert_array_equal(m, [[False, False], [True, False]])
    both = VariableOrderProfile((-2.0, 2.0), Layer(0.5, 0.25), Layer(0.5, 0.25))
    assert interior_region(both).x == (-1.75, 1.75)
    assert interior_region(both, margin=0.0).x == (-2.0, 2.0)


@settings(max_examples=50, deadline=None)
@given(shift=st.floats(-10.0, 10.0), scale=st.floats(0.1, 10.0))
def test_error_translation_invariance(shift, scale):
    rng = np.random.default_rng(0)
    u, r = rng.standard_normal(20), rng.standard_normal(20)
    m = np.ones(20, bool)
    base = interior_error(u, r, m)[0]
    assert interior_error(u + shift, r + shift, m)[0] == pytest.approx(base, rel=1e-9, abs=1e-9)
    assert interior_error(scale * u, scale * r, m)[0] == pytest.approx(scale * base, rel=1e-9)


def test_report_is_deterministic():
    setup = OnewaySetup(P=150, tau=5e-3)
    a = oneway_report(setup, "FBL", [1.0, 2.0])
    b = oneway_report(setup, "FBL", [1.0, 2.0])
    assert a.linf == b.linf
    assert a.provenance == b.provenance
    assert a.times == (1.0, 2.0)


def test_config_hash_stable():
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_plateau_index():
    assert plateau_index([1e-2, 1e-3, 1e-4, 1.1e-4, 1e-4]) == 2
    assert plateau_index([1.0, 0.5]) == 0


def test_error_decomposition():
    d = error_decomposition(fine=5e-5, plateau=4e-5, model=1e-5)
    assert d["E_M"] == 1e-5
    assert d["E_R"] == pytest.approx(3e-5)
    assert d["E_N"] == pytest.approx(1e-5)
