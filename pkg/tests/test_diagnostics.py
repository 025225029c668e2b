import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qhdstep.boundary import InflowSpec, apply_velocity_bcs, apply_w_bcs, inlet_gradient
from qhdstep.diagnostics import (
    extract_isolines, mass_flux, mass_flux_error, negative_regions, separation_length,
    stream_function,
)
from qhdstep.grid import build_grid
from qhdstep.operators import compute_w

from conftest import vec


def test_stream_function_examples():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, Y = g.mesh()
    zero = vec(0 * X, 0 * X)
    np.testing.assert_allclose(stream_function(vec(np.ones_like(X), 0 * X), zero, g), Y, atol=1e-15)
    np.testing.assert_allclose(stream_function(vec(2 * Y, 0 * X), zero, g), Y**2, atol=1e-15)
    assert np.all(stream_function(zero, zero, g)[:, 0] == 0)


def test_mass_flux_examples():
    g = build_grid(7.5, 0.5, dx=0.025)
    tau = 0.005
    grad = inlet_gradient(100, 0.5, 1.0, tau)
    spec = InflowSpec(100.0, 0.5, grad)
    X, _ = g.mesh()
    u = apply_velocity_bcs(vec(g.zeros(), g.zeros()), spec, g)
    p = grad * (X - g.length)
    w = apply_w_bcs(compute_w(u, p, tau, g), u, p, tau, spec, g)
    assert mass_flux(u, w, g, 0) == pytest.approx(1.0, abs=1e-3)
    zero = vec(g.zeros(), g.zeros())
    assert mass_flux(zero, zero, g, 3) == 0.0
    with pytest.raises(IndexError):
        mass_flux(zero, zero, g, g.nx)


@settings(max_examples=30, deadline=None)
@given(a=arrays(np.float64, (11, 11), elements=st.floats(-3, 3)),
       b=arrays(np.float64, (11, 11), elements=st.floats(-3, 3)))
def test_top_minus_bottom_equals_column_flux(a, b):
    g = build_grid(1.0, 0.5, dx=0.1)
    u, w = vec(a, 0 * a), vec(b, 0 * b)
    psi = stream_function(u, w, g)
    for i in range(g.nx):
        assert psi[i, -1] - psi[i, 0] == mass_flux(u, w, g, i)
    assert mass_flux_error(u, w, g, 1.0) == pytest.approx(np.max(np.abs(psi[:, -1] - 1.0)))


def test_separation_length_examples():
    g = build_grid(7.5, 0.5, dx=0.025)
    X, _ = g.mesh()
    assert separation_length(0.3 * (X - 2.5), g) == pytest.approx(2.5, abs=1e-12)
    assert separation_length(np.abs(X) + 1.0, g) == 0.0
    # crossing between nodes is linearly interpolated
    assert separation_length(X - 2.51, g) == pytest.approx(2.51, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(row=arrays(np.float64, 31, elements=st.floats(-1, 1, allow_subnormal=False)),
       c=st.floats(1e-3, 1e3))
def test_separation_length_scale_invariant(row, c):
    g = build_grid(3.0, 0.5, dx=0.1)
    psi = np.zeros(g.shape)
    psi[:, 1] = row
    a = separation_length(psi, g)
    b = separation_length(c * psi, g)
    assert a == pytest.approx(b, abs=1e-9)
    assert negative_regions(psi) == negative_regions(c * psi)


def test_negative_regions_counts_runs():
    psi = np.zeros((8, 3))
    psi[:, 1] = [-1, -1, 1, 1, -1, 1, -1, -1]
    assert negative_regions(psi) == 3


def test_isoline_horizontal_line():
    g = build_grid(1.0, 0.5, dx=0.1)
    _, Y = g.mesh()
    iso = extract_isolines(Y, [0.5], g)
    assert len(iso) == 1 and len(iso.polylines[0]) == 1
    line = iso.polylines[0][0]
    np.testing.assert_allclose(line[:, 1], 0.5, atol=1e-12)
    assert line[:, 0].min() == pytest.approx(0.0) and line[:, 0].max() == pytest.approx(1.0)


def test_isoline_quarter_circle():
    g = build_grid(1.0, 0.5, dx=0.01)
    X, Y = g.mesh()
    iso = extract_isolines(X**2 + Y**2, [0.25], g)
    chains = iso.polylines[0]
    assert len(chains) == 1
    r = np.hypot(chains[0][:, 0], chains[0][:, 1])
    assert np.max(np.abs(r - 0.5)) < g.dx


def test_isoline_empty_and_invalid():
    g = build_grid(1.0, 0.5, dx=0.1)
    assert len(extract_isolines(g.zeros(), [], g)) == 0
    with pytest.raises(ValueError):
        extract_isolines(g.zeros(), [np.nan], g)


@settings(max_examples=25, deadline=None)
@given(f=arrays(np.float64, (8, 6), elements=st.floats(-1, 1)), level=st.floats(-0.9, 0.9))
def test_isolines_stay_in_interpolation_bracket(f, level):
    g = build_grid(1.4, 0.4, nx=8, ny=6)
    iso = extract_isolines(f, [level], g)
    for chain in iso.polylines[0]:
        for x, y in chain:
            i = min(int(np.floor(x / g.dx + 1e-9)), g.nx - 2)
            j = min(int(np.floor(y / g.dy + 1e-9)), g.ny - 2)
            corners = f[i : i + 2, j : j + 2]
            assert corners.min() - 1e-12 <= level <= corners.max() + 1e-12
            assert 0 <= x <= g.length + 1e-12 and 0 <= y <= 1 + 1e-12
