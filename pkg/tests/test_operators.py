import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qhdstep.boundary import inflow_profile, inlet_gradient
from qhdstep.grid import VectorField, build_grid
from qhdstep.operators import (
    compute_w, ddx, ddy, dissipation, divergence, momentum_rhs, navier_stokes_rhs,
)

from conftest import vec

xs, ys = sp.symbols("x y")


def _symbolic_rhs(ux, uy, p, nu, tau):
    """Tensor-form oracle: div(Pi - u(x)u + w(x)u + u(x)w) - grad p."""
    u = sp.Matrix([ux, uy])
    coords = (xs, ys)
    grad_u = sp.Matrix(2, 2, lambda a, b: sp.diff(u[a], coords[b]))  # d u_a / d x_b
    grad_p = sp.Matrix([sp.diff(p, c) for c in coords])
    w = tau * (grad_u * u + grad_p)
    stress = nu * (grad_u + grad_u.T) - u * u.T + w * u.T + u * w.T
    div = [sum(sp.diff(stress[a, b], coords[b]) for b in range(2)) for a in range(2)]
    return [sp.lambdify((xs, ys), div[a] - grad_p[a], "numpy") for a in range(2)], [
        sp.lambdify((xs, ys), w[a], "numpy") for a in range(2)
    ]


FIELD = (
    sp.sin(xs) * sp.cos(2 * ys) + 0.3 * ys**2,
    -sp.cos(xs) * sp.sin(ys) + 0.2 * xs * ys,
    sp.cos(1.5 * xs) * sp.sin(ys),
)


def _errors(n, tau, nu=0.05):
    (fx, fy), (wxf, wyf) = _symbolic_rhs(*FIELD, nu, tau)
    g = build_grid(1.0, 0.0, nx=n + 1, ny=n + 1)
    X, Y = g.mesh()
    num = [sp.lambdify((xs, ys), f, "numpy") for f in FIELD]
    u = VectorField(num[0](X, Y) + 0 * X, num[1](X, Y) + 0 * X)
    p = num[2](X, Y) + 0 * X
    w = compute_w(u, p, tau, g)
    rhs = momentum_rhs(u, p, w, nu, g)
    inner = (slice(1, -1), slice(1, -1))
    e_rhs = max(np.abs(rhs.x - fx(X, Y))[inner].max(), np.abs(rhs.y - fy(X, Y))[inner].max())
    e_w = max(np.abs(w.x - wxf(X, Y)).max(), np.abs(w.y - wyf(X, Y)).max()) if tau else 0.0
    return e_rhs, e_w


@pytest.mark.parametrize("tau", [0.0, 0.01])
def test_momentum_rhs_second_order_against_symbolic_oracle(tau):
    errs = [_errors(n, tau) for n in (16, 32, 64)]
    for k in range(2):
        ratio = errs[k][0] / errs[k + 1][0]
        assert 3.5 <= ratio <= 4.5, ratio
        if tau:
            assert 3.5 <= errs[k][1] / errs[k + 1][1] <= 4.5


def test_w_examples():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, Y = g.mesh()
    w = compute_w(vec(np.ones_like(X), 0 * X), np.full_like(X, 3.0), 0.01, g)
    assert np.all(w.x == 0) and np.all(w.y == 0)
    w = compute_w(vec(X, 0 * X), 0 * X, 0.01, g)
    np.testing.assert_allclose(w.x, 0.01 * X, atol=1e-15)
    assert np.all(w.y == 0)


def _poiseuille(g, tau=0.005, re=100.0):
    X, Y = g.mesh()
    grad = inlet_gradient(re, 0.5, 1.0, tau)
    # full-height variant of the parabola: u0 = (Re/2) g (1-y)(0-y) scaled to the gap [0, 1]
    ux = inflow_profile(Y, re, 0.0, grad)
    return VectorField(ux, 0 * X), grad * X, grad


def test_poiseuille_w_and_balance():
    g = build_grid(2.0, 0.0, dx=0.025)
    tau, re = 0.005, 100.0
    u, p, grad = _poiseuille(g, tau, re)
    assert grad == pytest.approx(-0.957702, abs=1e-6)
    w = compute_w(u, p, tau, g)
    np.testing.assert_allclose(w.x, tau * grad, atol=1e-14)
    assert abs(tau * grad - (-4.7885e-3)) < 1e-7
    assert np.max(np.abs(w.y)) < 1e-15
    # analytic balance nu u0'' = g, then the discrete residual
    y, R, G = sp.symbols("y R G")
    u0 = R / 2 * G * (1 - y) * (0 - y)
    assert sp.simplify(sp.diff(u0, y, 2) / R - G) == 0
    rhs = momentum_rhs(u, p, w, 1.0 / re, g)
    assert np.max(np.abs(rhs.x)) < 1e-12 and np.max(np.abs(rhs.y)) < 1e-12


def test_uniform_flow_is_fixed_point():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, _ = g.mesh()
    u = vec(np.ones_like(X), 0 * X)
    p = np.full_like(X, 2.0)
    for tau in (0.0, 0.01, 1.0):
        rhs = momentum_rhs(u, p, compute_w(u, p, tau, g), 0.01, g)
        assert np.all(rhs.x == 0) and np.all(rhs.y == 0)


@settings(max_examples=25, deadline=None)
@given(
    a=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    b=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    p=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    tau=st.floats(1e-4, 1.0),
    k=st.floats(0.1, 10.0),
)
def test_w_is_linear_in_tau(a, b, p, tau, k):
    g = build_grid(1.25, 0.5, dx=0.25)
    u = vec(a, b)
    w1 = compute_w(u, p, tau, g)
    wk = compute_w(u, p, k * tau, g)
    np.testing.assert_allclose(wk.x, k * w1.x, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(wk.y, k * w1.y, rtol=1e-12, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    a=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    b=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    p=arrays(np.float64, (6, 5), elements=st.floats(-2, 2)),
    nu=st.floats(1e-3, 1.0),
)
def test_ns_limit_is_exact_at_tau_zero(a, b, p, nu):
    g = build_grid(1.25, 0.5, dx=0.25)
    u = vec(a, b)
    w = compute_w(u, p, 0.0, g)
    assert np.all(w.x == 0) and np.all(w.y == 0)
    rhs = momentum_rhs(u, p, w, nu, g)
    ns = navier_stokes_rhs(u, p, nu, g)
    inner = (slice(1, -1), slice(1, -1))
    assert np.array_equal(rhs.x[inner], ns.x[inner]) and np.array_equal(rhs.y[inner], ns.y[inner])
    assert np.all(rhs.x[0] == 0) and np.all(rhs.y[:, -1] == 0)


def test_divergence_examples():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, Y = g.mesh()
    np.testing.assert_allclose(divergence(vec(X, -Y), g), 0.0, atol=1e-13)
    np.testing.assert_allclose(divergence(vec(X, Y), g), 2.0, atol=1e-13)
    np.testing.assert_allclose(divergence(vec(Y, 0 * X), g), 0.0, atol=1e-13)


def test_one_sided_ends_exact_for_quadratics():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, Y = g.mesh()
    np.testing.assert_allclose(ddx(X**2, g.dx), 2 * X, atol=1e-12)
    np.testing.assert_allclose(ddy(Y**2 + X, g.dy), 2 * Y, atol=1e-12)


def test_dissipation_examples():
    g = build_grid(1.0, 0.5, dx=0.1)
    X, Y = g.mesh()
    zero = vec(0 * X, 0 * X)
    assert np.all(dissipation(vec(np.ones_like(X), 0 * X), zero, 0.01, 0.005, g) == 0)
    np.testing.assert_allclose(dissipation(vec(Y, 0 * X), zero, 0.01, 0.005, g), 0.01, rtol=1e-12)
    with pytest.raises(ValueError):
        dissipation(zero, zero, 0.01, 0.0, g)


@settings(max_examples=40, deadline=None)
@given(
    a=arrays(np.float64, (6, 5), elements=st.floats(-10, 10)),
    b=arrays(np.float64, (6, 5), elements=st.floats(-10, 10)),
    c=arrays(np.float64, (6, 5), elements=st.floats(-10, 10)),
    d=arrays(np.float64, (6, 5), elements=st.floats(-10, 10)),
    nu=st.floats(1e-4, 1.0),
    tau=st.floats(1e-4, 1.0),
)
def test_dissipation_non_negative(a, b, c, d, nu, tau):
    g = build_grid(1.25, 0.5, dx=0.25)
    assert np.min(dissipation(vec(a, b), vec(c, d), nu, tau, g)) >= 0.0


def test_momentum_rhs_rejects_bad_input():
    g = build_grid(1.0, 0.5, dx=0.5)
    z = np.zeros(g.shape)
    with pytest.raises(ValueError):
        momentum_rhs(vec(z, z), np.zeros((2, 2)), vec(z, z), 0.01, g)
    bad = z.copy()
    bad[1, 1] = np.nan
    with pytest.raises(FloatingPointError):
        momentum_rhs(vec(bad, z), z, vec(z, z), 0.01, g)
    with pytest.raises(ValueError):
        compute_w(vec(z, z), z, -1.0, g)


@settings(max_examples=25, deadline=None)
@given(
    f=arrays(np.float64, (5, 6, 5), elements=st.floats(-2, 2)),
    nu=st.floats(1e-3, 1.0),
)
def test_tensor_form_equals_term_sum(f, nu):
    from qhdstep.operators import qhd_terms

    g = build_grid(1.25, 0.5, dx=0.25)
    u, w, p = vec(f[0], f[1]), vec(f[2], f[3]), f[4]
    total = momentum_rhs(u, p, w, nu, g)
    ns, extra = navier_stokes_rhs(u, p, nu, g), qhd_terms(u, w, g)
    inner = (slice(1, -1), slice(1, -1))
    np.testing.assert_allclose(total.x[inner], (ns.x + extra.x)[inner], atol=1e-11)
    np.testing.assert_allclose(total.y[inner], (ns.y + extra.y)[inner], atol=1e-11)
