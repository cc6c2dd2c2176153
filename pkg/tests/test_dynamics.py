import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phireg.bruns import build_game, enumerate_144
from phireg.dynamics import (
    ConservedQuantity,
    IntegrationError,
    IntegratorConfig,
    detect_period,
    integrate,
    invariant_series,
    kl_divergence,
    rd_vector_field,
    rd_vector_field_batch,
)
from phireg.game import CaseClass, ContractViolation, Game, classify_case, interior_nash_2x2, matching_pennies, zero_sum

interior = st.floats(0.02, 0.98)


@st.composite
def simplex(draw, n):
    w = np.array([draw(st.floats(0.05, 1.0)) for _ in range(n)])
    return w / w.sum()


@st.composite
def small_games(draw):
    n, m = draw(st.integers(2, 3)), draw(st.integers(2, 3))
    vals = st.floats(-2, 2)
    A = np.array([[draw(vals) for _ in range(m)] for _ in range(n)])
    B = np.array([[draw(vals) for _ in range(m)] for _ in range(n)])
    return Game(A, B)


@given(small_games(), st.data())
def test_field_is_tangent_to_simplex(g, data):
    x = data.draw(simplex(g.n))
    y = data.draw(simplex(g.m))
    dx, dy = rd_vector_field(g, x, y)
    assert abs(dx.sum()) < 1e-12 and abs(dy.sum()) < 1e-12
    bx, by = rd_vector_field_batch(g, x[None], y[None])
    assert np.allclose(bx[0], dx) and np.allclose(by[0], dy)


def test_field_vanishes_at_vertices_and_equilibria():
    g = build_game(("Ba", "As"))
    x, y = interior_nash_2x2(g)
    dx, dy = rd_vector_field(g, x, y)
    assert np.abs(dx).max() < 1e-12 and np.abs(dy).max() < 1e-12
    dx, dy = rd_vector_field(g, [1.0, 0.0], [0.0, 1.0])
    assert not dx.any() and not dy.any()


@given(small_games(), st.data())
def test_integration_stays_interior(g, data):
    x0 = data.draw(simplex(g.n))
    y0 = data.draw(simplex(g.m))
    tr = integrate(g, x0, y0, IntegratorConfig(dt=1e-2, T=20, record_stride=5))
    for P in (tr.x, tr.y):
        assert (P > 0).all()
        assert np.abs(P.sum(axis=1) - 1).max() < 1e-12
    assert len(tr) == 20 / (1e-2 * 5) + 1
    assert tr.horizon == pytest.approx(20)


def test_rejects_boundary_start():
    with pytest.raises(ContractViolation):
        integrate(matching_pennies(), [1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ContractViolation):
        integrate(matching_pennies(), [0.5, 0.5, 0.0], [0.5, 0.5])
    with pytest.raises(ContractViolation):
        IntegratorConfig(dt=0)


def test_overflow_is_reported():
    g = Game([[1e308, -1e308], [-1e308, 1e308]], [[1e308, -1e308], [-1e308, 1e308]])
    with pytest.raises(IntegrationError) as err:
        integrate(g, [0.6, 0.4], [0.5, 0.5], IntegratorConfig(dt=1e-2, T=1))
    assert err.value.step >= 1


@given(st.data())
def test_kl_divergence_properties(data):
    p = data.draw(simplex(3))
    q = data.draw(simplex(3))
    assert kl_divergence(p, q) >= -1e-15
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == float("inf")
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(np.log(2))


def test_invariant_is_conserved_for_case_one():
    for gid, g in enumerate_144():
        if classify_case(g) != CaseClass.NO_PURE_NE:
            continue
        tr = integrate(g, [0.3, 0.7], [0.8, 0.2], IntegratorConfig(T=20))
        assert invariant_series(tr).drift() < 1e-10, gid


def test_invariant_weight_uses_ratio():
    g = Game([[2.0, 0], [0, 1]], [[0, 3.0], [3.0, 0]])
    q = ConservedQuantity.for_game(g)
    assert q.c == pytest.approx(-2.0)
    tr = integrate(g, [0.2, 0.8], [0.4, 0.6], IntegratorConfig(T=30))
    assert np.ptp(q.along(tr)) < 1e-10
    # the unweighted sum is not conserved when c != -1
    naive = [kl_divergence(q.x_star, x) + kl_divergence(q.y_star, y) for x, y in zip(tr.x, tr.y)]
    assert np.ptp(naive) > 1e-3


def test_period_detection_returns_to_start():
    g = matching_pennies()
    tr = integrate(g, [0.9, 0.1], [0.5, 0.5], IntegratorConfig(T=30))
    period = detect_period(tr)
    assert period is not None and 7 < period < 9
    again = integrate(g, [0.9, 0.1], [0.5, 0.5], IntegratorConfig(T=period, dt=period / 8000, record_stride=1))
    assert np.abs(again.x[-1] - [0.9, 0.1]).max() < 1e-6
    assert detect_period(tr.truncate(5.0)) is None


def test_period_absent_for_convergent_dynamics():
    pd = Game([[3, 0], [5, 1]], [[3, 5], [0, 1]])
    tr = integrate(pd, [0.5, 0.5], [0.5, 0.5], IntegratorConfig(T=50))
    assert detect_period(tr) is None


def test_rk4_fourth_order_at_coarse_steps():
    g = build_game(("Ba", "As"))
    drifts = []
    for dt in (0.04, 0.02, 0.01):
        tr = integrate(g, [0.2, 0.8], [0.7, 0.3], IntegratorConfig(dt=dt, T=20, record_stride=1))
        drifts.append(invariant_series(tr).drift())
    assert drifts[0] / drifts[1] > 12 and drifts[1] / drifts[2] > 12


def test_symmetric_start_stays_symmetric():
    g = zero_sum([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
    tr = integrate(g, [0.5, 0.3, 0.2], [0.5, 0.3, 0.2], IntegratorConfig(T=10))
    assert np.array_equal(tr.x, tr.y)


def test_csv_layout():
    tr = integrate(matching_pennies(), [0.9, 0.1], [0.5, 0.5], IntegratorConfig(T=0.1, record_stride=10))
    lines = tr.to_csv(["hello"]).splitlines()
    assert lines[0] == "# hello"
    assert lines[1] == "t,x1,x2,y1,y2"
    assert len(lines) == 2 + len(tr)
    assert [float(v) for v in lines[2].split(",")] == [0.0, 0.9, 0.1, 0.5, 0.5]
