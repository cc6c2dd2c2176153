import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phireg.game import (
    CaseClass,
    ContractViolation,
    Game,
    JointDistribution,
    RescaleKind,
    best_response,
    classify_case,
    coordination_game,
    genericity_check,
    interior_nash_2x2,
    is_cce,
    is_ce,
    is_nash,
    matching_pennies,
    nash_support_enumeration,
    payoff_vector,
    pure_nash_set,
    rescale_decompose,
    second_difference,
    simplex_point,
    utilities,
    zero_sum,
)

payoffs2 = arrays(np.float64, (2, 2), elements=st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3)))


def games2():
    return st.builds(Game, payoffs2, payoffs2)


pos = st.floats(0.1, 5)
base = st.floats(-5, 5)


@st.composite
def cyclic_games(draw):
    """Best responses cycle, so the only equilibrium is interior."""
    a0, a1, b0, b1 = draw(base), draw(base), draw(base), draw(base)
    p1, p2, q1, q2 = draw(pos), draw(pos), draw(pos), draw(pos)
    return Game([[a0 + p1, a1], [a0, a1 + p2]], [[b0, b0 + q1], [b1 + q2, b1]])


def test_game_validation():
    with pytest.raises(ContractViolation):
        Game(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ContractViolation):
        Game([[0.0, np.nan], [0, 0]], np.zeros((2, 2)))
    g = Game([[1, 2], [3, 4]], [[0, 0], [0, 0]])
    assert g.shape == (2, 2)
    with pytest.raises(ValueError):
        g.A[0, 0] = 5


def test_json_roundtrip(tmp_path):
    g = Game([[1.5, 2], [3, 4]], [[0, 1], [2, 3]])
    g.dump(tmp_path / "g.json")
    h = Game.load(tmp_path / "g.json")
    assert np.array_equal(g.A, h.A) and np.array_equal(g.B, h.B)
    with pytest.raises(ContractViolation):
        Game.from_dict({"row_payoff": [[1]], "col_payoff": [[1]], "extra": 1})


def test_simplex_point_rejects_off_simplex():
    assert np.allclose(simplex_point([0.25, 0.75]), [0.25, 0.75])
    with pytest.raises(ContractViolation):
        simplex_point([0.5, 0.6])
    with pytest.raises(ContractViolation):
        simplex_point([1.2, -0.2])


def test_matching_pennies_equilibrium():
    g = matching_pennies()
    x, y = interior_nash_2x2(g)
    assert np.allclose(x, 0.5) and np.allclose(y, 0.5)
    assert is_nash(g, x, y)
    assert pure_nash_set(g) == set()
    assert utilities(g, x, y) == pytest.approx((0.0, 0.0))


def test_coordination_pure_equilibria():
    g = coordination_game()
    assert pure_nash_set(g) == {(0, 0), (1, 1)}
    assert best_response(g, 0, [0.5, 0.5]) == {0, 1}
    assert best_response(g, 0, [0.6, 0.4]) == {0}


def test_zero_second_difference_is_rejected():
    g = Game([[1, 1], [1, 1]], [[1, 2], [2, 1]])
    assert second_difference(g.A) == 0
    with pytest.raises(ContractViolation):
        interior_nash_2x2(g)


@given(cyclic_games())
def test_interior_nash_indifference(g):
    assert genericity_check(g).generic
    assert classify_case(g) == CaseClass.NO_PURE_NE
    x, y = interior_nash_2x2(g)
    assert 0 < x[0] < 1 and 0 < y[0] < 1
    # each player is indifferent between both actions
    u_row = payoff_vector(g, 0, y)
    u_col = payoff_vector(g, 1, x)
    assert abs(u_row[0] - u_row[1]) < 1e-9
    assert abs(u_col[0] - u_col[1]) < 1e-9


def test_support_enumeration_rps_variant():
    A = np.array([[0.0, -1, 2], [1, 0, -1], [-2, 1, 0]])
    (x, y), = nash_support_enumeration(zero_sum(A))
    assert np.allclose(y, [0.25, 0.5, 0.25], atol=1e-12)
    assert np.allclose(x, [0.25, 0.5, 0.25], atol=1e-12)


def test_support_enumeration_matches_linear_solve():
    A = np.array([[1.0, -1, 1.2], [1, 0, -1], [-1, 1, -0.5]])
    (x, y), = nash_support_enumeration(zero_sum(A))
    # full-support oracle: A y = v 1, 1'y = 1
    M = np.block([[A, -np.ones((3, 1))], [np.ones((1, 3)), np.zeros((1, 1))]])
    sol = np.linalg.solve(M, [0, 0, 0, 1])
    assert np.allclose(y, sol[:3], atol=1e-12)
    assert np.all(x > 0) and is_nash(zero_sum(A), x, y)


def test_support_enumeration_pure_and_mixed():
    eqs = nash_support_enumeration(coordination_game())
    assert len(eqs) == 3
    assert any(np.allclose(x, [0.5, 0.5]) for x, _ in eqs)


def test_ce_and_cce():
    g = coordination_game()
    z = JointDistribution(np.array([[5, 3], [3, 5]]) / 16)
    assert is_cce(g, z)[0]
    # conditional on either action, the opponent matches with probability 5/8
    assert is_ce(g, z)[0]
    bad = JointDistribution(np.array([[0, 0.5], [0.5, 0]]))
    ok, viol = is_cce(g, bad)
    assert not ok and viol == pytest.approx(0.5)
    assert not is_ce(g, bad)[0]
    mp = matching_pennies()
    assert is_ce(mp, JointDistribution.product([0.5, 0.5], [0.5, 0.5]))[0]


@given(games2(), arrays(np.float64, 2, elements=st.floats(-3, 3)), arrays(np.float64, 2, elements=st.floats(-3, 3)))
def test_shift_preserves_best_responses(g, cs, rs):
    h = g.shifted(cs, rs)
    assert pure_nash_set(h) == pure_nash_set(g)
    for y in ([0.3, 0.7], [0.9, 0.1]):
        assert best_response(h, 0, y, tol=1e-9) == best_response(g, 0, y, tol=1e-9)


@given(games2())
def test_rescale_reconstructs(g):
    assume(abs(second_difference(g.A)) > 1e-3 and abs(second_difference(g.B)) > 1e-3)
    dec = rescale_decompose(g)
    back = dec.reconstruct()
    assert np.allclose(back.A, g.A, atol=1e-9) and np.allclose(back.B, g.B, atol=1e-9)
    core = dec.core_game()
    assert np.allclose(core.B, dec.c * core.A, atol=1e-9)
    assert dec.kind == (RescaleKind.RESCALED_ZERO_SUM if dec.c < 0 else RescaleKind.RESCALED_COORDINATION)


def test_zero_sum_has_unit_negative_ratio():
    dec = rescale_decompose(matching_pennies())
    assert dec.c == pytest.approx(-1.0)


def test_classify_case():
    assert classify_case(matching_pennies()) == CaseClass.NO_PURE_NE
    assert classify_case(coordination_game()) == CaseClass.TWO_PURE_NE
    pd = Game([[3, 0], [5, 1]], [[3, 5], [0, 1]])
    assert classify_case(pd) == CaseClass.UNIQUE_PURE_NE
    tie = Game([[1, 1], [1, 2]], [[1, 0], [1, 2]])
    assert classify_case(tie) == CaseClass.NON_GENERIC
    assert classify_case(zero_sum(np.eye(3))) == CaseClass.NON_GENERIC
