import json
from collections import Counter

import numpy as np
import pytest

from phireg.bruns import CODES, BrunsGameId, anti_diagonal_transpose, basis_payoffs, build_game, enumerate_144, export
from phireg.game import CaseClass, Game, classify_case, genericity_check, pure_nash_set, rescale_decompose, second_difference


def test_twelve_ordinal_bases():
    assert len(CODES) == 12
    for code in CODES:
        assert sorted(basis_payoffs(code).ravel()) == [1, 2, 3, 4]


def test_unknown_code():
    with pytest.raises(ValueError, match="Xx"):
        basis_payoffs("Xx")
    with pytest.raises(ValueError):
        BrunsGameId.parse("ChxXx")


def test_id_parse_roundtrip():
    gid = BrunsGameId.parse("Ba×As")
    assert gid == ("Ba", "As") and str(gid) == "BaxAs"


def test_anti_transpose():
    M = np.array([[1, 2], [3, 4]])
    T = anti_diagonal_transpose(M)
    assert T.tolist() == [[4, 2], [3, 1]]
    assert np.array_equal(anti_diagonal_transpose(T), M)
    for code in CODES:
        P = basis_payoffs(code)
        assert second_difference(anti_diagonal_transpose(P)) == second_difference(P)


def test_battle_assurance():
    g = build_game(("Ba", "As"))
    assert g.A.tolist() == [[3, 2], [1, 4]]
    assert g.B.tolist() == [[2, 4], [3, 1]]
    assert rescale_decompose(g).c == pytest.approx(-1.0)
    assert classify_case(g) == CaseClass.NO_PURE_NE


def test_suite_counts():
    games = enumerate_144()
    assert len(games) == 144
    assert len({str(gid) for gid, _ in games}) == 144
    counts = Counter(classify_case(g) for _, g in games)
    assert counts[CaseClass.NO_PURE_NE] == 18
    assert counts[CaseClass.UNIQUE_PURE_NE] == 28
    assert counts[CaseClass.TWO_PURE_NE] == 18
    assert counts[CaseClass.NON_GENERIC] == 80
    for _, g in games:
        if not genericity_check(g).generic:
            assert len(pure_nash_set(g)) == 1


def test_case_one_sign_pattern():
    # no pure equilibrium exactly when the two second differences have opposite signs
    for gid, g in enumerate_144():
        if classify_case(g) == CaseClass.NO_PURE_NE:
            assert second_difference(g.A) * second_difference(g.B) < 0, gid


def test_export(tmp_path):
    paths = export(tmp_path)
    assert len(paths) == 144
    g = Game.from_dict(json.loads((tmp_path / "ChxPd.json").read_text()))
    assert np.array_equal(g.A, build_game(("Ch", "Pd")).A)
