"""The twelve Bruns (2015) ordinal 2x2 basis games and the 144-game suite."""

from __future__ import annotations

import json
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .game import Game

# Row-player payoffs, in the canonical listing order.
BASIS: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "Ch": ((2, 3), (1, 4)),  # Chicken
    "Ba": ((3, 2), (1, 4)),  # Battle
    "Hr": ((3, 1), (2, 4)),  # Hero
    "Cm": ((2, 1), (3, 4)),  # Compromise
    "Dl": ((1, 2), (3, 4)),  # Deadlock
    "Pd": ((1, 3), (2, 4)),  # Prisoner's dilemma
    "Sh": ((1, 4), (2, 3)),  # Stag hunt
    "As": ((1, 4), (3, 2)),  # Assurance
    "Co": ((2, 4), (3, 1)),  # Coordination
    "Pc": ((3, 4), (2, 1)),  # Peace
    "Ha": ((3, 4), (1, 2)),  # Harmony
    "Nc": ((2, 4), (1, 3)),  # Concord
}
CODES: tuple[str, ...] = tuple(BASIS)


class BrunsGameId(NamedTuple):
    row_code: str
    col_code: str

    def __str__(self) -> str:
        return f"{self.row_code}x{self.col_code}"

    @classmethod
    def parse(cls, text: str) -> "BrunsGameId":
        parts = text.replace("×", "x").split("x")
        if len(parts) != 2 or any(p not in BASIS for p in parts):
            raise ValueError(f"not a Bruns game id: {text!r}")
        return cls(*parts)


def basis_payoffs(code: str) -> np.ndarray:
    try:
        rows = BASIS[code]
    except KeyError:
        raise ValueError(f"unknown Bruns basis code {code!r}; expected one of {', '.join(CODES)}") from None
    return np.array(rows, dtype=float)


def anti_diagonal_transpose(M) -> np.ndarray:
    """Reflect a 2x2 matrix about its anti-diagonal: ``out[i][j] = M[1-j][1-i]``."""
    M = np.asarray(M)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
    return M[::-1, ::-1].T.copy()


def build_game(game_id: BrunsGameId | tuple[str, str]) -> Game:
    row_code, col_code = game_id
    return Game(basis_payoffs(row_code), anti_diagonal_transpose(basis_payoffs(col_code)))


def enumerate_144() -> list[tuple[BrunsGameId, Game]]:
    return [(BrunsGameId(r, c), build_game((r, c))) for r in CODES for c in CODES]


def export(out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for gid, g in enumerate_144():
        path = out / f"{gid}.json"
        path.write_text(json.dumps(g.to_dict()) + "\n")
        paths.append(path)
    return paths
