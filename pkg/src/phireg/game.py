"""Two-player normal-form games: payoffs, best responses and equilibrium checks.

Mixed strategies are plain 1-d numpy arrays; :func:`simplex_point` validates
and normalizes them. Correlated distributions get a small wrapper because
their marginals and conditionals are used throughout.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SIMPLEX_TOL = 1e-12
BR_TIE_TOL = 1e-12
NE_CERT_TOL = 1e-9

ROW, COL = 0, 1


class ContractViolation(ValueError):
    """Raised when an operation is called outside its documented domain."""


@dataclass(frozen=True, eq=False)
class Game:
    """Bimatrix game ``(A, B)``; the row player receives ``A``, the column player ``B``."""

    row_payoff: np.ndarray
    col_payoff: np.ndarray

    def __post_init__(self):
        A = np.array(self.row_payoff, dtype=float)
        B = np.array(self.col_payoff, dtype=float)
        if A.ndim != 2 or A.shape != B.shape:
            raise ContractViolation(f"payoff shapes differ: {A.shape} vs {B.shape}")
        if A.shape[0] < 2 or A.shape[1] < 2:
            raise ContractViolation(f"need at least 2 strategies per player, got {A.shape}")
        if not (np.isfinite(A).all() and np.isfinite(B).all()):
            raise ContractViolation("payoffs must be finite")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "row_payoff", A)
        object.__setattr__(self, "col_payoff", B)

    @property
    def A(self) -> np.ndarray:
        return self.row_payoff

    @property
    def B(self) -> np.ndarray:
        return self.col_payoff

    @property
    def n(self) -> int:
        return self.row_payoff.shape[0]

    @property
    def m(self) -> int:
        return self.row_payoff.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.row_payoff.shape

    def to_dict(self) -> dict:
        return {"row_payoff": self.row_payoff.tolist(), "col_payoff": self.col_payoff.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Game":
        extra = set(d) - {"row_payoff", "col_payoff"}
        if extra:
            raise ContractViolation(f"unknown game keys: {sorted(extra)}")
        return cls(d["row_payoff"], d["col_payoff"])

    @classmethod
    def load(cls, path) -> "Game":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    def shifted(self, col_shifts, row_shifts) -> "Game":
        """Equivalent game with ``a'_ij = a_ij + c_j`` and ``b'_ij = b_ij + d_i``."""
        c = np.asarray(col_shifts, dtype=float)
        d = np.asarray(row_shifts, dtype=float)
        return Game(self.row_payoff + c[None, :], self.col_payoff + d[:, None])

    def __repr__(self) -> str:
        return f"Game(A={self.row_payoff.tolist()}, B={self.col_payoff.tolist()})"


def zero_sum(A) -> Game:
    A = np.asarray(A, dtype=float)
    return Game(A, -A)


def matching_pennies() -> Game:
    return zero_sum([[1.0, -1.0], [-1.0, 1.0]])


def coordination_game() -> Game:
    """Both players get 1 when they pick the same action, else 0."""
    eye = np.eye(2)
    return Game(eye, eye)


def simplex_point(p, tol: float = 1e-9) -> np.ndarray:
    """Validate a probability vector and renormalize it so it sums to 1 within 1e-12."""
    p = np.array(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ContractViolation(f"strategy must be a 1-d vector, got shape {p.shape}")
    if not np.isfinite(p).all() or (p < -tol).any():
        raise ContractViolation(f"strategy has negative or non-finite entries: {p}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ContractViolation(f"strategy sums to {total!r}, not 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def is_interior(p, floor: float = 1e-9) -> bool:
    return bool(np.all(np.asarray(p) >= floor))


def vertex(k: int, n: int) -> np.ndarray:
    e = np.zeros(n)
    e[k] = 1.0
    return e


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Correlated distribution ``z`` over pure profiles."""

    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        if z.ndim != 2 or (z < -SIMPLEX_TOL).any() or abs(z.sum() - 1.0) > SIMPLEX_TOL:
            raise ContractViolation("joint distribution must be a non-negative matrix summing to 1")
        z = np.clip(z, 0.0, None)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def product(cls, x, y) -> "JointDistribution":
        return cls(np.outer(x, y))

    @property
    def row_marginal(self) -> np.ndarray:
        return self.z.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.z.sum(axis=0)

    def col_given_row(self, i: int) -> np.ndarray | None:
        """``z(2|i)``, or None if row ``i`` has zero mass."""
        mass = self.z[i].sum()
        return None if mass <= 0 else self.z[i] / mass

    def row_given_col(self, j: int) -> np.ndarray | None:
        mass = self.z[:, j].sum()
        return None if mass <= 0 else self.z[:, j] / mass


def _check_dims(g: Game, x, y):
    if len(x) != g.n or len(y) != g.m:
        raise ContractViolation(f"strategy sizes ({len(x)}, {len(y)}) do not match game {g.shape}")


def utilities(g: Game, x, y) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_dims(g, x, y)
    return float(x @ g.A @ y), float(x @ g.B @ y)


def payoff_vector(g: Game, player: int, opponent) -> np.ndarray:
    """Expected payoff of each pure strategy of ``player`` against ``opponent``."""
    opponent = np.asarray(opponent, dtype=float)
    if player == ROW:
        return g.A @ opponent
    return opponent @ g.B


def best_response(g: Game, player: int, opponent, tol: float = BR_TIE_TOL) -> set[int]:
    values = payoff_vector(g, player, opponent)
    top = values.max()
    return {int(k) for k in np.flatnonzero(values >= top - tol)}


def pure_nash_set(g: Game) -> set[tuple[int, int]]:
    out = set()
    for i in range(g.n):
        for j in range(g.m):
            if i in best_response(g, ROW, vertex(j, g.m)) and j in best_response(g, COL, vertex(i, g.n)):
                out.add((i, j))
    return out


def nash_violation(g: Game, x, y) -> float:
    """Largest gain available to either player from a pure deviation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u_row = g.A @ y
    u_col = x @ g.B
    return float(max(u_row.max() - x @ u_row, u_col.max() - u_col @ y))


def is_nash(g: Game, x, y, tol: float = NE_CERT_TOL) -> bool:
    return nash_violation(g, x, y) <= tol


def second_difference(M) -> float:
    M = np.asarray(M, dtype=float)
    return float(M[0, 0] - M[0, 1] - M[1, 0] + M[1, 1])


def _require_2x2(g: Game):
    if g.shape != (2, 2):
        raise ContractViolation(f"operation defined for 2x2 games only, got {g.shape}")


def interior_nash_2x2(g: Game) -> tuple[np.ndarray, np.ndarray] | None:
    """Fully mixed equilibrium of a 2x2 game from the indifference conditions.

    Returns None when the candidate falls outside the open unit interval.
    """
    _require_2x2(g)
    A, B = g.A, g.B
    sa, sb = second_difference(A), second_difference(B)
    if sa == 0 or sb == 0:
        raise ContractViolation("interior_nash_2x2 needs both second differences nonzero")
    x1 = (B[1, 1] - B[1, 0]) / sb
    y1 = (A[1, 1] - A[0, 1]) / sa
    if not (0.0 < x1 < 1.0 and 0.0 < y1 < 1.0):
        return None
    x = np.array([x1, 1.0 - x1])
    y = np.array([y1, 1.0 - y1])
    u_row, u_col = A @ y, x @ B
    if abs(u_row[0] - u_row[1]) > NE_CERT_TOL or abs(u_col[0] - u_col[1]) > NE_CERT_TOL:
        raise AssertionError(f"indifference certificate failed for {g!r}")
    return x, y


def _solve_indifference(M: np.ndarray) -> np.ndarray | None:
    """Solve ``M p = v 1, sum(p) = 1`` for ``p``; None if singular."""
    k = M.shape[1]
    lhs = np.zeros((k + 1, k + 1))
    lhs[:k, :k] = M
    lhs[:k, k] = -1.0
    lhs[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.linalg.cond(lhs) > 1e12:
        return None
    return sol[:k]


def nash_support_enumeration(g: Game, tol: float = NE_CERT_TOL) -> list[tuple[np.ndarray, np.ndarray]]:
    """All equilibria with equal-size supports, certified against pure deviations."""
    n, m = g.shape
    if n > 4 or m > 4:
        raise ContractViolation("support enumeration limited to games with at most 4 strategies")
    found: list[tuple[np.ndarray, np.ndarray]] = []
    for k in range(1, min(n, m) + 1):
        for I in itertools.combinations(range(n), k):
            for J in itertools.combinations(range(m), k):
                # column strategy makes row indifferent over I, and vice versa
                yJ = _solve_indifference(g.A[np.ix_(I, J)])
                xI = _solve_indifference(g.B[np.ix_(I, J)].T)
                if yJ is None or xI is None:
                    continue
                if (yJ < -tol).any() or (xI < -tol).any():
                    continue
                x = np.zeros(n)
                y = np.zeros(m)
                x[list(I)] = np.clip(xI, 0.0, None)
                y[list(J)] = np.clip(yJ, 0.0, None)
                x /= x.sum()
                y /= y.sum()
                if not is_nash(g, x, y, tol):
                    continue
                if any(np.allclose(x, fx, atol=1e-9) and np.allclose(y, fy, atol=1e-9) for fx, fy in found):
                    continue
                found.append((x, y))
    return found


def is_ce(g: Game, z: JointDistribution, tol: float = 1e-9) -> tuple[bool, float]:
    """Pure-deviation check of the correlated-equilibrium inequalities.

    Violation is measured on the conditional distributions; rows or columns
    with zero mass are skipped.
    """
    A, B = g.A, g.B
    worst = 0.0
    for i in range(g.n):
        cond = z.col_given_row(i)
        if cond is None:
            continue
        vals = A @ cond
        worst = max(worst, float(vals.max() - vals[i]))
    for j in range(g.m):
        cond = z.row_given_col(j)
        if cond is None:
            continue
        vals = cond @ B
        worst = max(worst, float(vals.max() - vals[j]))
    return worst <= tol, worst


def is_cce(g: Game, z: JointDistribution, tol: float = 1e-9) -> tuple[bool, float]:
    zz = z.z
    row_value = float((g.A * zz).sum())
    col_value = float((g.B * zz).sum())
    row_best = float((g.A @ z.col_marginal).max())
    col_best = float((z.row_marginal @ g.B).max())
    worst = max(0.0, row_best - row_value, col_best - col_value)
    return worst <= tol, worst


@dataclass(frozen=True)
class GenericityReport:
    unique_best_responses: bool
    row_nondegenerate: bool
    col_nondegenerate: bool

    @property
    def generic(self) -> bool:
        return self.unique_best_responses and self.row_nondegenerate and self.col_nondegenerate


def genericity_check(g: Game) -> GenericityReport:
    _require_2x2(g)
    A, B = g.A, g.B
    # exact comparisons: payoffs in every suite are small integers
    unique = all(len(set(A[:, j].tolist())) == 2 for j in range(2)) and all(
        len(set(B[i, :].tolist())) == 2 for i in range(2)
    )
    return GenericityReport(
        unique_best_responses=unique,
        row_nondegenerate=second_difference(A) != 0,
        col_nondegenerate=second_difference(B) != 0,
    )


class RescaleKind(enum.Enum):
    RESCALED_ZERO_SUM = "RescaledZeroSum"
    RESCALED_COORDINATION = "RescaledCoordination"


@dataclass(frozen=True, eq=False)
class RescaleDecomposition:
    """``(A, B) ~ (C, cC)``: ``a_ij = C_ij + v_j / c`` and ``b_ij = c C_ij - u_i``."""

    c: float
    C: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def kind(self) -> RescaleKind:
        return RescaleKind.RESCALED_ZERO_SUM if self.c < 0 else RescaleKind.RESCALED_COORDINATION

    @property
    def row_shifts(self) -> np.ndarray:
        """Column-wise shifts added to ``C`` to recover ``A``."""
        return self.v / self.c

    @property
    def col_shifts(self) -> np.ndarray:
        """Row-wise shifts added to ``cC`` to recover ``B``."""
        return -self.u

    def reconstruct(self) -> Game:
        return Game(self.C + self.row_shifts[None, :], self.c * self.C + self.col_shifts[:, None])

    def core_game(self) -> Game:
        return Game(self.C, self.c * self.C)


def rescale_decompose(g: Game) -> RescaleDecomposition:
    _require_2x2(g)
    A, B = g.A, g.B
    sa, sb = second_difference(A), second_difference(B)
    if sa == 0 or sb == 0:
        raise ContractViolation("rescale decomposition undefined for degenerate games")
    c = sb / sa
    D = c * A - B
    u = D[:, 1].copy()
    v = D[1, :] - D[1, 1]
    C = A - v[None, :] / c
    return RescaleDecomposition(c=c, C=C, u=u, v=v)


class CaseClass(enum.Enum):
    NO_PURE_NE = "CaseI_NoPureNE"
    UNIQUE_PURE_NE = "CaseII_UniquePureNE"
    TWO_PURE_NE = "CaseIII_TwoPureNE"
    NON_GENERIC = "NonGeneric"


def classify_case(g: Game) -> CaseClass:
    if g.shape != (2, 2) or not genericity_check(g).generic:
        return CaseClass.NON_GENERIC
    count = len(pure_nash_set(g))
    if count > 2:
        raise ContractViolation(f"generic 2x2 game with {count} pure equilibria: {g!r}")
    return [CaseClass.NO_PURE_NE, CaseClass.UNIQUE_PURE_NE, CaseClass.TWO_PURE_NE][count]
