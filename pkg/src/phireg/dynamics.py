"""Replicator dynamics: vector field, fixed-step RK4 integration, invariants, periods."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize_scalar

from .game import ContractViolation, Game, interior_nash_2x2, rescale_decompose


class IntegrationError(ArithmeticError):
    """Non-finite state produced during integration."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    T: float = 1000.0
    record_stride: int = 10
    interior_floor: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0 or not self.T > 0:
            raise ContractViolation(f"dt and T must be positive (dt={self.dt}, T={self.T})")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ContractViolation(f"record_stride must be a positive integer, got {self.record_stride}")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def sample_dt(self) -> float:
        return self.dt * self.record_stride


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled joint strategy path ``(x^t, y^t)``."""

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    game: Game
    config: IntegratorConfig

    def __len__(self) -> int:
        return len(self.times)

    @property
    def h(self) -> float:
        """Spacing between recorded samples."""
        return self.config.sample_dt

    @property
    def horizon(self) -> float:
        return float(self.times[-1] - self.times[0])

    def state(self) -> np.ndarray:
        """Stacked ``(x, y)`` per sample, shape ``(N, n + m)``."""
        return np.hstack([self.x, self.y])

    def reduced_state(self) -> np.ndarray:
        """``(x1, y1)`` for 2x2 games, otherwise the full stacked state."""
        if self.game.shape == (2, 2):
            return np.column_stack([self.x[:, 0], self.y[:, 0]])
        return self.state()

    def truncate(self, t_end: float) -> "Trajectory":
        k = int(np.searchsorted(self.times, t_end + 1e-9 * self.h, side="right"))
        return Trajectory(self.times[:k], self.x[:k], self.y[:k], self.game, self.config)

    def to_csv(self, header_lines: list[str] | None = None) -> str:
        buf = io.StringIO()
        for line in header_lines or []:
            buf.write(f"# {line}\n")
        n, m = self.x.shape[1], self.y.shape[1]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{j + 1}" for j in range(m)])
        for t, xs, ys in zip(self.times, self.x, self.y):
            w.writerow([f"{v:.17g}" for v in (t, *xs, *ys)])
        return buf.getvalue()


def rd_vector_field(g: Game, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Two-population replicator field at ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Ay = g.A @ y
    xB = x @ g.B
    return x * (Ay - x @ Ay), y * (xB - xB @ y)


def rd_vector_field_batch(g: Game, X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise field for stacks of states ``X (N, n)``, ``Y (N, m)``."""
    AY = Y @ g.A.T
    XB = X @ g.B
    ux = np.einsum("ki,ki->k", X, AY)
    uy = np.einsum("kj,kj->k", XB, Y)
    return X * (AY - ux[:, None]), Y * (XB - uy[:, None])


@numba.njit(cache=True, inline="always")
def _field(A, B, x, y, dx, dy):
    n, m = A.shape
    ua = 0.0
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += A[i, j] * y[j]
        dx[i] = s
        ua += x[i] * s
    ub = 0.0
    for j in range(m):
        s = 0.0
        for i in range(n):
            s += x[i] * B[i, j]
        dy[j] = s
        ub += s * y[j]
    for i in range(n):
        dx[i] = x[i] * (dx[i] - ua)
    for j in range(m):
        dy[j] = y[j] * (dy[j] - ub)


@numba.njit(cache=True, inline="always")
def _project(v, base, h6, k1, k2, k3, k4, floor):
    total = 0.0
    finite = True
    for i in range(v.shape[0]):
        val = base[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if not np.isfinite(val):
            finite = False
        if val < floor:
            val = floor
        v[i] = val
        total += val
    for i in range(v.shape[0]):
        v[i] /= total
    return finite


@numba.njit(cache=True)
def _rk4(A, B, x0, y0, dt, n_steps, stride, floor):
    n, m = A.shape
    n_rec = n_steps // stride + 1
    X = np.empty((n_rec, n))
    Y = np.empty((n_rec, m))
    x = x0.copy()
    y = y0.copy()
    X[0] = x
    Y[0] = y
    k1x = np.empty(n)
    k2x = np.empty(n)
    k3x = np.empty(n)
    k4x = np.empty(n)
    k1y = np.empty(m)
    k2y = np.empty(m)
    k3y = np.empty(m)
    k4y = np.empty(m)
    tx = np.empty(n)
    ty = np.empty(m)
    half = 0.5 * dt
    h6 = dt / 6.0
    r = 1
    for step in range(1, n_steps + 1):
        _field(A, B, x, y, k1x, k1y)
        for i in range(n):
            tx[i] = x[i] + half * k1x[i]
        for j in range(m):
            ty[j] = y[j] + half * k1y[j]
        _field(A, B, tx, ty, k2x, k2y)
        for i in range(n):
            tx[i] = x[i] + half * k2x[i]
        for j in range(m):
            ty[j] = y[j] + half * k2y[j]
        _field(A, B, tx, ty, k3x, k3y)
        for i in range(n):
            tx[i] = x[i] + dt * k3x[i]
        for j in range(m):
            ty[j] = y[j] + dt * k3y[j]
        _field(A, B, tx, ty, k4x, k4y)
        ok_x = _project(tx, x, h6, k1x, k2x, k3x, k4x, floor)
        ok_y = _project(ty, y, h6, k1y, k2y, k3y, k4y, floor)
        if not (ok_x and ok_y):
            return X[:r], Y[:r], step
        for i in range(n):
            x[i] = tx[i]
        for j in range(m):
            y[j] = ty[j]
        if step % stride == 0:
            for i in range(n):
                X[r, i] = x[i]
            for j in range(m):
                Y[r, j] = y[j]
            r += 1
    return X, Y, -1


def integrate(g: Game, x0, y0, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Classical RK4 with clamp-and-renormalize projection after every step."""
    cfg = cfg or IntegratorConfig()
    x0 = np.array(x0, dtype=float)
    y0 = np.array(y0, dtype=float)
    if x0.shape != (g.n,) or y0.shape != (g.m,):
        raise ContractViolation(f"initial state sizes {x0.shape}, {y0.shape} do not match game {g.shape}")
    for p in (x0, y0):
        if not (p > 0).all() or abs(p.sum() - 1.0) > 1e-9:
            raise ContractViolation(f"initial strategies must be strictly interior points of the simplex: {p}")
    x0 /= x0.sum()
    y0 /= y0.sum()
    stride = int(cfg.record_stride)
    n_steps = cfg.n_steps - cfg.n_steps % stride
    X, Y, bad = _rk4(
        np.ascontiguousarray(g.A), np.ascontiguousarray(g.B), x0, y0, float(cfg.dt), n_steps, stride, float(cfg.interior_floor)
    )
    if bad >= 0:
        raise IntegrationError(f"non-finite state at step {bad} (t={bad * cfg.dt:g}) for {g!r}", bad)
    times = np.arange(len(X)) * cfg.sample_dt
    return Trajectory(times, X, Y, g, cfg)


def kl_divergence(p, q) -> float:
    """``sum_i p_i ln(p_i / q_i)`` with ``0 ln 0 = 0``; +inf if ``q`` misses mass of ``p``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if (q[mask] <= 0).any():
        return float("inf")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_divergence_rows(p: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """``KL(p || Q[k])`` for every row of ``Q``."""
    mask = p > 0
    return np.sum(p[mask] * (np.log(p[mask])[None, :] - np.log(Q[:, mask])), axis=1)


def kl_divergence_rows_from(P: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``KL(P[k] || q)`` for every row of ``P``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * (np.log(P) - np.log(q)[None, :]), 0.0)
    return terms.sum(axis=1)


@dataclass(frozen=True)
class ConservedQuantity:
    """``J(x, y) = KL(x* || x) - KL(y* || y) / c`` for a generic 2x2 game with interior NE."""

    x_star: np.ndarray
    y_star: np.ndarray
    c: float

    @classmethod
    def for_game(cls, g: Game) -> "ConservedQuantity":
        ne = interior_nash_2x2(g)
        if ne is None:
            raise ContractViolation(f"no interior Nash equilibrium for {g!r}")
        return cls(ne[0], ne[1], rescale_decompose(g).c)

    def __call__(self, x, y) -> float:
        return kl_divergence(self.x_star, x) - kl_divergence(self.y_star, y) / self.c

    def along(self, traj: Trajectory) -> np.ndarray:
        return kl_divergence_rows(self.x_star, traj.x) - kl_divergence_rows(self.y_star, traj.y) / self.c


def invariant_value(g: Game, x, y) -> float:
    return ConservedQuantity.for_game(g)(x, y)


@dataclass(frozen=True, eq=False)
class InvariantSeries:
    values: np.ndarray
    weight_c: float

    def drift(self, upto: int | None = None) -> float:
        v = self.values[: upto if upto is None else upto + 1]
        return float(np.max(np.abs(v - v[0])))


def invariant_series(traj: Trajectory) -> InvariantSeries:
    q = ConservedQuantity.for_game(traj.game)
    return InvariantSeries(q.along(traj), q.c)


def _sample_derivatives(traj: Trajectory) -> np.ndarray:
    dx, dy = rd_vector_field_batch(traj.game, traj.x, traj.y)
    return np.hstack([dx, dy])


@dataclass
class HermiteInterpolant:
    """Piecewise cubic Hermite interpolation of a trajectory using the RD field as slope."""

    traj: Trajectory
    columns: np.ndarray | None = None
    _states: np.ndarray = field(init=False, repr=False)
    _slopes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        states = self.traj.state()
        slopes = _sample_derivatives(self.traj)
        if self.columns is not None:
            states, slopes = states[:, self.columns], slopes[:, self.columns]
        self._states = states
        self._slopes = slopes

    def __call__(self, t: float) -> np.ndarray:
        h = self.traj.h
        k = int(min(max(np.floor(t / h), 0), len(self._states) - 2))
        s = (t - k * h) / h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        p0, p1 = self._states[k], self._states[k + 1]
        m0, m1 = self._slopes[k], self._slopes[k + 1]
        return h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1


def _reduced_columns(traj: Trajectory) -> np.ndarray | None:
    if traj.game.shape == (2, 2):
        return np.array([0, 2])
    return None


def detect_period(traj: Trajectory, eps: float = 1e-4, t_min: float | None = None) -> float | None:
    """Smallest return time to the initial state within ``eps`` (sup-norm).

    Candidates are local minima of the sampled distance to the start; each is
    refined on the cubic Hermite interpolant over its two neighbouring
    intervals. The path must first move farther than ``eps`` away.
    """
    h = traj.h
    t_min = 10 * h if t_min is None else t_min
    s = traj.reduced_state()
    d = np.max(np.abs(s - s[0]), axis=1)
    moved = np.flatnonzero(d > eps)
    if moved.size == 0:
        return None
    start = max(int(moved[0]), int(np.ceil(t_min / h)), 1)
    step_size = np.max(np.abs(np.diff(s, axis=0)), axis=1)
    interp = HermiteInterpolant(traj, _reduced_columns(traj))
    s0 = s[0]
    for k in range(start, len(d) - 1):
        if not (d[k] <= d[k - 1] and d[k] <= d[k + 1]):
            continue
        if d[k] > 2 * max(step_size[k - 1], step_size[k]) + eps:
            continue
        res = minimize_scalar(
            lambda t: float(np.max(np.abs(interp(t) - s0))),
            bounds=(traj.times[k - 1], traj.times[k + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun < eps:
            return float(res.x)
    return None
