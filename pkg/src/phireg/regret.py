"""Regret over recorded strategy paths: external, internal, swap and mosaic.

All integrals use the trapezoidal rule at the recording stride, and every
regret value is read off the same per-bin matrices

    S_k[a, b] = integral of x_a(t) u_b(t) 1[x(t) in bin k] dt,

so the hierarchy ``external <= swap <= mosaic`` holds up to rounding.

The mosaic maximum over maps affine on each bin is computed per bin as
``sum_a max_b S_k[a, b]``. The deviation value is linear in the affine map,
and an affine self-map of the simplex is fixed by the images of the vertices,
each of which ranges over the simplex; the maximum is therefore attained with
every vertex sent to a vertex, i.e. a lifted pure swap function.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import (
    HermiteInterpolant,
    IntegratorConfig,
    Trajectory,
    detect_period,
    kl_divergence_rows_from,
    rd_vector_field,
)
from .game import COL, ROW, ContractViolation, Game, JointDistribution, coordination_game

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """Finite partition of a player's simplex.

    ``interval``: ``k`` bins ``[j/k, (j+1)/k)`` on one coordinate, last bin closed.
    ``kl_band``: bin 0 holds ``|KL(x || center) - reference| <= eps``, bin 1 the rest.
    ``singleton``: the whole simplex.
    """

    scheme: str
    k: int = 1
    coordinate: int = 0
    reference: float = 0.0
    eps: float = 0.0
    center: tuple[float, ...] = ()

    @classmethod
    def interval(cls, k: int, coordinate: int = 0) -> "Partition":
        if k < 1:
            raise ContractViolation("need at least one bin")
        return cls("interval", k=k, coordinate=coordinate)

    @classmethod
    def kl_band(cls, reference: float, eps: float, center) -> "Partition":
        if eps <= 0:
            raise ContractViolation("band half-width must be positive")
        return cls("kl_band", k=2, reference=float(reference), eps=float(eps), center=tuple(map(float, center)))

    @classmethod
    def singleton(cls) -> "Partition":
        return cls("singleton", k=1)

    @property
    def n_bins(self) -> int:
        return self.k

    def assign(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        if self.scheme == "singleton":
            return np.zeros(len(X), dtype=np.int64)
        if self.scheme == "interval":
            b = np.floor(X[:, self.coordinate] * self.k).astype(np.int64)
            return np.clip(b, 0, self.k - 1)
        if self.scheme == "kl_band":
            kl = kl_divergence_rows_from(X, np.asarray(self.center))
            return np.where(np.abs(kl - self.reference) <= self.eps, 0, 1).astype(np.int64)
        raise ContractViolation(f"unknown partition scheme {self.scheme!r}")

    def refine(self, factor: int) -> "Partition":
        """Interval partition whose bins split each of ours into ``factor`` pieces."""
        if self.scheme == "singleton":
            return Partition.interval(factor, self.coordinate)
        if self.scheme != "interval":
            raise ContractViolation("only interval and singleton partitions can be refined")
        return Partition.interval(self.k * factor, self.coordinate)


@dataclass(frozen=True, eq=False)
class SwapAccumulator:
    S: np.ndarray  # (K, n, n)
    occupancy: np.ndarray  # (K,)
    utility_integral: np.ndarray  # (n,), raw integral of u
    horizon: float

    @property
    def total(self) -> np.ndarray:
        return self.S.sum(axis=0)

    @property
    def realized(self) -> float:
        return float(np.trace(self.total))

    def merged(self) -> "SwapAccumulator":
        """Collapse all bins into one."""
        return SwapAccumulator(self.total[None], self.occupancy.sum(keepdims=True), self.utility_integral, self.horizon)


def _own_and_utilities(traj: Trajectory, player: int) -> tuple[np.ndarray, np.ndarray]:
    g = traj.game
    if player == ROW:
        return traj.x, traj.y @ g.A.T
    if player == COL:
        return traj.y, traj.x @ g.B
    raise ContractViolation(f"player must be ROW or COL, got {player}")


def _increments(traj: Trajectory, part: Partition, player: int):
    if len(traj) < 2:
        raise ContractViolation("trajectory needs at least two samples")
    own, U = _own_and_utilities(traj, player)
    dt = np.diff(traj.times)
    prod = own[:, :, None] * U[:, None, :]
    inc = 0.5 * dt[:, None, None] * (prod[:-1] + prod[1:])
    uinc = 0.5 * dt[:, None] * (U[:-1] + U[1:])
    bins = part.assign(own[:-1])
    return bins, inc, uinc, dt


def accumulate_series(traj: Trajectory, part: Partition, player: int, checkpoints) -> list[SwapAccumulator]:
    """Accumulators for ``[0, t_c]`` at each checkpoint sample index ``c`` (increasing)."""
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if checkpoints.size and (np.any(np.diff(checkpoints) <= 0) or checkpoints[0] < 1 or checkpoints[-1] >= len(traj)):
        raise ContractViolation("checkpoints must be increasing sample indices in [1, N)")
    bins, inc, uinc, dt = _increments(traj, part, player)
    K, n = part.n_bins, inc.shape[1]
    n_seg = len(checkpoints)
    seg = np.searchsorted(checkpoints, np.arange(len(dt)), side="right")
    keep = seg < n_seg
    key = seg[keep] * K + bins[keep]
    size = n_seg * K
    flat = inc[keep].reshape(-1, n * n)
    S = np.stack([np.bincount(key, weights=flat[:, e], minlength=size) for e in range(n * n)], axis=1)
    S = np.cumsum(S.reshape(n_seg, K, n, n), axis=0)
    occ = np.cumsum(np.bincount(key, weights=dt[keep], minlength=size).reshape(n_seg, K), axis=0)
    useg = np.stack([np.bincount(seg[keep], weights=uinc[keep, a], minlength=n_seg) for a in range(n)], axis=1)
    ucum = np.cumsum(useg, axis=0)
    t0 = traj.times[0]
    return [
        SwapAccumulator(S[i], occ[i], ucum[i], float(traj.times[c] - t0)) for i, c in enumerate(checkpoints)
    ]


def accumulate(traj: Trajectory, part: Partition, player: int = ROW) -> SwapAccumulator:
    return accumulate_series(traj, part, player, [len(traj) - 1])[0]


def external_regret(acc: SwapAccumulator) -> float:
    return float(acc.utility_integral.max() - acc.realized)


def swap_value(S: np.ndarray) -> float:
    """Best lifted swap function value for one matrix ``S[a, b]``."""
    return float(np.sum(S.max(axis=1)))


def swap_regret(acc: SwapAccumulator) -> float:
    return swap_value(acc.total) - acc.realized


def internal_regret(acc: SwapAccumulator) -> float:
    S = acc.total
    n = S.shape[0]
    diag = np.diag(S).copy()
    best = float(np.sum(diag))
    for a in range(n):
        for b in range(n):
            if a != b:
                F = diag.copy()
                F[a] = S[a, b]
                best = max(best, float(np.sum(F)))
    return best - acc.realized


def mosaic_regret(acc: SwapAccumulator) -> float:
    return float(sum(swap_value(Sk) for Sk in acc.S)) - acc.realized


def best_swap_targets(acc: SwapAccumulator) -> np.ndarray:
    """``(K, n)`` table: for each bin and action, the deviation target."""
    return acc.S.argmax(axis=2)


@dataclass(frozen=True, eq=False)
class RegretReport:
    external: float
    internal: float
    swap: float
    mosaic: float
    horizon: float
    per_bin_targets: np.ndarray
    per_bin_gain: np.ndarray
    series_times: np.ndarray
    mosaic_time_avg: np.ndarray

    def scaled(self, factor: float) -> "RegretReport":
        """Same report with payoffs multiplied by ``factor``."""
        return RegretReport(
            self.external * factor,
            self.internal * factor,
            self.swap * factor,
            self.mosaic * factor,
            self.horizon,
            self.per_bin_targets,
            self.per_bin_gain * factor,
            self.series_times,
            self.mosaic_time_avg * factor,
        )


def checkpoint_indices(n_samples: int, n_checkpoints: int) -> np.ndarray:
    idx = np.unique(np.linspace(0, n_samples - 1, n_checkpoints + 1).round().astype(np.int64))
    return idx[idx >= 1]


def regret_report(traj: Trajectory, part: Partition, player: int = ROW, n_checkpoints: int = 100) -> RegretReport:
    cps = checkpoint_indices(len(traj), n_checkpoints)
    accs = accumulate_series(traj, part, player, cps)
    final = accs[-1]
    times = np.array([a.horizon for a in accs])
    series = np.array([mosaic_regret(a) for a in accs]) / times
    gains = np.array([swap_value(Sk) - np.trace(Sk) for Sk in final.S])
    return RegretReport(
        external=external_regret(final),
        internal=internal_regret(final),
        swap=swap_regret(final),
        mosaic=mosaic_regret(final),
        horizon=final.horizon,
        per_bin_targets=best_swap_targets(final),
        per_bin_gain=gains,
        series_times=times,
        mosaic_time_avg=series,
    )


# ---------------------------------------------------------------------------
# Conditional (band) averages


@dataclass(frozen=True, eq=False)
class ConditionalAverageSeries:
    times: np.ndarray
    mean: np.ndarray  # (N, m); NaN until the band is first visited
    occupancy: np.ndarray  # cumulative in-band time
    counts: np.ndarray  # cumulative number of in-band samples
    band: tuple

    @property
    def empty(self) -> bool:
        return bool(self.occupancy[-1] <= 0)

    @property
    def final(self) -> np.ndarray:
        return self.mean[-1]

    @property
    def sample_count(self) -> int:
        return int(self.counts[-1])


def band_fractions(s: np.ndarray, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Per interval, the fraction of ``[t_k, t_k+1]`` where the linearly interpolated
    ``s`` lies in ``[lo, hi]``, and the midpoint parameter of that sub-interval."""
    s0, s1 = s[:-1], s[1:]
    ds = s1 - s0
    flat = ds == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(flat, 0.0, (lo - s0) / ds)
        tb = np.where(flat, 1.0, (hi - s0) / ds)
    lo_t = np.clip(np.minimum(ta, tb), 0.0, 1.0)
    hi_t = np.clip(np.maximum(ta, tb), 0.0, 1.0)
    frac = np.maximum(hi_t - lo_t, 0.0)
    frac = np.where(flat, ((s0 >= lo) & (s0 <= hi)).astype(float), frac)
    mid = np.where(flat, 0.5, 0.5 * (lo_t + hi_t))
    return frac, mid


def empirical_conditional_average(traj: Trajectory, band, observer: int = ROW) -> ConditionalAverageSeries:
    """Running time-average of the opponent strategy over times the observer is in a band.

    ``band`` is either ``(sigma, eps)`` on the observer's first coordinate, or a
    ``Partition.kl_band`` on ``KL(own || center)``. Partial intervals at band
    edges are weighted by linear interpolation.
    """
    own, opp = (traj.x, traj.y) if observer == ROW else (traj.y, traj.x)
    if isinstance(band, Partition):
        if band.scheme != "kl_band":
            raise ContractViolation("only KL-band partitions define a conditional band")
        s = kl_divergence_rows_from(own, np.asarray(band.center))
        lo, hi = band.reference - band.eps, band.reference + band.eps
        band_key = ("kl_band", band.reference, band.eps)
    else:
        sigma, eps = band
        if eps <= 0:
            raise ContractViolation("band half-width must be positive")
        s = own[:, 0]
        lo, hi = sigma - eps, sigma + eps
        band_key = ("interval", sigma, eps)
    dt = np.diff(traj.times)
    frac, mid = band_fractions(s, lo, hi)
    w = dt * frac
    vals = opp[:-1] + mid[:, None] * (opp[1:] - opp[:-1])
    num = np.vstack([np.zeros(opp.shape[1]), np.cumsum(w[:, None] * vals, axis=0)])
    den = np.concatenate([[0.0], np.cumsum(w)])
    with np.errstate(divide="ignore", invalid="ignore"):
        mean = np.where(den[:, None] > 0, num / den[:, None], np.nan)
    counts = np.cumsum((s >= lo) & (s <= hi))
    return ConditionalAverageSeries(traj.times, mean, den, counts, band_key)


def _crossings(traj: Trajectory, sigma: float, period: float) -> list[float]:
    interp = HermiteInterpolant(traj, np.array([0]))
    x1 = traj.x[:, 0]
    out = []
    k_end = int(np.searchsorted(traj.times, period, side="right"))
    for k in range(min(k_end, len(traj) - 1)):
        f0, f1 = x1[k] - sigma, x1[k + 1] - sigma
        if f0 == 0.0:
            t = traj.times[k]
        elif f0 * f1 < 0:
            t = brentq(lambda t: interp(t)[0] - sigma, traj.times[k], traj.times[k + 1], xtol=1e-13)
        else:
            continue
        if t < period - 1e-9 and not any(abs(t - u) < 1e-9 for u in out):
            out.append(float(t))
    return out


def predicted_conditional_average(
    g: Game, orbit: Trajectory, sigma: float, period: float | None = None, min_speed: float = 1e-9
) -> np.ndarray:
    """Speed-weighted average of the opponent strategies where the orbit crosses ``x1 = sigma``.

    Crossing ``i`` with opponent strategy ``nu_i`` and row speed ``v_i = |dx1/dt|``
    gets weight ``1 / v_i``.
    """
    if g.shape != (2, 2):
        raise ContractViolation("prediction defined for 2x2 games")
    if period is None:
        period = detect_period(orbit)
        if period is None:
            raise ContractViolation("orbit is not periodic within its horizon")
    interp = HermiteInterpolant(orbit)
    times = _crossings(orbit, sigma, period)
    if not times:
        raise ContractViolation(f"sigma={sigma} lies outside the orbit's x1-range")
    if len(times) != 2:
        raise ContractViolation(f"expected two crossings of x1={sigma} per period, found {len(times)}")
    weights, nus = [], []
    x = np.array([sigma, 1.0 - sigma])
    for t in times:
        y1 = float(interp(t)[2])
        nu = np.array([y1, 1.0 - y1])
        speed = abs(rd_vector_field(g, x, nu)[0][0])
        if speed < min_speed:
            raise ContractViolation(f"tangential crossing at t={t:.6g} (|dx1/dt|={speed:.3g})")
        weights.append(1.0 / speed)
        nus.append(nu)
    w = np.array(weights)
    return (w[:, None] * np.array(nus)).sum(axis=0) / w.sum()


# ---------------------------------------------------------------------------
# External-regret learner with unbounded mosaic regret


def cce_alternating_process(epoch_len: float = 1.0, horizon: float = 200.0, samples_per_epoch: int = 100) -> Trajectory:
    """Both players alternate (3/4, 1/4) and (1/4, 3/4) each epoch in the coordination game."""
    n_epochs = horizon / epoch_len
    if abs(n_epochs - round(n_epochs)) > 1e-9 or n_epochs < 1:
        raise ContractViolation("horizon must be a positive whole number of epochs")
    h = epoch_len / samples_per_epoch
    n = int(round(n_epochs)) * samples_per_epoch + 1
    epoch = np.arange(n) // samples_per_epoch
    hi = np.where(epoch % 2 == 0, 0.75, 0.25)
    x = np.column_stack([hi, 1.0 - hi])
    times = np.arange(n) * h
    cfg = IntegratorConfig(dt=h, T=horizon, record_stride=1)
    return Trajectory(times, x, x.copy(), coordination_game(), cfg)


def empirical_joint(traj: Trajectory) -> JointDistribution:
    """Time-average of ``x^t (y^t)^T`` under the trapezoidal rule."""
    prod = traj.x[:, :, None] * traj.y[:, None, :]
    dt = np.diff(traj.times)
    z = np.sum(0.5 * dt[:, None, None] * (prod[:-1] + prod[1:]), axis=0) / traj.horizon
    return JointDistribution(z / z.sum())


# ---------------------------------------------------------------------------
# Band regret for two actions


@dataclass(frozen=True)
class BandRegretCheck:
    measured: float
    quadrature: float
    bound: float
    visits: int
    skipped: int

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound + 1e-6


def _edge_crossing(t0, t1, p0, p1, edge):
    tau = (edge - p0) / (p1 - p0)
    return t0 + tau * (t1 - t0), tau


def band_regret_bound_check(
    traj: Trajectory, p0: float, eps: float, action: int = 0, utilities: np.ndarray | None = None
) -> BandRegretCheck:
    """Regret for not switching to ``action`` restricted to times with ``p in (p0-eps, p0+eps)``.

    ``measured`` telescopes ``ln p(exit) - ln p(entry)`` over band visits;
    ``quadrature`` integrates ``u_i - <p, u>`` over the same intervals directly.
    Visits that enter and leave through the same edge are skipped.
    """
    if traj.x.shape[1] != 2:
        raise ContractViolation("band regret is defined for two actions")
    if not (0 < p0 - eps and p0 + eps < 1):
        raise ContractViolation("band must lie inside (0, 1)")
    P = traj.x
    U = traj.y @ traj.game.A.T if utilities is None else np.asarray(utilities, dtype=float)
    p = P[:, action]
    lo, hi = p0 - eps, p0 + eps
    gain = U[:, action] - np.einsum("ka,ka->k", P, U)
    t = traj.times
    inside = (p > lo) & (p < hi)
    measured = quad = 0.0
    visits = skipped = 0
    N = len(p)
    k = 0
    while k < N:
        if not inside[k]:
            k += 1
            continue
        s = k
        while k + 1 < N and inside[k + 1]:
            k += 1
        e = k
        k += 1
        q = float(np.sum(0.5 * np.diff(t[s : e + 1]) * (gain[s:e] + gain[s + 1 : e + 1])))
        if s == 0:
            side_in, ln_a = None, math.log(p[0])
        else:
            side_in = "lo" if p[s - 1] <= lo else "hi"
            edge = lo if side_in == "lo" else hi
            ta, tau = _edge_crossing(t[s - 1], t[s], p[s - 1], p[s], edge)
            ga = gain[s - 1] + tau * (gain[s] - gain[s - 1])
            q += 0.5 * (t[s] - ta) * (ga + gain[s])
            ln_a = math.log(edge)
        if e == N - 1:
            side_out, ln_b = None, math.log(p[-1])
        else:
            side_out = "lo" if p[e + 1] <= lo else "hi"
            edge = lo if side_out == "lo" else hi
            tb, tau = _edge_crossing(t[e], t[e + 1], p[e], p[e + 1], edge)
            gb = gain[e] + tau * (gain[e + 1] - gain[e])
            q += 0.5 * (tb - t[e]) * (gain[e] + gb)
            ln_b = math.log(edge)
        if side_in is not None and side_in == side_out:
            log.warning("band visit at t=%.4g enters and leaves through the same edge; skipped", t[s])
            skipped += 1
            continue
        visits += 1
        measured += ln_b - ln_a
        quad += q
    return BandRegretCheck(measured, quad, math.log(hi / lo), visits, skipped)


def brute_force_swap_value(S: np.ndarray) -> float:
    """Enumerate all ``n^n`` swap functions (reference for small ``n``)."""
    n = S.shape[0]
    rows = np.arange(n)
    return max(float(np.sum(S[rows, list(F)])) for F in itertools.product(range(n), repeat=n))
