"""Batch experiments: 144-game mosaic regret, 3x3 KL-band averages, vector fields, counterexamples."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bruns import enumerate_144
from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    integrate,
    kl_divergence,
    kl_divergence_rows_from,
    rd_vector_field,
)
from .game import (
    CaseClass,
    ContractViolation,
    Game,
    classify_case,
    genericity_check,
    interior_nash_2x2,
    is_cce,
    nash_support_enumeration,
    pure_nash_set,
    vertex,
    zero_sum,
)
from .regret import (
    Partition,
    band_fractions,
    accumulate_series,
    cce_alternating_process,
    empirical_joint,
    external_regret,
    mosaic_regret,
    regret_report,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("fig5b", "fig6", "fig7", "counterexamples")
BRUNS_PAYOFF_RANGE = 3.0  # (u - 1) / 3 maps the 1..4 scale onto [0, 1]
MAX_ABORT_FRACTION = 0.01

RPS_GAMES = {
    "A1": [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]],
    "A2": [[0.0, -1.0, 2.0], [1.0, 0.0, -1.0], [-2.0, 1.0, 0.0]],
    "A3": [[1.0, -1.0, 1.2], [1.0, 0.0, -1.0], [-1.0, 1.0, -0.5]],
}


class ExperimentFailure(RuntimeError):
    """Too many trajectories aborted for the run to be meaningful."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "fig6"
    trials: int = 10
    seed: int = 0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    bins: int = 10
    checkpoints: int = 100
    init_floor: float = 0.01
    grid: int = 21
    band_eps_fraction: float = 0.02
    reference_fraction: float = 0.1
    band_trajectories: int = 1
    epochs: int = 200
    samples_per_epoch: int = 100
    out: str = "runs"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ContractViolation(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.trials < 1:
            raise ContractViolation("trials must be at least 1")
        if self.band_trajectories < 1:
            raise ContractViolation("band_trajectories must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ContractViolation("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ContractViolation(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "integrator" in d and isinstance(d["integrator"], dict):
            ik = {f.name for f in dataclasses.fields(IntegratorConfig)}
            bad = set(d["integrator"]) - ik
            if bad:
                raise ContractViolation(f"unknown integrator keys: {sorted(bad)}")
            d["integrator"] = IntegratorConfig(**d["integrator"])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def version_string() -> str:
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"phireg {__version__}" + (f" ({desc})" if desc else "")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, header: list[str], rows, cfg: ExperimentConfig) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {json.dumps(cfg.to_dict(), sort_keys=True)}\n")
        fh.write(f"# version: {version_string()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream per job key, e.g. ``(game_index, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def sample_interior(rng: np.random.Generator, n: int, floor: float = 0.01) -> np.ndarray:
    """Flat Dirichlet draw with every coordinate pushed to at least ``floor``."""
    p = rng.dirichlet(np.ones(n))
    if n == 2:
        p = np.clip(p, floor, 1.0 - floor)
    else:
        p = np.maximum(p, floor)
    return p / p.sum()


def worker_count() -> int:
    env = os.environ.get("PHIREG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map(fn, jobs: list) -> list:
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass(frozen=True, eq=False)
class AggregateStats:
    times: np.ndarray
    mean: np.ndarray
    half_width: np.ndarray
    n: int

    @classmethod
    def from_runs(cls, times, series: np.ndarray) -> "AggregateStats":
        series = np.atleast_2d(series)
        n = series.shape[0]
        mean = series.mean(axis=0)
        if n > 1:
            hw = 1.96 * series.std(axis=0, ddof=1) / np.sqrt(n)
        else:
            hw = np.zeros_like(mean)
        return cls(np.asarray(times), mean, hw, n)


# ---------------------------------------------------------------------------
# 144-game mosaic regret


@dataclass(frozen=True, eq=False)
class RunRecord:
    game_id: str
    trial: int
    horizon: float
    raw: tuple[float, float, float, float]  # external, internal, swap, mosaic
    series: np.ndarray  # normalized mosaic time-average at checkpoints

    @property
    def normalized(self) -> tuple[float, ...]:
        return tuple(v / BRUNS_PAYOFF_RANGE for v in self.raw)


def _fig6_job(args):
    game_index, gid, g, trial, cfg = args
    rng = child_rng(cfg.seed, game_index, trial)
    x0 = sample_interior(rng, g.n, cfg.init_floor)
    y0 = sample_interior(rng, g.m, cfg.init_floor)
    try:
        traj = integrate(g, x0, y0, cfg.integrator)
    except IntegrationError as err:
        return ("abort", gid, trial, str(err))
    rep = regret_report(traj, Partition.interval(cfg.bins), n_checkpoints=cfg.checkpoints)
    raw = (rep.external, rep.internal, rep.swap, rep.mosaic)
    return ("ok", gid, trial, rep.horizon, raw, rep.series_times, rep.mosaic_time_avg / BRUNS_PAYOFF_RANGE)


@dataclass(frozen=True, eq=False)
class Fig6Result:
    times: np.ndarray
    runs: list[RunRecord]
    aborted: list[tuple[str, int, str]]
    cases: dict[str, CaseClass]

    @property
    def pooled(self) -> AggregateStats:
        return AggregateStats.from_runs(self.times, np.array([r.series for r in self.runs]))

    def per_game(self) -> dict[str, AggregateStats]:
        out: dict[str, list] = {}
        for r in self.runs:
            out.setdefault(r.game_id, []).append(r.series)
        return {gid: AggregateStats.from_runs(self.times, np.array(s)) for gid, s in out.items()}

    def final_by_game(self) -> dict[str, np.ndarray]:
        out: dict[str, list] = {}
        for r in self.runs:
            out.setdefault(r.game_id, []).append(r.series[-1])
        return {gid: np.array(v) for gid, v in out.items()}

    def example_games(self) -> list[str]:
        """One game per case class, plus the cyclic Ba x As."""
        picks = []
        for case in CaseClass:
            for gid, c in self.cases.items():
                if c == case:
                    picks.append(gid)
                    break
        if "BaxAs" not in picks:
            picks.append("BaxAs")
        return picks


def run_fig6(cfg: ExperimentConfig, games=None) -> Fig6Result:
    games = list(games) if games is not None else enumerate_144()
    jobs = [(gi, str(gid), g, t, cfg) for gi, (gid, g) in enumerate(games) for t in range(cfg.trials)]
    results = _map(_fig6_job, jobs)
    runs, aborted = [], []
    times = None
    for res in results:
        if res[0] == "abort":
            log.warning("trajectory %s trial %d aborted: %s", res[1], res[2], res[3])
            aborted.append(res[1:])
            continue
        _, gid, trial, horizon, raw, t, series = res
        times = t if times is None else times
        runs.append(RunRecord(gid, trial, horizon, raw, series))
    if len(aborted) > MAX_ABORT_FRACTION * len(jobs):
        raise ExperimentFailure(f"{len(aborted)} of {len(jobs)} trajectories aborted")
    cases = {str(gid): classify_case(g) for gid, g in games}
    return Fig6Result(times, runs, aborted, cases)


def write_fig6(result: Fig6Result, cfg: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    header = ["game_id", "trial", "T", "external", "internal", "swap", "mosaic"]
    paths = [
        write_csv(out / "fig6_regret.csv", header, ([r.game_id, r.trial, r.horizon, *r.normalized] for r in result.runs), cfg),
        write_csv(out / "fig6_regret_raw.csv", header, ([r.game_id, r.trial, r.horizon, *r.raw] for r in result.runs), cfg),
        write_csv(
            out / "fig6_series.csv",
            ["game_id", "trial", "t", "mosaic_time_avg"],
            ([r.game_id, r.trial, t, v] for r in result.runs for t, v in zip(result.times, r.series)),
            cfg,
        ),
    ]
    pooled = result.pooled
    paths.append(
        write_csv(
            out / "fig6_pooled.csv",
            ["t", "mean", "ci95_half_width", "runs"],
            ([t, m, h, pooled.n] for t, m, h in zip(pooled.times, pooled.mean, pooled.half_width)),
            cfg,
        )
    )
    per_game = result.per_game()
    paths.append(
        write_csv(
            out / "fig6_per_game.csv",
            ["game_id", "t", "mean", "ci95_half_width", "trials"],
            ([gid, t, m, h, s.n] for gid, s in per_game.items() for t, m, h in zip(s.times, s.mean, s.half_width)),
            cfg,
        )
    )
    finals = result.final_by_game()
    examples = set(result.example_games())
    paths.append(
        write_csv(
            out / "fig6_summary.csv",
            ["game_id", "case_class", "final_mean", "final_variance", "trials", "example"],
            (
                [gid, result.cases[gid].value, v.mean(), v.var(ddof=1) if len(v) > 1 else 0.0, len(v), int(gid in examples)]
                for gid, v in finals.items()
            ),
            cfg,
        )
    )
    if result.aborted:
        paths.append(write_csv(out / "fig6_aborted.csv", ["game_id", "trial", "reason"], result.aborted, cfg))
    return paths


# ---------------------------------------------------------------------------
# 3x3 KL-band conditional averages


@dataclass(frozen=True, eq=False)
class Fig7GameResult:
    name: str
    game: Game
    x_star: np.ndarray
    y_star: np.ndarray
    reference: float
    eps: float
    attempts: int
    times: np.ndarray
    average: np.ndarray  # running pooled conditional average, (N, m)
    retained: np.ndarray  # (k, n + m) in-band joint states
    raw: np.ndarray  # (k, n + m) thinned raw states
    sample_count: int

    @property
    def final(self) -> np.ndarray:
        return self.average[-1]

    @property
    def error(self) -> float:
        return float(np.max(np.abs(self.final - self.y_star)))


def _thin(a: np.ndarray, limit: int) -> np.ndarray:
    step = max(1, int(np.ceil(len(a) / limit)))
    return a[::step]


def run_fig7_game(name: str, A, cfg: ExperimentConfig, game_index: int = 0, max_points: int = 20000) -> Fig7GameResult:
    """Running KL-band conditional opponent average, pooled over ``cfg.band_trajectories`` runs.

    The band is centred on ``d = KL(x_r || x*)`` where ``x_r`` is the first trajectory's
    row strategy at ``reference_fraction * T``; its half-width is ``band_eps_fraction * d``.
    """
    g = zero_sum(A)
    eqs = nash_support_enumeration(g)
    if len(eqs) != 1:
        raise ContractViolation(f"expected a unique equilibrium for {name}, found {len(eqs)}")
    x_star, y_star = eqs[0]
    trajs = []
    for t in range(cfg.band_trajectories):
        rng = child_rng(cfg.seed, game_index, t)
        trajs.append(integrate(g, sample_interior(rng, g.n, cfg.init_floor), sample_interior(rng, g.m, cfg.init_floor), cfg.integrator))
    first = trajs[0]
    k_ref = int(np.searchsorted(first.times, cfg.reference_fraction * first.horizon - 1e-9))
    d = kl_divergence(first.x[k_ref], x_star)
    eps = cfg.band_eps_fraction * d
    kls = [kl_divergence_rows_from(tr.x, x_star) for tr in trajs]
    for attempt in range(1, 4):
        num = np.zeros((len(first), g.m))
        den = np.zeros(len(first))
        retained = []
        for tr, s in zip(trajs, kls):
            frac, mid = band_fractions(s, d - eps, d + eps)
            w = np.diff(tr.times) * frac
            vals = tr.y[:-1] + mid[:, None] * (tr.y[1:] - tr.y[:-1])
            num[1:] += np.cumsum(w[:, None] * vals, axis=0)
            den[1:] += np.cumsum(w)
            inside = np.abs(s - d) <= eps
            retained.append(np.hstack([tr.x[inside], tr.y[inside]]))
        retained = np.vstack(retained)
        if den[-1] > 0:
            break
        log.warning("%s: empty KL band (d=%.4g, eps=%.3g); doubling eps", name, d, eps)
        eps *= 2
    else:
        raise ExperimentFailure(f"{name}: KL band stayed empty after 3 attempts")
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.where(den[:, None] > 0, num / den[:, None], np.nan)
    raw = np.vstack([np.hstack([tr.x, tr.y]) for tr in trajs])
    return Fig7GameResult(
        name, g, x_star, y_star, d, eps, attempt, first.times, avg, _thin(retained, max_points), _thin(raw, max_points), len(retained)
    )


def run_fig7(cfg: ExperimentConfig) -> list[Fig7GameResult]:
    return [run_fig7_game(name, A, cfg, gi) for gi, (name, A) in enumerate(RPS_GAMES.items())]


def write_fig7(results: list[Fig7GameResult], cfg: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = []
    for r in results:
        n, m = r.game.shape
        cols = [f"x{i + 1}" for i in range(n)] + [f"y{j + 1}" for j in range(m)]
        paths.append(write_csv(out / f"fig7_{r.name}_raw.csv", cols, r.raw, cfg))
        paths.append(write_csv(out / f"fig7_{r.name}_retained.csv", cols, r.retained, cfg))
        idx = np.unique(np.linspace(0, len(r.times) - 1, cfg.checkpoints + 1).round().astype(int))
        paths.append(
            write_csv(
                out / f"fig7_{r.name}_conditional.csv",
                ["t"] + [f"ybar{j + 1}" for j in range(m)] + [f"ystar{j + 1}" for j in range(m)],
                ([r.times[k], *r.average[k], *r.y_star] for k in idx),
                cfg,
            )
        )
    paths.append(
        write_csv(
            out / "fig7_summary.csv",
            ["game", "reference_kl", "eps", "attempts", "retained_samples", "final_average", "column_ne", "max_abs_error"],
            (
                [r.name, r.reference, r.eps, r.attempts, r.sample_count, " ".join(_fmt(v) for v in r.final), " ".join(_fmt(v) for v in r.y_star), r.error]
                for r in results
            ),
            cfg,
        )
    )
    return paths


# ---------------------------------------------------------------------------
# Vector fields for the 144 games


def equilibria_2x2(g: Game) -> list[tuple[str, np.ndarray, np.ndarray]]:
    out = [("pure", vertex(i, 2), vertex(j, 2)) for i, j in sorted(pure_nash_set(g))]
    rep = genericity_check(g)
    if rep.row_nondegenerate and rep.col_nondegenerate:
        ne = interior_nash_2x2(g)
        if ne is not None:
            out.append(("interior", *ne))
    return out


def field_grid(g: Game, size: int = 21) -> np.ndarray:
    """Rows ``(x1, y1, dx1, dy1)`` on a ``size x size`` grid over the unit square."""
    pts = np.linspace(0.0, 1.0, size)
    rows = []
    for x1 in pts:
        for y1 in pts:
            dx, dy = rd_vector_field(g, [x1, 1 - x1], [y1, 1 - y1])
            rows.append((x1, y1, dx[0], dy[0]))
    return np.array(rows)


def tangential_components(g: Game, center, half: float = 0.02, per_side: int = 8) -> np.ndarray:
    """Field component along a counter-clockwise square around ``center`` in ``(x1, y1)``."""
    cx, cy = center
    s = np.linspace(-half, half, per_side, endpoint=False)
    pieces = [
        (np.column_stack([cx + s, np.full_like(s, cy - half)]), (1.0, 0.0)),
        (np.column_stack([np.full_like(s, cx + half), cy + s]), (0.0, 1.0)),
        (np.column_stack([cx - s, np.full_like(s, cy + half)]), (-1.0, 0.0)),
        (np.column_stack([np.full_like(s, cx - half), cy - s]), (0.0, -1.0)),
    ]
    out = []
    for pts, (tx, ty) in pieces:
        for x1, y1 in pts:
            dx, dy = rd_vector_field(g, [x1, 1 - x1], [y1, 1 - y1])
            out.append(dx[0] * tx + dy[0] * ty)
    return np.array(out)


def field_svg(g: Game, title: str, size: int = 21, px: int = 240) -> str:
    grid = field_grid(g, size)
    pad = 16
    span = px - 2 * pad
    mag = np.hypot(grid[:, 2], grid[:, 3])
    scale = 0.45 * span / (size - 1) / (mag.max() if mag.max() > 0 else 1.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px + 16}" viewBox="0 0 {px} {px + 16}">',
        f'<text x="{px / 2}" y="12" font-size="11" text-anchor="middle" font-family="sans-serif">{title}</text>',
        f'<rect x="{pad}" y="{pad + 16}" width="{span}" height="{span}" fill="none" stroke="#888"/>',
    ]

    def to_px(x1, y1):
        return pad + x1 * span, 16 + pad + (1 - y1) * span

    for x1, y1, dx, dy in grid:
        sx, sy = to_px(x1, y1)
        ex, ey = sx + dx * scale, sy - dy * scale
        parts.append(f'<line x1="{sx:.2f}" y1="{sy:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" stroke="#246" stroke-width="0.8"/>')
        parts.append(f'<circle cx="{ex:.2f}" cy="{ey:.2f}" r="0.9" fill="#246"/>')
    for _, x, y in equilibria_2x2(g):
        sx, sy = to_px(x[0], y[0])
        parts.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="4" fill="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True, eq=False)
class Fig5bResult:
    fields: dict[str, np.ndarray]
    equilibria: dict[str, list]
    cases: dict[str, CaseClass]


def run_fig5b_fields(cfg: ExperimentConfig) -> Fig5bResult:
    fields, eqs, cases = {}, {}, {}
    for gid, g in enumerate_144():
        key = str(gid)
        fields[key] = field_grid(g, cfg.grid)
        eqs[key] = equilibria_2x2(g)
        cases[key] = classify_case(g)
    return Fig5bResult(fields, eqs, cases)


def write_fig5b(result: Fig5bResult, cfg: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    games = dict((str(gid), g) for gid, g in enumerate_144())
    paths = [
        write_csv(
            out / "fig5b_fields.csv",
            ["game_id", "x1", "y1", "dx1", "dy1"],
            ([gid, *row] for gid, grid in result.fields.items() for row in grid),
            cfg,
        )
    ]
    rows = []
    for gid, eqs in result.equilibria.items():
        for kind, x, y in eqs:
            dx, dy = rd_vector_field(games[gid], x, y)
            rows.append([gid, kind, x[0], y[0], float(max(np.abs(dx).max(), np.abs(dy).max()))])
    paths.append(write_csv(out / "fig5b_equilibria.csv", ["game_id", "kind", "x1", "y1", "field_norm"], rows, cfg))
    svg_dir = out / "fig5b"
    svg_dir.mkdir(parents=True, exist_ok=True)
    for gid, g in games.items():
        path = svg_dir / f"{gid}.svg"
        path.write_text(f"<!-- config: {json.dumps(cfg.to_dict(), sort_keys=True)} -->\n" + field_svg(g, gid, cfg.grid))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Counterexamples


def _slope(x, y) -> float:
    return float(np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)[0])


@dataclass(frozen=True, eq=False)
class CounterexampleResult:
    epochs: np.ndarray
    external_series: np.ndarray
    mosaic_series: np.ndarray
    external_slope: float
    mosaic_slope: float
    joint: np.ndarray
    cce_violation: float
    rps_symmetry_error: float
    rps_mosaic_time_avg: float
    rps_external_time_avg: float
    rps_horizon: float


def run_cce_counterexample(epochs: int = 200, samples_per_epoch: int = 100):
    traj = cce_alternating_process(1.0, float(epochs), samples_per_epoch)
    part = Partition.interval(2)
    cps = np.arange(1, epochs + 1) * samples_per_epoch
    accs = accumulate_series(traj, part, 0, cps)
    ext = np.array([external_regret(a) for a in accs])
    mos = np.array([mosaic_regret(a) for a in accs])
    k = np.arange(1, epochs + 1)
    z = empirical_joint(traj)
    ok, viol = is_cce(traj.game, z)
    return k, ext, mos, _slope(k, ext), _slope(k, mos), z.z, viol


def run_symmetric_rps(cfg: ExperimentConfig):
    g = zero_sum(RPS_GAMES["A1"])
    x0 = sample_interior(child_rng(cfg.seed, 0, 0), 3, cfg.init_floor)
    traj = integrate(g, x0, x0.copy(), cfg.integrator)
    rep = regret_report(traj, Partition.interval(cfg.bins), n_checkpoints=cfg.checkpoints)
    sym = float(np.max(np.abs(traj.x - traj.y)))
    return sym, float(rep.mosaic_time_avg[-1]), rep.external / rep.horizon, rep.horizon


def run_counterexamples(cfg: ExperimentConfig) -> CounterexampleResult:
    k, ext, mos, s_ext, s_mos, joint, viol = run_cce_counterexample(cfg.epochs, cfg.samples_per_epoch)
    sym, mta, eta, horizon = run_symmetric_rps(cfg)
    return CounterexampleResult(k, ext, mos, s_ext, s_mos, joint, viol, sym, mta, eta, horizon)


def write_counterexamples(res: CounterexampleResult, cfg: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    return [
        write_csv(
            out / "counterexample_cce.csv",
            ["epoch", "external", "mosaic"],
            zip(res.epochs.tolist(), res.external_series, res.mosaic_series),
            cfg,
        ),
        write_csv(
            out / "counterexample_summary.csv",
            ["quantity", "value"],
            [
                ("cce_external_slope", res.external_slope),
                ("cce_mosaic_slope", res.mosaic_slope),
                ("cce_violation", res.cce_violation),
                *((f"cce_joint_{i + 1}{j + 1}", res.joint[i, j]) for i in range(2) for j in range(2)),
                ("rps_symmetry_error", res.rps_symmetry_error),
                ("rps_mosaic_time_avg", res.rps_mosaic_time_avg),
                ("rps_external_time_avg", res.rps_external_time_avg),
                ("rps_horizon", res.rps_horizon),
            ],
            cfg,
        ),
    ]


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> list[Path]:
    out_dir = Path(out_dir or cfg.out)
    if cfg.experiment == "fig6":
        return write_fig6(run_fig6(cfg), cfg, out_dir)
    if cfg.experiment == "fig7":
        return write_fig7(run_fig7(cfg), cfg, out_dir)
    if cfg.experiment == "fig5b":
        return write_fig5b(run_fig5b_fields(cfg), cfg, out_dir)
    return write_counterexamples(run_counterexamples(cfg), cfg, out_dir)

