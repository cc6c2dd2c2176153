"""Quick self-checks of a build; each returns ``(name, ok, detail)``."""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from .bruns import enumerate_144
from .dynamics import IntegratorConfig, detect_period, integrate, invariant_series
from .game import CaseClass, Game, classify_case, interior_nash_2x2, matching_pennies
from .regret import (
    Partition,
    SwapAccumulator,
    accumulate,
    cce_alternating_process,
    empirical_joint,
    external_regret,
    internal_regret,
    mosaic_regret,
    swap_regret,
    swap_value,
)


def _hierarchy(rng) -> tuple[bool, str]:
    worst = -np.inf
    cfg = IntegratorConfig(dt=1e-3, T=20.0, record_stride=10)
    for _ in range(20):
        g = Game(rng.uniform(-1, 1, (2, 2)), rng.uniform(-1, 1, (2, 2)))
        x0 = rng.dirichlet([1, 1]) * 0.98 + 0.01
        y0 = rng.dirichlet([1, 1]) * 0.98 + 0.01
        tr = integrate(g, x0, y0, cfg)
        a = accumulate(tr, Partition.interval(10))
        s = accumulate(tr, Partition.singleton())
        vals = [external_regret(a), internal_regret(a), swap_regret(a), mosaic_regret(a)]
        gaps = np.diff(vals)
        worst = max(worst, float(-gaps.min()), abs(mosaic_regret(s) - swap_regret(s)))
    return worst <= 1e-8 * cfg.T, f"worst violation {worst:.2e}"


def _swap_oracle(rng) -> tuple[bool, str]:
    for _ in range(50):
        n = int(rng.integers(2, 5))
        S = rng.normal(size=(n, n))
        brute = max(sum(S[a, phi[a]] for a in range(n)) for phi in itertools.product(range(n), repeat=n))
        if swap_value(S) != brute:
            return False, f"mismatch for n={n}"
    return True, "50 random matrices"


def _case_counts() -> tuple[bool, str]:
    counts = Counter(classify_case(g) for _, g in enumerate_144())
    want = {CaseClass.NO_PURE_NE: 18, CaseClass.UNIQUE_PURE_NE: 28, CaseClass.TWO_PURE_NE: 18, CaseClass.NON_GENERIC: 80}
    got = {k: counts.get(k, 0) for k in want}
    return got == want, ", ".join(f"{k.value}={v}" for k, v in got.items())


def _invariant() -> tuple[bool, str]:
    g = matching_pennies()
    tr = integrate(g, [0.9, 0.1], [0.5, 0.5], IntegratorConfig(T=30.0))
    per = detect_period(tr)
    drift = invariant_series(tr).drift()
    return per is not None and drift < 1e-8, f"period {per}, drift {drift:.2e}"


def _interior_ne() -> tuple[bool, str]:
    x, y = interior_nash_2x2(matching_pennies())
    return bool(np.allclose(x, 0.5) and np.allclose(y, 0.5)), f"x*={x}, y*={y}"


def _cce_joint() -> tuple[bool, str]:
    z = empirical_joint(cce_alternating_process()).z
    want = np.array([[5, 3], [3, 5]]) / 16
    err = float(np.abs(z - want).max())
    return err < 1e-12, f"max deviation {err:.2e}"


def _collapse() -> tuple[bool, str]:
    rng = np.random.default_rng(1)
    acc = SwapAccumulator(rng.normal(size=(4, 3, 3)), np.ones(4), rng.normal(size=3), 4.0)
    one = acc.merged()
    ok = mosaic_regret(one) == swap_regret(acc) and mosaic_regret(acc) >= swap_regret(acc)
    return ok, "collapsed bins give swap regret"


def run_checks(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    checks = [
        ("regret hierarchy", lambda: _hierarchy(rng)),
        ("swap value vs brute force", lambda: _swap_oracle(rng)),
        ("144-game case counts", _case_counts),
        ("interior equilibrium", _interior_ne),
        ("conserved quantity", _invariant),
        ("alternating joint distribution", _cce_joint),
        ("bin collapse", _collapse),
    ]
    out = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as err:  # a crash is a failed check, not a crash of the suite
            ok, detail = False, f"{type(err).__name__}: {err}"
        out.append((name, bool(ok), detail))
    return out
