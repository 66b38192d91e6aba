"""Exit criteria for the library and CLI, one test per criterion (or part).

Each test records a PASS/FAIL line, shown in the "acceptance criteria"
section of the pytest summary.
"""

import math
import random
import time

import numpy as np
import pytest

from slicebox import expr
from slicebox.cli import main
from slicebox.diagnostics import ks_test, reference_cdf
from slicebox.rng import RngStream
from slicebox.samplers import ChainState, Method, SamplerConfig, run_chain, slice_unbounded
from slicebox.targets import BUILTINS, builtin
from slicebox.transforms import Transform, expand, log_jacobian, shrink

SEED = 2024


def xs_of(records):
    return np.array([r.x for r in records])


def test_c1_gamma_positive(criterion):
    t0 = time.perf_counter()
    recs = run_chain(builtin("gamma51"), SamplerConfig(Method.POSITIVE, seed=SEED), 1.0, 100_000, burn_in=100)
    elapsed = time.perf_counter() - t0
    xs = xs_of(recs)
    mean, var = xs.mean(), xs.var(ddof=1)
    stat, ks_ok = ks_test(xs[9::10], reference_cdf(builtin("gamma51")))
    ok = 4.95 <= mean <= 5.05 and 4.8 <= var <= 5.2 and ks_ok and elapsed < 10
    criterion(
        "1 Gamma(5,1) positive sampler",
        ok,
        f"mean={mean:.4f} var={var:.4f} KS={stat:.4f} pass={ks_ok} time={elapsed:.2f}s",
    )
    assert ok


@pytest.fixture(scope="module")
def gauss1000_run():
    t0 = time.perf_counter()
    recs = run_chain(builtin("gauss1000"), SamplerConfig(Method.UNBOUNDED, a_scale=100.0, seed=SEED), 1.0, 10_000, 100)
    return recs, time.perf_counter() - t0


def test_c2_distant_mode_moments(criterion, gauss1000_run):
    recs, elapsed = gauss1000_run
    xs = xs_of(recs)
    mean, var = xs.mean(), xs.var(ddof=1)
    ok = 999 <= mean <= 1001 and 45 <= var <= 55 and elapsed < 5
    criterion("2 distant mode: mean/variance/runtime", ok, f"mean={mean:.3f} var={var:.3f} time={elapsed:.2f}s")
    assert ok


def test_c2_distant_mode_shrink_steps(criterion, gauss1000_run):
    recs, _ = gauss1000_run
    m = float(np.mean([r.n_shrinks for r in recs]))
    ok = 6 <= m <= 13
    criterion("2 distant mode: mean shrink steps in [6, 13]", ok, f"mean_shrinks={m:.3f}")
    assert ok


@pytest.mark.parametrize("name,lo,hi", [("gauss500", 12, 21), ("quartic", 8, 15)])
def test_c3_eval_counts(criterion, name, lo, hi):
    recs = run_chain(builtin(name), SamplerConfig(Method.UNBOUNDED, seed=SEED), 1.0, 10_000, 100)
    m = float(np.mean([r.n_shrinks for r in recs]))
    ok = lo <= m <= hi
    criterion(f"3 mean shrink steps, {name} in [{lo}, {hi}]", ok, f"mean_shrinks={m:.3f}")
    assert ok


def test_c4_mode_exploration(criterion):
    t0 = time.perf_counter()
    good_unb = good_step = 0
    occ_unb, occ_step = [], []
    for seed in range(20):
        u = xs_of(run_chain(builtin("gmm"), SamplerConfig(Method.UNBOUNDED, seed=seed), 1.0, 10_000))
        s = xs_of(run_chain(builtin("gmm"), SamplerConfig(Method.STEPPING_OUT, width=1.0, seed=seed), 1.0, 10_000))
        occ_unb.append(np.mean(u > 5))
        occ_step.append(np.mean(s > 5))
        good_unb += 0.17 <= occ_unb[-1] <= 0.23
        good_step += occ_step[-1] < 0.05
    elapsed = time.perf_counter() - t0
    ok = good_unb >= 19 and good_step >= 19 and elapsed < 60
    criterion(
        "4 mixture mode exploration (20 seeds)",
        ok,
        f"unbounded in band {good_unb}/20 (range {min(occ_unb):.3f}-{max(occ_unb):.3f}), "
        f"stepout < 0.05 {good_step}/20 (max {max(occ_step):.4f}), time={elapsed:.1f}s",
    )
    assert ok


def test_c5_stepping_out_pathology(criterion):
    recs = run_chain(builtin("gauss1000"), SamplerConfig(Method.STEPPING_OUT, width=1.0, seed=SEED), 1.0, 1)
    n = recs[0].n_evals
    ok = 1500 <= n <= 2500
    criterion("5 stepping-out first draw on gauss1000", ok, f"n_evals={n}")
    assert ok


def test_c6_round_trip(criterion):
    sig = Transform.scaled_sigmoid(100.0)
    pos = Transform.positive_ratio()
    xs = np.linspace(-30 * 100.0, 30 * 100.0, 60_001)
    worst_sig, at = 0.0, 0.0
    for x in xs:
        err = abs(expand(shrink(x, sig), sig) - x) / max(1.0, abs(x))
        if err > worst_sig:
            worst_sig, at = err, x
    worst_pos = max(
        abs(expand(shrink(x, pos), pos) - x) / max(1.0, x) for x in np.geomspace(1e-6, 1e6, 20_001)
    )
    ok = worst_sig <= 1e-9 and worst_pos <= 1e-9
    criterion(
        "6 transform round trip <= 1e-9 (|x| <= 30A; 1e-6..1e6)",
        ok,
        f"sigmoid worst={worst_sig:.2e} at x={at:.0f}; positive worst={worst_pos:.2e}",
    )
    assert ok


def test_c6_jacobian(criterion):
    worst = 0.0
    for t in (Transform.scaled_sigmoid(100.0), Transform.positive_ratio()):
        for p in (0.01, 0.1, 0.5, 0.9, 0.99):
            h = 1e-6 * min(p, 1 - p)
            fd = (expand(p + h, t) - expand(p - h, t)) / (2 * h)
            worst = max(worst, abs(fd / math.exp(log_jacobian(p, t)) - 1))
    ok = worst <= 1e-5
    criterion("6 log-Jacobian vs central differences", ok, f"worst relative error={worst:.2e}")
    assert ok


def test_c6_interval_nesting(criterion):
    violations = steps = 0
    for name in ("gauss500", "gauss1000", "gmm", "quartic"):
        state = ChainState(1.0, RngStream(SEED))
        cfg = SamplerConfig(Method.UNBOUNDED)
        for _ in range(2_000):
            prev = [0.0, 1.0]

            def check(st, ed, r):
                nonlocal violations, steps
                steps += 1
                if not (prev[0] <= st < ed <= prev[1] and (st, ed) != tuple(prev) and st < r < ed):
                    violations += 1
                prev[:] = [st, ed]

            slice_unbounded(state, builtin(name), cfg, trace=check)
    ok = violations == 0 and steps > 0
    criterion("6 p-intervals strictly nested and contain r", ok, f"{steps} shrink steps, {violations} violations")
    assert ok


def test_c7_a_invariance(criterion):
    weights = {}
    for A in (10.0, 100.0, 1000.0):
        recs = run_chain(builtin("gmm"), SamplerConfig(Method.UNBOUNDED, a_scale=A, seed=SEED), 1.0, 100_000, 100)
        weights[A] = float(np.mean(xs_of(recs) < 5))
    spread = max(weights.values()) - min(weights.values())
    ok = spread <= 0.02
    criterion(
        "7 A-invariance of mixture weight",
        ok,
        ", ".join(f"A={A:g}: {w:.4f}" for A, w in weights.items()) + f", spread={spread:.4f}",
    )
    assert ok


def test_c8_ks_self_test(criterion):
    stats_ = {}
    for name, spec in sorted(BUILTINS.items()):
        xs = spec.sampler(np.random.default_rng(SEED), 10_000)
        stats_[name] = ks_test(xs, reference_cdf(builtin(name)))
    ok = all(p for _, p in stats_.values())
    criterion(
        "8 KS self-test on exact samples",
        ok,
        ", ".join(f"{k}: D={d:.4f}" for k, (d, _) in stats_.items()),
    )
    assert ok


def test_c8_parser_round_trip(criterion):
    from test_expr import random_tree

    rnd = random.Random(SEED)
    bad = 0
    for _ in range(1000):
        ast = random_tree(rnd, 6)
        back = expr.parse(expr.to_text(ast))
        for _ in range(20):
            x = rnd.uniform(0.5, 2.0)
            a, b = expr.value(ast, x), expr.value(back, x)
            if not (a == b or abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))):
                bad += 1
    ok = bad == 0
    criterion("8 parser print/parse round trip (1000 trees x 20 points)", ok, f"{bad} mismatches")
    assert ok


def test_c9_determinism(criterion, tmp_path, capsys):
    argv = ["sample", "--target", "gmm", "--method", "unbounded", "--x0", "1", "--n", "5000", "--seed", "42"]
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    criterion("9 byte-identical CSV for identical seeds", ok, f"{len(outs[0])} bytes each")
    assert ok
