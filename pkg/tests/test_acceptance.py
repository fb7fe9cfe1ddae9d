"""Acceptance gates for the benchmark, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  The suite drives the
real experiment runner at the default operating point (10,000-sample BPSK
frames, 5 taps, unit delay) and checks orderings, oracle equivalences,
exact invariants, and byte-level reproducibility.

Known failure: the small-step clause of the step-size sweep asserts that
mu=0.02 beats mu=0.005.  At unit signal power and -2 dB the gradient loop
converges within tens of samples for every step size in the sweep, so
small steps never pay a visible transient penalty while larger steps
always pay misadjustment; measured residual power is increasing in mu and
the clause cannot hold.  It is kept as stated rather than loosened.
"""

import numpy as np
import pytest

from alebench.ale import AleConfig, filter_frame
from alebench.bench import emit_csv, parse_config, run_experiment
from alebench.channel import ChannelConfig, add_awgn, transmit
from alebench.lms import lms_step
from alebench.metrics import mse
from alebench.pso import PsoConfig, evaluate_cost, run_pso
from alebench.signal import ModConfig, demodulate, generate_bits, modulate
from oracles import brute_force_cost, squared_error_gradient_fd


def _report(label: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    return ok


# ---------------------------------------------------------------------------
# shared experiment tables (computed once per session)

@pytest.fixture(scope="module")
def step_table():
    spec = parse_config("run.n_seeds = 20", kind="step_sweep")
    table = run_experiment(spec)
    return {row["mu"]: row["mse"] for row in table.mean_rows}


@pytest.fixture(scope="module")
def swarm_histories():
    spec = parse_config(
        "run.n_seeds = 10\nrun.sweep_values = 10, 60\npso.max_iters = 60",
        kind="particle_sweep",
    )
    table = run_experiment(spec)
    out = {}
    for row in table.mean_rows:
        out.setdefault(row["n_particles"], {})[row["iteration"]] = row["gbest_cost"]
    return {
        n: np.array([cost[i] for i in sorted(cost)]) for n, cost in out.items()
    }


@pytest.fixture(scope="module")
def awgn_table():
    spec = parse_config("run.n_seeds = 10", kind="ber_awgn")
    table = run_experiment(spec)
    return {(row["snr_db"], row["algorithm"]): row for row in table.mean_rows}


@pytest.fixture(scope="module")
def nonlinear_table():
    spec = parse_config(
        "run.n_seeds = 10\nrun.snr_grid = 0, 2, 4, 6, 8, 10", kind="ber_nonlinear"
    )
    table = run_experiment(spec)
    return {
        (row["profile"], row["snr_db"], row["algorithm"]): row
        for row in table.mean_rows
    }


# ---------------------------------------------------------------------------
# 1. step-size sweep orderings (-2 dB, L=5, H=10,000, 20 seeds)

def test_step_size_sweep_rising_tail(step_table):
    mid_vs_large = step_table[0.02] < step_table[0.08]
    tail = [step_table[mu] for mu in (0.04, 0.08, 0.2)]
    rising = all(a < b for a, b in zip(tail, tail[1:]))
    ok = _report(
        "step sweep, rising tail",
        mid_vs_large and rising,
        f"mse(0.02)={step_table[0.02]:.4f} < mse(0.08)={step_table[0.08]:.4f}; "
        f"tail 0.04..0.2 = {[round(v, 3) for v in tail]}",
    )
    assert ok


def test_step_size_sweep_small_step_penalty(step_table):
    ok = _report(
        "step sweep, small-step penalty",
        step_table[0.02] < step_table[0.005],
        f"mse(0.02)={step_table[0.02]:.4f} vs mse(0.005)={step_table[0.005]:.4f}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 2. swarm-size convergence (N=60 settles by iteration 15; N=10 later)

def test_swarm_size_convergence(swarm_histories):
    h60 = swarm_histories[60]
    h10 = swarm_histories[10]
    close_at_15 = h60[14] <= 1.05 * h60[59]

    def first_within_five_percent(hist):
        final = hist[59]
        return 1 + int(np.argmax(hist <= 1.05 * final))

    k60 = first_within_five_percent(h60)
    k10 = first_within_five_percent(h10)
    ok = _report(
        "swarm-size convergence",
        close_at_15 and k10 > k60,
        f"N=60 cost@15/cost@60 = {h60[14] / h60[59]:.4f}; "
        f"5%-closeness first reached at iteration {k60} (N=60) vs {k10} (N=10)",
    )
    assert ok


# ---------------------------------------------------------------------------
# 3. PSO at or below LMS across the SNR grid (AWGN only, 10 seeds)

def test_pso_dominates_lms_across_snr(awgn_table):
    grid = sorted({snr for snr, _ in awgn_table})
    ber_points = [s for s in grid if s >= -6.0]
    mse_points = [s for s in grid if s >= -2.0]
    ber_violations = [
        s for s in ber_points
        if awgn_table[(s, "PSO")]["ber"] > awgn_table[(s, "LMS")]["ber"]
    ]
    mse_violations = [
        s for s in mse_points
        if awgn_table[(s, "PSO")]["mse"] > awgn_table[(s, "LMS")]["mse"]
    ]
    ok = _report(
        "PSO vs LMS over SNR",
        len(ber_violations) <= 1 and len(mse_violations) <= 1,
        f"BER violations at {ber_violations or 'none'} "
        f"(of {len(ber_points)} points >= -6 dB); "
        f"MSE violations at {mse_violations or 'none'} "
        f"(of {len(mse_points)} points >= -2 dB)",
    )
    assert ok


# ---------------------------------------------------------------------------
# 4. nonlinear distortion degrades BER; PSO still at or below LMS (>= 0 dB)

def test_nonlinear_noise_degrades_link(awgn_table, nonlinear_table):
    profiles = sorted({key[0] for key in nonlinear_table})
    points = sorted({key[1] for key in nonlinear_table})
    problems = []
    for profile in profiles:
        for algo in ("LMS", "PSO"):
            worse = [
                s for s in points
                if nonlinear_table[(profile, s, algo)]["ber"]
                < awgn_table[(s, algo)]["ber"]
            ]
            if len(worse) > 1:
                problems.append(f"{profile}/{algo} beat the clean channel at {worse}")
        ordering = [
            s for s in points
            if nonlinear_table[(profile, s, "PSO")]["ber"]
            > nonlinear_table[(profile, s, "LMS")]["ber"]
        ]
        if len(ordering) > 1:
            problems.append(f"{profile}: PSO above LMS at {ordering}")
    ok = _report(
        "nonlinear degradation",
        not problems,
        "; ".join(problems) if problems else
        f"checked {len(profiles)} profiles x {len(points)} grid points x both algorithms",
    )
    assert ok


# ---------------------------------------------------------------------------
# 5. oracle equivalences

def test_cost_matches_brute_force_oracle():
    rng = np.random.default_rng(501)
    worst = 0.0
    for _ in range(100):
        taps = int(rng.integers(1, 9))
        delay = int(rng.integers(1, 4))
        h = int(rng.integers(taps + delay + 2, 65))
        d = rng.normal(size=h) + 1j * rng.normal(size=h)
        w = rng.normal(size=taps)
        fast = evaluate_cost(w, d, AleConfig(taps=taps, delay=delay)).cost
        slow = brute_force_cost(w, d, taps, delay)
        worst = max(worst, abs(fast - slow) / abs(slow))
    ok = _report(
        "cost vs brute-force oracle",
        worst < 1e-12,
        f"worst relative deviation {worst:.2e} over 100 instances",
    )
    assert ok


def test_update_matches_finite_difference_gradient():
    rng = np.random.default_rng(502)
    worst = 0.0
    for _ in range(100):
        taps = int(rng.integers(1, 9))
        w = rng.normal(size=taps)
        v = rng.normal(size=taps)
        d_n = rng.normal()
        mu = float(rng.uniform(0.001, 0.1))
        e_n = d_n - np.dot(w, v)
        stepped = lms_step(w, e_n, v, mu)
        expected = w - (mu / 2.0) * squared_error_gradient_fd(w, d_n, v)
        scale = np.maximum(np.abs(expected), 1e-9)
        worst = max(worst, float(np.max(np.abs(stepped - expected) / scale)))
    ok = _report(
        "update vs finite-difference gradient",
        worst < 1e-6,
        f"worst per-tap relative deviation {worst:.2e} over 100 instances",
    )
    assert ok


def test_metric_equals_cost_for_fixed_weights():
    rng = np.random.default_rng(503)
    cfg = AleConfig(taps=5, delay=1)
    worst = 0.0
    for _ in range(20):
        h = int(rng.integers(32, 128))
        d = rng.normal(size=h) + 1j * rng.normal(size=h)
        w = rng.normal(size=5)
        run = filter_frame(d, w, cfg)
        a = mse(d, run.y, run.valid)
        b = evaluate_cost(w, d, cfg).cost
        worst = max(worst, abs(a - b) / abs(b))
    ok = _report(
        "metric equals swarm cost",
        worst < 1e-12,
        f"worst relative deviation {worst:.2e} over 20 frames",
    )
    assert ok


# ---------------------------------------------------------------------------
# 6. exact-by-construction invariants

def test_exact_invariants():
    rng = np.random.default_rng(504)
    checks = []

    monotone = True
    for trial in range(50):
        h = int(rng.integers(40, 100))
        d = rng.normal(size=h) + 1j * rng.normal(size=h)
        cfg = PsoConfig(n_particles=6, max_iters=12, tol=0.0, seed=trial)
        _, state = run_pso(d, cfg, AleConfig(taps=3, delay=1))
        monotone &= bool(np.all(np.diff(state.history) <= 0.0))
    checks.append(("gbest history non-increasing on 50 runs", monotone))

    d = rng.normal(size=512) + 1j * rng.normal(size=512)
    run = filter_frame(d, rng.normal(size=5), AleConfig(taps=5, delay=1))
    sl = run.valid_slice
    residual_ok = np.array_equal(run.e, d - run.y) and np.allclose(
        (run.e + run.y)[sl], d[sl], rtol=0, atol=1e-14
    )
    checks.append(("residual identity e = d - y", residual_ok))

    round_trip = True
    for m in (2, 4, 8):
        cfg = ModConfig(m=m)
        k = cfg.bits_per_symbol
        bits = generate_bits(240 * k, seed=m)
        round_trip &= bool(
            np.array_equal(demodulate(modulate(bits, cfg), cfg), bits)
        )
    checks.append(("demodulate(modulate(bits)) identity for M in {2,4,8}", round_trip))

    x = modulate(generate_bits(1_000_000, seed=505), ModConfig(m=2))
    frame = add_awgn(x, snr_db=10.0, seed=506)
    noise = frame.d - x
    measured = 10 * np.log10(np.mean(np.abs(x) ** 2) / np.mean(np.abs(noise) ** 2))
    checks.append((f"empirical SNR {measured:.3f} dB within 0.1 of 10", abs(measured - 10.0) < 0.1))

    failed = [name for name, good in checks if not good]
    ok = _report(
        "exact invariants",
        not failed,
        "; ".join(failed) if failed else "all four invariant families hold",
    )
    assert ok


# ---------------------------------------------------------------------------
# 7. byte-identical reruns, any parallelism level

def test_csv_determinism(tmp_path):
    text = (
        "frame.h = 500\nrun.n_seeds = 2\nrun.snr_grid = -4, 0, 4\n"
        "pso.n_particles = 10\npso.max_iters = 10\n"
    )
    spec = parse_config(text, kind="ber_awgn")
    outputs = []
    for name, jobs in (("first", 1), ("second", 1), ("pool", 3)):
        table = run_experiment(spec, jobs=jobs)
        outputs.append(emit_csv(table, tmp_path / name))
    identical = all(
        a.read_bytes() == b.read_bytes()
        for paths in zip(*outputs)
        for a, b in zip(paths, paths[1:])
    )
    ok = _report(
        "CSV determinism",
        identical,
        "rerun and 3-process run produced identical bytes",
    )
    assert ok
