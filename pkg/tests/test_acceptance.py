"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (visible even under capture)
before asserting, so ``pytest tests/test_acceptance.py -s`` or the plain
run both show the per-criterion verdicts.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from oimsim.analysis import dof_upper_bound, genie_upper_bound
from oimsim.channel import NetworkConfig, draw_channels, draw_frequency_channels
from oimsim.errors import RankDeficient
from oimsim.harness.config import ExperimentSpec
from oimsim.harness.experiments import run_experiment
from oimsim.harness.output import render
from oimsim.linalg import random_orthonormal
from oimsim.multicarrier import leakage_form, multicarrier_metrics, optimize_weight
from oimsim.receiver import build_filters, compute_sinr
from oimsim.rng import DEFAULT_SEED, RandomStream
from oimsim.scheduling import Mode, draw_interference_bases, metric_matrix, select_users

pytestmark = pytest.mark.slow


@pytest.fixture
def verdict(capsys):
    def _report(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return _report


def spec(kind, **kw):
    return ExperimentSpec.from_dict({"kind": kind, **kw})


# --- 1: chi-square law of the scheduling metric ---------------------------

@pytest.mark.parametrize("K,S", [(2, 1), (2, 2), (3, 1)])
def test_c1_metric_cdf(verdict, K, S):
    N = 1000
    trials = math.ceil(100_000 / (K * N))
    rec = run_experiment(spec("cdf-check", cells=[K], antennas=[S], streams=[S], users=[N],
                              trials=trials))
    (row,) = rec.rows
    d = row["sup_distance"]
    verdict(f"C1 cdf (K={K}, S={S})", row["samples"] >= 100_000 and d <= 0.01,
            f"sup-distance {d:.5f} over {row['samples']} samples (tol 0.01)")


# --- 2: power-law sandwich and incomplete-gamma inequalities --------------

def test_c2_sandwich(verdict):
    rec = run_experiment(spec("bounds-check", cells=[2, 3], streams=[1, 2, 3],
                              gamma_shapes=[0.5, 1.0, 2.0, 5.0]))
    power = [r for r in rec.rows if r["check"] == "cdf-power-law"]
    gamma = [r for r in rec.rows if r["check"] == "gamma"]
    ok = (len(power) == 6 and all(r["holds"] and r["points"] == 199 for r in power)
          and len(gamma) == 4 and all(r["holds"] for r in gamma))
    worst = min(min(r["min_lower_margin"], r["min_upper_margin"]) for r in rec.rows)
    verdict("C2 cdf power-law and gamma bounds", ok,
            f"{len(power)} (K,S) pairs x 199 points, 4 gamma shapes; smallest margin {worst:.3e}")


# --- 3: DoF upper bound ---------------------------------------------------

def test_c3_upper_bound(verdict):
    ok = dof_upper_bound(2, 3, 2) == 3
    for K in (1, 2, 3, 5):
        for M in (1, 2, 4, 8):
            km = genie_upper_bound(K, M)
            prev_gap = None
            for N in (1, 2, 3, 10, 100, 10**4, 10**6):
                ub = dof_upper_bound(K, N, M)
                exact = Fraction(K * N * M, N + 1)
                # float result is the correctly rounded exact value, and the
                # exact gap is KM/(N+1)
                ok &= abs(Fraction(ub) - exact) <= Fraction(math.ulp(ub)) / 2
                ok &= ub < km and km - exact == Fraction(K * M, N + 1)
                ok &= prev_gap is None or km - exact < prev_gap
                prev_gap = km - exact
    verdict("C3 upper bound", ok,
            f"bound(2,3,2) = {dof_upper_bound(2, 3, 2)}; bound < KM, gap KM/(N+1) (exact rationals)")


# --- 4: leakage versus N --------------------------------------------------

@pytest.fixture(scope="module")
def leakage_record():
    return run_experiment(spec("leakage-sweep", cells=[2], antennas=[8], streams=[5, 6, 7],
                               users=[2**e for e in range(6, 13)], trials=1000))


def _curve(rec, S):
    rows = sorted((r for r in rec.rows if r["S"] == S), key=lambda r: r["N"])
    return [r["N"] for r in rows], [r["mean_leakage"] for r in rows]


def test_c4a_leakage_decreasing(verdict, leakage_record):
    details, ok = [], True
    for S in (5, 6, 7):
        _, y = _curve(leakage_record, S)
        mono = all(b < a for a, b in zip(y, y[1:]))
        ok &= mono
        details.append(f"S={S}: {y[0]:.3g}->{y[-1]:.3g}{'' if mono else ' (not monotone)'}")
    verdict("C4a leakage strictly decreasing in N", ok, "; ".join(details))


def test_c4b_leakage_ordered_in_s(verdict, leakage_record):
    Ns, y5 = _curve(leakage_record, 5)
    _, y6 = _curve(leakage_record, 6)
    _, y7 = _curve(leakage_record, 7)
    bad = [N for N, a, b, c in zip(Ns, y5, y6, y7) if not a < b < c]
    verdict("C4b leakage S=5 < S=6 < S=7", not bad, f"violations at N={bad}" if bad else "all N")


@pytest.mark.parametrize("S", [5, 6, 7])
def test_c4c_leakage_slope(verdict, leakage_record, S):
    fits = {f["S"]: f for f in leakage_record.summary["leakage_slopes"]}
    slope, target = fits[S]["slope"], -1.0 / S
    ratio = slope / target
    verdict(f"C4c log-log slope (S={S})", abs(ratio - 1) <= 0.25,
            f"slope {slope:.4f} vs target {target:.4f} (ratio {ratio:.3f}, tol +-25%)")


# --- 5: P_OIM trend along N = snr^((K-1)S) --------------------------------

@pytest.fixture(scope="module")
def dof_record():
    return run_experiment(spec("dof-sweep", cells=[2], antennas=[1], streams=[1],
                               snr=[4.0, 16.0, 64.0], users_scale=1.0, epsilon=1.0, trials=1000))


def test_c5a_p_oim_nondecreasing(verdict, dof_record):
    p = dof_record.column("p_oim")
    verdict("C5a P_OIM nondecreasing in snr", all(b >= a for a, b in zip(p, p[1:])),
            f"P_OIM at snr 4/16/64 (N = snr): {p}")


def test_c5b_residual_bounded(verdict, dof_record):
    res = dof_record.column("mean_residual")
    (fit,) = dof_record.summary["residual_slopes"]
    verdict("C5b residual interference bounded", fit["slope"] <= 0.1,
            f"mean residual {[round(r, 4) for r in res]}; log-log slope {fit['slope']:.4f} (<= 0.1)")


# --- 6: ZF and SINR-bound invariants --------------------------------------

def test_c6_zf_invariants(verdict):
    root = RandomStream(DEFAULT_SEED).substream(6)
    worst_inv = worst_null = 0.0
    violations = 0
    trials = 0
    cases = [(2, 2), (2, 1), (4, 4), (4, 1), (4, 2), (4, 3)]  # (M, S): S == M is OIN
    t = 0
    while trials < 1000:
        M, S = cases[trials % len(cases)]
        s = root.substream(t)
        t += 1
        cfg = NetworkConfig(K=2, N=8, M=M, S=S)
        ch = draw_channels(cfg, s)
        bases = None if cfg.is_oin else draw_interference_bases(cfg, s)
        mode = Mode.OIN if bases is None else Mode.OIA
        sched = select_users(metric_matrix(ch, mode, bases), S)
        try:
            filters = build_filters(ch, sched, bases)
        except RankDeficient:
            continue
        trials += 1
        for f in filters:
            intra = ch.intra(f.cell, sched.selected[f.cell])
            worst_inv = max(worst_inv, np.max(np.abs(f.G @ intra - np.eye(S))))
            if f.directions is not None:
                worst_null = max(worst_null, np.max(np.abs(f.G @ f.directions.columns)))
        snr = 10.0 ** s.generator.uniform(-1, 4)
        rep = compute_sinr(filters, ch, sched, snr)
        violations += int(np.sum(rep.sinr_lower > rep.sinr_exact * (1 + 1e-12)))
    ok = worst_inv <= 1e-9 and worst_null <= 1e-8 and violations == 0
    verdict("C6 ZF invariants", ok,
            f"{trials} trials: max|G intra - I| {worst_inv:.2e}, max|G V| {worst_null:.2e}, "
            f"sinr_lower > sinr_exact in {violations} streams")


# --- 7: two-step scheduling ------------------------------------------------

@pytest.fixture(scope="module")
def two_step_record():
    return run_experiment(spec("two-step", cells=[2], antennas=[2], users=[10_000],
                               window=[4, 16, 64, 256], snr=[100.0], trials=1000))


def test_c7a_gain_logarithmic(verdict, two_step_record):
    rows = sorted(two_step_record.rows, key=lambda r: r["window"])
    gain = [r["mean_gain"] for r in rows]
    inc = np.diff(gain)
    rel = inc / inc.mean()
    ok = bool(np.all(inc > 0) and np.all(np.abs(rel - 1) <= 0.30))
    verdict("C7a two-step gain growth", ok,
            f"mean gain {np.round(gain, 3).tolist()}; increments / mean {np.round(rel, 3).tolist()} (tol +-30%)")


def test_c7b_lif_below_baseline(verdict, two_step_record):
    rows = sorted(two_step_record.rows, key=lambda r: r["window"])
    p95 = rows[0]["p95_lif"]
    lif = [r["mean_lif"] for r in rows]
    verdict("C7b selected LIF below M~=4 p95", all(v < p95 for v in lif),
            f"mean LIF {np.round(lif, 4).tolist()} vs baseline p95 {p95:.4f}")


# --- 8: multi-carrier weight optimizer ------------------------------------

def test_c8_optimizer(verdict):
    root = RandomStream(DEFAULT_SEED).substream(8)
    worst_search = -math.inf
    worst_cf = 0.0
    sched_bad = 0
    n = 0
    for Nsub in (2, 4):
        for L in (1, 2):
            for t in range(250):
                s = root.substream(Nsub, L, t)
                K = L + 1
                fch = draw_frequency_channels(Nsub, K, 20, s)
                bases = draw_interference_bases(NetworkConfig(K=K, N=20, M=Nsub, S=1), s)
                # user 0 of cell 0 against every other cell
                H = [fch.H[l, 0, 0] for l in range(1, K)]
                U = [bases.kernels[l] for l in range(1, K)]
                _, lam = optimize_weight(H, U)
                A = leakage_form(H, U)
                z = s.complex_normal((10_000, Nsub))
                z /= np.linalg.norm(z, axis=1, keepdims=True)
                vals = np.real(np.einsum("na,ab,nb->n", z.conj(), A, z))
                worst_search = max(worst_search, lam - vals.min())
                if Nsub == 2:
                    a, d, b = A[0, 0].real, A[1, 1].real, abs(A[0, 1])
                    cf = max((a + d) / 2 - math.sqrt(((a - d) / 2) ** 2 + b * b), 0.0)
                    worst_cf = max(worst_cf, abs(lam - cf))
                opt = select_users(multicarrier_metrics(fch, bases, "optimal"), 1).metrics.mean()
                uni = select_users(multicarrier_metrics(fch, bases, "uniform"), 1).metrics.mean()
                sched_bad += int(opt > uni)
                n += 1
    ok = worst_search <= 1e-6 and worst_cf <= 1e-9 and sched_bad == 0
    verdict("C8 multi-carrier optimizer", ok,
            f"{n} instances: max(eig - random-search min) {worst_search:.2e}, "
            f"max |eig - closed form| {worst_cf:.2e}, optimized > uniform on {sched_bad}")


# --- 9: reproducibility -----------------------------------------------------

REPRO = {
    "leakage-sweep": dict(users=[64, 128, 256], trials=20),
    "cdf-check": dict(trials=5),
    "bounds-check": dict(),
    "dof-sweep": dict(trials=100),
    "upper-bound": dict(),
    "two-step": dict(users=[1000], window=[4, 16], trials=20),
    "multicarrier-compare": dict(trials=50),
}


def test_c9_reproducible(verdict):
    diffs = []
    for kind, kw in REPRO.items():
        for fmt in ("csv", "json"):
            a = render(run_experiment(spec(kind, **kw)), fmt).encode()
            b = render(run_experiment(spec(kind, **kw)), fmt).encode()
            if a != b:
                diffs.append(f"{kind}/{fmt}")
    verdict("C9 byte-identical reruns", not diffs,
            f"{len(REPRO)} kinds x csv/json" + (f"; differing: {diffs}" if diffs else ""))
