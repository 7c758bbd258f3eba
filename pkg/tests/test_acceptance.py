"""Acceptance suite: one test per criterion, summarized at the end of the run.

Monte Carlo rates are computed once per session and shared between criteria.
Run with ``pytest tests/test_acceptance.py`` and read the "acceptance
criteria" section of the terminal summary.
"""

import contextlib
import io
import itertools
from functools import lru_cache

import numpy as np
import pytest

from helpers import (fd_gradient, linear_process_field, null_field, phi_holomorphic, random_field,
                     random_hpd, solve_oracle)
from resspec.core import EstimationConfig, MultiSeries, make_grid, window_constants
from resspec.decomposition import (dagger_block, decompose, det, leading_block,
                                   regression_coefficients, transfer_functions)
from resspec.joint import (AugmentedField, build_lagged_series, lagged_products, phi_gradients,
                           run_joint_test)
from resspec.lags import select_lag
from resspec.pipeline import COLORS, color_for
from resspec.pipeline.cli import main
from resspec.residual import bias_mu_hat, bias_mu_trace, run_test
from resspec.simulation import ar1, make_rng, monte_carlo, reference_rate, replication_seed
from resspec.spectral import SpectralField, field_from_config

SEED = 0
PARZEN = window_constants("parzen")

pytestmark = pytest.mark.slow


@lru_cache(maxsize=None)
def mc_rate(case_id, n, reps=500):
    r = monte_carlo(case_id, n, reps, seed=SEED)
    print(f"  case {case_id:2d} n={n:4d} reps={reps}: rate {r.rate:.3f} "
          f"(reference {reference_rate(case_id, n)})")
    return r.rate


@pytest.mark.criterion(1, "null calibration, cases 1/4/7, rate in [0.03, 0.10]")
@pytest.mark.parametrize("case_id,n", list(itertools.product((1, 4, 7), (500, 1000, 2000))))
def test_null_calibration(case_id, n):
    assert 0.03 <= mc_rate(case_id, n) <= 0.10


@pytest.mark.criterion(2, "power at n=2000 within 0.05 of the reference rate (500 reps)")
@pytest.mark.parametrize("case_id,target", [(3, 0.990), (6, 0.964), (9, 0.936), (11, 0.720),
                                            (14, 0.107)])
def test_power_matches_reference(case_id, target):
    assert reference_rate(case_id, 2000) == target
    assert abs(mc_rate(case_id, 2000) - target) <= 0.05


@pytest.mark.criterion(3, "power nondecreasing in n (0.03 slack) and lag-decay ordering")
@pytest.mark.parametrize("case_id", [2, 3, 5, 6, 8, 9, 11, 12])
def test_power_monotone_in_n(case_id):
    rates = [mc_rate(case_id, n) for n in (250, 500, 1000, 2000)]
    assert all(b >= a - 0.03 for a, b in zip(rates, rates[1:])), rates


@pytest.mark.criterion(3, "power nondecreasing in n (0.03 slack) and lag-decay ordering")
def test_power_decays_with_interaction_lag():
    r12, r13, r14 = (mc_rate(c, 2000) for c in (12, 13, 14))
    assert r12 > r13 > r14 - 0.03


@pytest.mark.criterion(4, "transfer functions, determinant recursion, partial cross form")
def test_decomposition_oracles():
    rng = np.random.default_rng(SEED)
    for trial in range(100):
        K = 1 + trial % 4
        f = random_hpd(rng, K + 1, 1)
        fld = SpectralField(make_grid(64), np.repeat(f, 64, axis=0), 2, "parzen")
        A = transfer_functions(fld)
        for d in range(1, K + 1):
            ref = solve_oracle(f, d)
            assert np.max(np.abs(A[d - 1, :d, 0].T - ref[0])) < 1e-10 * max(1, np.max(np.abs(ref)))
        for d in range(1, K + 1):
            lhs = det(leading_block(f, d))
            rhs = f[:, d, d] * det(leading_block(f, d - 1))
            if d > 1:
                dag = np.conj(dagger_block(f, d))
                for j in range(d - 1):
                    rhs = rhs - f[:, j + 1, d] * det(dag[:, j])
            assert np.max(np.abs(lhs - rhs) / np.abs(lhs)) < 1e-10
        if K >= 2:
            g = f[:, :3, :3]
            dec = decompose(SpectralField(make_grid(64), np.repeat(g, 64, axis=0), 2, "parzen"))
            f02_1 = g[:, 0, 2] - g[:, 0, 1] * g[:, 1, 2] / g[:, 1, 1]
            dF = (g[:, 1, 1] * g[:, 2, 2] - np.abs(g[:, 1, 2]) ** 2).real
            partial = g[:, 1, 1].real * np.abs(f02_1) ** 2 / dF
            assert abs(dec.residual_spectra[1, 0] - partial[0]) < 1e-10 * max(1, partial[0])


@pytest.mark.criterion(5, "orthogonality of transfer functions on analytic spectra")
def test_orthogonality():
    rng = np.random.default_rng(SEED)
    for K in (2, 3, 4):
        coefs = [rng.standard_normal((K + 1, K + 1)) * 0.7 ** k for k in range(3)]
        coefs[0] += 2 * np.eye(K + 1)
        fld = linear_process_field(coefs)
        A = transfer_functions(fld)
        f = fld.matrices
        scale = np.max(np.abs(f))
        for d in range(2, K + 1):
            for dp in range(1, d):
                s = sum(np.conj(A[d - 1, j - 1]) * f[:, j, dp] for j in range(1, d + 1))
                assert np.max(np.abs(s)) < 1e-8 * scale


@pytest.mark.criterion(6, "analytic gradients vs finite differences; trace bias = Schur bias")
def test_gradients_against_finite_differences():
    rng = np.random.default_rng(SEED)
    shapes = [(K, L) for K in range(1, 5) for L in range(1, 6) if K + L <= 6]
    for trial in range(20):
        K, L = shapes[trial % len(shapes)]
        f = random_hpd(rng, K + L, 4)
        aug = AugmentedField(SpectralField(make_grid(64), np.tile(f, (16, 1, 1)), 2, "parzen"),
                             K, tuple(range(L)))
        D = phi_gradients(aug)
        node = int(rng.integers(64))
        Z = aug.field.matrices[node]
        for j in range(L):
            idx = np.array(aug.sub_indices(j))
            fd = fd_gradient(lambda m: phi_holomorphic(m[np.ix_(idx, idx)], K), Z)
            err = np.max(np.abs(fd - D[j, node])) / np.max(np.abs(D[j, node]))
            assert err < 1e-6, (K, L, j, err)


@pytest.mark.criterion(6, "analytic gradients vs finite differences; trace bias = Schur bias")
def test_trace_bias_equals_schur_bias():
    rng = np.random.default_rng(SEED)
    for K in (1, 2, 3, 4):
        fld = null_field(rng, K)
        a, b = bias_mu_trace(fld, 9, PARZEN), bias_mu_hat(fld, 9, PARZEN)
        assert abs(a - b) < 1e-8 * max(1.0, abs(b))
    fld = random_field(rng, 2)
    assert abs(bias_mu_trace(fld, 9, PARZEN) - bias_mu_hat(fld, 9, PARZEN)) < 1e-8


@pytest.mark.criterion(7, "L=1 joint statistic equals the single test; joint null in [0.02, 0.12]")
def test_single_lag_joint_statistic():
    for seed in range(10):
        rng = np.random.default_rng(SEED + seed)
        n, u = 1000, seed % 6
        x1 = ar1(rng.standard_normal(n))
        x0 = x1 + rng.standard_normal(n)
        x0[u:] += 0.05 * seed * lagged_products(x1, u)
        single = run_test(build_lagged_series(x0, [x1], [u]))
        joint = run_joint_test(x0, [x1], [u])
        assert abs(joint.statistic - single.statistic) < 1e-8


@pytest.mark.criterion(7, "L=1 joint statistic equals the single test; joint null in [0.02, 0.12]")
def test_joint_null_calibration():
    hits = 0
    for rep in range(300):
        rng = make_rng(replication_seed(SEED, 0, 1000, rep))
        e = rng.standard_normal((1500, 2))
        x1 = ar1(e[:, 1])[500:]
        x0 = x1 + e[500:, 0]
        hits += run_joint_test(x0, [x1], range(6)).reject
    rate = hits / 300
    print(f"  joint null rate {rate:.3f}")
    assert 0.02 <= rate <= 0.12


@pytest.mark.criterion(8, "coefficient recovery |mean b_1(0) - 0.5| < 0.05 over 20 seeds")
def test_coefficient_recovery():
    est = []
    for seed in range(20):
        rng = np.random.default_rng(SEED + seed)
        n = 10_000
        x1 = ar1(rng.standard_normal(n))
        x0 = 0.5 * x1 + rng.standard_normal(n)
        dec = decompose(field_from_config(MultiSeries.from_columns(x0, x1), EstimationConfig()))
        est.append(regression_coefficients(dec, 1, [0])[0])
    print(f"  mean b_1(0) = {np.mean(est):.4f}")
    assert abs(np.mean(est) - 0.5) < 0.05


@pytest.mark.criterion(9, "planted lag 2 selected in at least 80 of 100 seeds")
def test_planted_lag_selection():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(SEED + seed)
        n = 4000
        x1 = ar1(rng.standard_normal(n))
        x0 = x1 + rng.standard_normal(n)
        x0[2:] += 0.3 * lagged_products(x1, 2)
        hits += select_lag(x0, x1, 5, "integrated").lag == 2
    print(f"  lag 2 chosen in {hits}/100 seeds")
    assert hits >= 80


def _cli(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main([str(a) for a in argv])
    return code, out.getvalue()


@pytest.mark.criterion(10, "byte-identical reruns and exact four-color truth table")
def test_pipeline_determinism(tmp_path):
    rng = np.random.default_rng(SEED)
    paths = []
    for g in "ab":
        data = rng.standard_normal((300, 4))
        lines = ["r0,r1,r2,r3"] + [",".join(repr(float(v)) for v in row) for row in data]
        p = tmp_path / f"{g}.csv"
        p.write_text("\n".join(lines) + "\n")
        paths.append(p)
    runs = [
        ["connectivity", *paths, "--difference", "1"],
        ["connectivity", *paths, "--scenario", "joint-quadratic", "--format", "csv"],
        ["simulate", "--case", "1,12", "--n", "250", "--reps", "20", "--seed", "7"],
        ["select-lag", paths[0], "--response", "r0", "--covariates", "r1", "--max-lag", "5"],
    ]
    for argv in runs:
        first, second = _cli(argv), _cli(argv)
        assert first[0] == 0 and first == second


@pytest.mark.criterion(10, "byte-identical reruns and exact four-color truth table")
def test_four_color_truth_table():
    expected = {(False, False): "white", (True, False): "blue",
                (False, True): "red", (True, True): "purple"}
    for a, b, c, d in itertools.product([False, True], repeat=4):
        assert color_for(a, b) == expected[(a, b)]
        assert (color_for(a, b) == color_for(c, d)) == ((a, b) == (c, d))
    assert {color_for(a, b) for a, b in expected} == set(COLORS)
