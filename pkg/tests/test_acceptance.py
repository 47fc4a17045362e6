"""One test per acceptance criterion. Each prints a single PASS/FAIL line with its runtime."""

import io
import json

import numpy as np
import pytest

from addlab.channels import ChannelPair, apply_pure, identity, parse_channel, parse_pair, tensor, werner_holevo
from addlab.cli import parse_and_dispatch
from addlab.experiments import (
    DEFAULT_KINK_GRID,
    DEFAULT_LAMBDA_GRID,
    additivity_gap,
    exhw_certificate,
    kink_scan,
    operator_convex_suite,
    random_tensor_check,
    single_channel_bound_check,
)
from addlab.functions import (
    DiscreteMeasure,
    Kink,
    Power,
    XLogX,
    builtin_functions,
    fit_measure_weights,
    from_measure,
    operator_convexity_test,
)
from addlab.linalg import eig_hermitian
from addlab.optimize import OptimizerConfig
from addlab.wh_spectra import schmidt_state, wh3_pair_spectrum

pytestmark = pytest.mark.acceptance

PRODUCT_SPECTRUM = np.r_[[0.25] * 4, [0.0] * 5]
MAXENT_SPECTRUM = np.r_[[1 / 3], [1 / 12] * 8]


def _cli_eigenvalues(schmidt):
    out = io.StringIO()
    assert parse_and_dispatch(["spectrum", "--schmidt", schmidt], stdout=out) == 0
    return np.asarray(json.loads(out.getvalue())["eigenvalues"])


def test_c01_product_spectrum(criterion):
    c = criterion(1, "spectrum on Schmidt (1,0,0) is {1/4 x4, 0 x5}", 1e-3)
    values = c.latency(lambda: wh3_pair_spectrum((1.0, 0.0, 0.0)).values)
    err = np.abs(values - PRODUCT_SPECTRUM).max()
    elapsed = c.finish(err <= 1e-10, f"max error {err:.2e}")
    assert err <= 1e-10 and elapsed < 1e-3
    assert np.abs(_cli_eigenvalues("1,0,0") - PRODUCT_SPECTRUM).max() <= 1e-10


def test_c02_maxent_spectrum(criterion):
    c = criterion(2, "spectrum on Schmidt (1/3,1/3,1/3) is {1/3, 1/12 x8}", 1e-3)
    values = c.latency(lambda: wh3_pair_spectrum((1 / 3, 1 / 3, 1 / 3)).values)
    err = np.abs(values - MAXENT_SPECTRUM).max()
    elapsed = c.finish(err <= 1e-10, f"max error {err:.2e}")
    assert err <= 1e-10 and elapsed < 1e-3
    s = "0.33333333333333331,0.33333333333333331,0.33333333333333337"
    assert np.abs(_cli_eigenvalues(s) - MAXENT_SPECTRUM).max() <= 1e-10


def test_c03_oracle_equivalence(criterion):
    c = criterion(3, "closed form matches numeric 9x9 eigendecomposition on 200 Schmidt vectors", 10.0)
    pair = tensor(werner_holevo(3), werner_holevo(3))
    rng = np.random.default_rng(20240603)
    worst = 0.0
    for s in rng.dirichlet(np.ones(3), size=200):
        numeric = eig_hermitian(apply_pure(pair, schmidt_state(s)))[0]
        worst = max(worst, np.abs(wh3_pair_spectrum(s).values - numeric).max())
    elapsed = c.finish(worst <= 1e-7, f"max error {worst:.2e}")
    assert worst <= 1e-7 and elapsed < 10.0


@pytest.mark.parametrize(
    "f, lhs, rhs, non_additive",
    [
        (Power(5), (1 / 3) ** 5 + 8 * (1 / 12) ** 5, 4 * (1 / 4) ** 5, True),
        (Power(2), 1 / 6, 1 / 4, False),
        (Kink(0.3), 1 / 30, 0.0, True),
    ],
    ids=["power5", "power2", "kink0.30"],
)
def test_c04_certificate(criterion, f, lhs, rhs, non_additive):
    c = criterion(4, f"certificate for {f.spec}: lhs {lhs:.4e} vs rhs {rhs:.4e}", 1e-3)
    cert = c.latency(lambda: exhw_certificate(f))
    ok = abs(cert.lhs - lhs) <= 1e-12 and abs(cert.rhs - rhs) <= 1e-12 and cert.non_additive == non_additive
    elapsed = c.finish(ok, f"non_additive={cert.non_additive}")
    assert ok and elapsed < 1e-3


def test_c04_certificate_reference_values():
    assert exhw_certificate(Power(5)).lhs == pytest.approx(4.1473e-3, abs=1e-7)
    assert exhw_certificate(Power(5)).rhs == pytest.approx(3.9063e-3, abs=1e-7)


def test_c05_operator_convex_suite(criterion):
    c = criterion(5, "f_lambda suite: vertex maximiser, product value, theta-monotone", 30.0)
    assert len(DEFAULT_LAMBDA_GRID) == 16
    rep = operator_convex_suite(DEFAULT_LAMBDA_GRID)
    worst_gap = max(abs(r.gap) for r in rep.rows)
    worst_vertex = max(r.vertex_distance for r in rep.rows)
    elapsed = c.finish(rep.passed, f"max |gap| {worst_gap:.1e}, max vertex distance {worst_vertex:.1e}")
    assert rep.passed, rep.failures
    assert worst_gap <= 1e-8 and worst_vertex <= 1e-5
    assert elapsed < 30.0


def test_c06_identity_pairs_additive(criterion):
    c = criterion(6, "every built-in f is additive for (wh:3, id:3) and (depol:3, id:3)", 120.0)
    cfg = OptimizerConfig(restarts=64)
    gaps = {}
    for ch in ("wh:3", "depol:3"):
        pair = ChannelPair(parse_channel(ch), identity(3))
        for spec, f in builtin_functions().items():
            gaps[(ch, spec)] = additivity_gap(f, pair, cfg).gap
    worst = max(gaps, key=gaps.get)
    ok = all(g <= 1e-7 for g in gaps.values())
    elapsed = c.finish(ok, f"{len(gaps)} runs, max gap {gaps[worst]:.1e} ({worst[1]} on {worst[0]})")
    assert ok, {k: v for k, v in gaps.items() if v > 1e-7}
    assert elapsed < 120.0


def test_c07_gamma_lower_bound(criterion):
    c = criterion(7, "kink scan certifies (1/4,1/3), gamma >= 1/3, Lambda = 1/3", 120.0)
    rep = kink_scan(DEFAULT_KINK_GRID, parse_pair("wh:3,wh:3"), OptimizerConfig(restarts=64))
    inside = [row for row in rep.grid if 0.25 < row[0] < 1 / 3]
    lam_err = abs(rep.max_output_eigenvalue - 1 / 3)
    ok = bool(inside) and all(row[3] for row in inside) and rep.gamma_lower_bound >= 1 / 3 and lam_err <= 1e-6
    elapsed = c.finish(ok, f"{len(inside)} points in (1/4,1/3), gamma >= {rep.gamma_lower_bound:.6f}, "
                           f"Lambda error {lam_err:.1e}")
    assert ok and elapsed < 120.0


def test_c08_single_channel_bound(criterion):
    c = criterion(8, "single-channel bound holds on (wh:3, wh:3) for x^2, x^5, x log x", 60.0)
    pair = parse_pair("wh:3,wh:3")
    reps = {f.spec: single_channel_bound_check(f, pair, OptimizerConfig(restarts=64))
            for f in (Power(2), Power(5), XLogX())}
    slack = {k: r.bound - r.pair_max for k, r in reps.items()}
    ok = all(r.holds and r.pair_max <= r.bound + 1e-7 for r in reps.values())
    elapsed = c.finish(ok, "slack " + ", ".join(f"{k} {v:.2e}" for k, v in slack.items()))
    assert ok and elapsed < 60.0


def test_c09_tensor_structure(criterion):
    c = criterion(9, "Tr g(sigma) = Tr f(sigma (x) diag(mu)) on 100 random triples", 5.0)
    rep = random_tensor_check(trials=100, seed=11)
    elapsed = c.finish(rep.passed and rep.max_error <= 1e-9, f"max error {rep.max_error:.1e}")
    assert rep.passed and rep.max_error <= 1e-9 and elapsed < 5.0


def _measure_functions():
    rng = np.random.default_rng(5)
    fns = [f for f in builtin_functions().values() if f.spec.startswith("measure:")]
    fns.append(fit_measure_weights(lambda x: x**2, np.linspace(-0.99, 0.0, 16)))
    for k in (1, 3, 5):
        nodes = tuple(rng.uniform(-0.99, 0.0, k))
        fns.append(from_measure(rng.normal(), rng.normal(), rng.uniform(0.1, 3.0),
                                DiscreteMeasure(nodes, tuple(rng.dirichlet(np.ones(k))))))
    return fns


def test_c10_operator_convexity_sampler(criterion):
    c = criterion(10, "x^2 and measure functions pass at dims 2-3, x^3 fails with a 2x2 witness", 30.0)
    passing = [Power(2)] + _measure_functions()
    results = {(f.spec, d): operator_convexity_test(f, dim=d, samples=500, seed=d) for f in passing for d in (2, 3)}
    cube = operator_convexity_test(Power(3), dim=2, samples=500, seed=0)
    a, b = cube.witness
    gap = 0.5 * (a @ a @ a + b @ b @ b) - np.linalg.matrix_power(0.5 * (a + b), 3)
    witness_min = np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0]
    ok = all(r.passed for r in results.values()) and not cube.passed and a.shape == (2, 2) and witness_min < -1e-8
    elapsed = c.finish(ok, f"{len(results)} passing runs, x^3 witness eigenvalue {witness_min:.2e}")
    assert ok and elapsed < 30.0
