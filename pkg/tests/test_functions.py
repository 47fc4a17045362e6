import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addlab.channels import tensor, werner_holevo
from addlab.functions import (
    Affine,
    ConvexSum,
    Delta0,
    Delta1,
    DiscreteMeasure,
    FLambda,
    Kink,
    NegPower,
    Power,
    XLogX,
    XpLogX,
    builtin_functions,
    dilate,
    evaluate,
    fit_measure_weights,
    from_measure,
    is_midpoint_convex,
    mu_transform,
    normalize_affine,
    operator_convexity_test,
    parse_function,
    renyi,
    trace_apply,
)
from addlab.linalg import random_density
from addlab.wh_spectra import schmidt_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)
GRID = np.linspace(0.0, 1.0, 201)


def test_eval_examples():
    assert evaluate(XLogX(), 0.0) == 0.0
    assert evaluate(FLambda(0.0), 0.75) == pytest.approx(0.25, abs=1e-15)
    assert evaluate(Kink(0.3), 1 / 3) == pytest.approx(1 / 3 - 0.3, abs=1e-15)
    with pytest.raises(ValueError):
        evaluate(Power(2), 1.5)
    with pytest.raises(ValueError):
        evaluate(Power(2), -0.1)


def test_constructor_domains():
    for bad in (lambda: Power(0.5), lambda: NegPower(1.0), lambda: XpLogX(0.4), lambda: XpLogX(1.1),
                lambda: FLambda(-1.0), lambda: FLambda(0.1), lambda: Kink(1.5)):
        with pytest.raises(ValueError):
            bad()


@pytest.mark.parametrize("spec", list(builtin_functions()))
def test_builtins_are_convex(spec):
    assert is_midpoint_convex(builtin_functions()[spec])


def test_xplogx_convexity_window():
    # convex on [0, 1] exactly for 1/2 <= p <= 1; p = 0.4 fails the midpoint test
    x = np.linspace(0, 1, 2001)
    y = np.where(x > 0, x**0.4 * np.log(np.where(x > 0, x, 1)), 0)
    assert np.diff(y, 2).min() < 0
    for p in (0.5, 0.75, 1.0):
        assert is_midpoint_convex(XpLogX(p))


def test_normalize_affine_examples():
    f = XLogX()
    same = normalize_affine(f, 1, 0, 0)
    assert np.allclose(same(GRID), f(GRID))
    assert normalize_affine(XLogX(), 2, 1, -1)(1.0) == 0.0
    with pytest.raises(ValueError):
        normalize_affine(f, 0.0)


def test_normalize_kink_form():
    # a piecewise-linear convex function with slopes a < c and break at x0 normalises to the kink
    a, b, c, x0 = 0.5, 0.2, 3.0, 0.3
    f = ConvexSum((Affine(a, b), normalize_affine(Kink(x0), c - a)))
    g = normalize_affine(f, 1 / (c - a), -a / (c - a), -b / (c - a))
    assert np.allclose(g(GRID), Kink(x0)(GRID), atol=1e-14)


def test_dilate_and_mu_examples():
    assert dilate(Power(2), 2)(1.0) == 0.25
    assert mu_transform(Power(2), (0.5, 0.5))(1.0) == 0.5
    with pytest.raises(ValueError):
        dilate(Power(2), 0.5)
    with pytest.raises(ValueError):
        mu_transform(Power(2), (0.7, 0.7))
    with pytest.raises(ValueError):
        mu_transform(XLogX(), (0.3, 0.3))
    assert mu_transform(Power(2), (0.3, 0.3))(1.0) == pytest.approx(0.18)


def test_from_measure_examples():
    f = from_measure(0, 0, 1, DiscreteMeasure((0.0,), (1.0,)))
    assert f(0.0) == 1.0
    assert np.allclose(f(GRID), (2 * GRID - 1) ** 2)
    g = from_measure(0.3, -0.7, 0, DiscreteMeasure((-0.5, 0.0), (0.5, 0.5)))
    assert np.allclose(g(GRID), 0.3 - 0.7 * GRID)
    with pytest.raises(ValueError):
        from_measure(0, 0, -1, DiscreteMeasure((0.0,), (1.0,)))
    with pytest.raises(ValueError):
        DiscreteMeasure((-1.0,), (1.0,))
    with pytest.raises(ValueError):
        DiscreteMeasure((0.0, -0.5), (0.6, 0.6))


def test_trace_apply_examples():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5):
        assert trace_apply(Affine(0.4, 0.25), random_density(d, rng)) == pytest.approx(0.4 + 0.25 * d)
    assert trace_apply(Power(2), np.eye(2) / 2) == pytest.approx(0.5)
    wh = tensor(werner_holevo(3), werner_holevo(3))
    psi = schmidt_state([1 / 3] * 3)
    out = wh.map(np.outer(psi, psi.conj()))
    expected = (1 / 3) ** 5 + 8 * (1 / 12) ** 5
    assert trace_apply(Power(5), out) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(4.1473e-3, abs=1e-7)


def test_trace_apply_clamps_noise_and_rejects_excursions():
    assert trace_apply(XLogX(), np.diag([1.0, -1e-15])) == 0.0
    with pytest.raises(ValueError):
        trace_apply(XLogX(), np.diag([1.1, -0.1]))


def test_delta_thresholds():
    assert Delta0()(1e-10) == 1.0 and Delta0()(1e-8) == 0.0
    assert Delta1()(1 - 1e-10) == 1.0 and Delta1()(1 - 1e-8) == 0.0
    assert trace_apply(Delta0(), np.diag([1.0, 0, 0])) == 2.0


@settings(max_examples=30, deadline=None)
@given(seed=seeds, a=st.floats(0.01, 10), b=st.floats(-5, 5), c=st.floats(-5, 5), d=st.integers(1, 5))
def test_cone_property(seed, a, b, c, d):
    sigma = random_density(d, np.random.default_rng(seed))
    for f in builtin_functions().values():
        lhs = trace_apply(normalize_affine(f, a, b, c), sigma)
        rhs = a * trace_apply(f, sigma) + b + c * d
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=st.integers(1, 4), k=st.integers(1, 4))
def test_mu_transform_spectral_identity(seed, d, k):
    rng = np.random.default_rng(seed)
    sigma = random_density(d, rng)
    mu = rng.dirichlet(np.ones(k))
    for f in builtin_functions().values():
        lhs = trace_apply(mu_transform(f, mu), sigma)
        rhs = trace_apply(f, np.kron(sigma, np.diag(mu)))
        assert abs(lhs - rhs) <= 1e-9


@pytest.mark.parametrize("n", [1e3, 1e6])
def test_dilates_converge_to_delta0(n):
    g = ConvexSum((Delta0(), Power(2)))  # g(0) = 1, discontinuous at 0
    assert g(0.0) == 1.0
    err = np.abs(dilate(g, n)(GRID) - Delta0()(GRID)).max()
    assert err <= 1.0 / n**2


@pytest.mark.parametrize("p", [0.5, 0.75, 1.0])
def test_distorted_entropy_limit(p):
    n = 1e6
    h = normalize_affine(dilate(XpLogX(p), n), n**p / math.log(n))
    x = GRID
    xp_logx = np.where(x > 0, x**p * np.log(np.where(x > 0, x, 1)), 0)
    closed = -(x**p) + xp_logx / math.log(n)
    assert np.abs(h(x) - closed).max() <= 1e-10
    # distance to -x^p is x^p |log x| / log n <= 1 / (p e log n), shrinking like 1/log n
    dev = np.abs(h(x) + x**p).max()
    assert dev <= 1.0 / (p * math.e * math.log(n)) + 1e-12
    h3 = normalize_affine(dilate(XpLogX(p), 1e3), 1e3**p / math.log(1e3))
    assert np.abs(h3(x) + x**p).max() == pytest.approx(2 * dev, rel=1e-6)


def test_measure_fit_reproduces_square():
    nodes = np.linspace(-0.99, 0.0, 64)
    f = fit_measure_weights(lambda x: x**2, nodes)
    assert np.abs(f(GRID) - GRID**2).max() <= 1e-3
    assert f.gamma >= 0 and abs(sum(f.measure.weights) - 1) <= 1e-12


def test_operator_convexity_examples():
    assert operator_convexity_test(Power(2), dim=2, samples=200).passed
    rep = operator_convexity_test(Power(3), dim=2, samples=200)
    assert not rep.passed and rep.worst_violation > 1e-8
    a, b = rep.witness
    assert a.shape == b.shape == (2, 2)
    cube = lambda m: m @ m @ m  # noqa: E731
    gap = 0.5 * (cube(a) + cube(b)) - cube(0.5 * (a + b))
    assert np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0] < -1e-8
    rep = operator_convexity_test(Affine(0.3, -0.2), dim=3, samples=100)
    assert rep.passed and rep.worst_violation <= 1e-12


@settings(max_examples=8, deadline=None)
@given(seed=seeds, k=st.integers(1, 4), gamma=st.floats(0, 3), dim=st.integers(2, 3))
def test_measure_functions_are_operator_convex(seed, k, gamma, dim):
    rng = np.random.default_rng(seed)
    nodes = tuple(rng.uniform(-0.99, 0.0, k))
    f = from_measure(rng.normal(), rng.normal(), gamma, DiscreteMeasure(nodes, tuple(rng.dirichlet(np.ones(k)))))
    assert operator_convexity_test(f, dim=dim, samples=100, seed=seed).passed


def test_renyi_family():
    assert renyi(2) == Power(2)
    assert renyi(1) == XLogX()
    assert renyi(0.5) == NegPower(0.5)
    with pytest.raises(ValueError):
        renyi(0)


def test_derivative_metadata():
    assert FLambda(-0.5).derivative_at_0 == pytest.approx(2 * (-1.5) / 0.25)
    h = 1e-7
    f = FLambda(-0.5)
    assert (f(h) - f(0)) / h == pytest.approx(f.derivative_at_0, rel=1e-5)
    assert not XLogX().differentiable_at_0
    assert Kink(0.3).derivative_at_0 == 0.0


def test_parse_round_trip():
    for spec, f in builtin_functions().items():
        assert parse_function(spec) == f
        assert parse_function(f.spec).spec == spec
    assert parse_function("renyi:0.5") == NegPower(0.5)


def test_parse_errors():
    for bad in ("pow:3", "power", "power:x", "kink:2", "flambda:0.5", "power:nan", "measure:@/nonexistent.json"):
        with pytest.raises(ValueError):
            parse_function(bad)


def test_measure_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"alpha": 0, "beta": 0, "gamma": 1, "nodes": [0.0], "weights": [1.0]}))
    f = parse_function(f"measure:@{path}")
    assert np.allclose(f(GRID), (2 * GRID - 1) ** 2)
