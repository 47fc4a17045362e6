"""Convex functions on [0, 1] and the trace functional ``sigma -> Tr f(sigma)``.

Each function is an immutable object that evaluates elementwise on numpy
arrays and carries the metadata the additivity transforms need: its value at
zero and whether (and how) it is differentiable there.

The small spec language used by the command line is handled by
:func:`parse_function`::

    power:5  renyi:0.5  negpower:0.5  xlogx  xplogx:0.75  kink:0.3
    flambda:-0.5  affine:b:c  delta0  delta1  measure:@file.json
    measure:alpha:beta:gamma:node,node,...:weight,weight,...
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    CLAMP_ATOL,
    as_hermitian,
    clamp_spectrum,
    eigvals_hermitian,
    haar_unitary,
    spectral_apply,
)

DELTA_ATOL = 1e-9
OPERATOR_CONVEXITY_ATOL = 1e-8


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise ValueError("convex functions are defined on [0, 1] only")
    return x


class ConvexFunction:
    """A convex function f: [0, 1] -> R.

    Subclasses implement ``_eval`` on float arrays already checked to lie in
    ``[0, 1]`` and fill in the derivative metadata.
    """

    differentiable_at_0: bool = True

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        x = _check_domain(x)
        y = self._eval(x)
        return float(y) if np.ndim(y) == 0 else y

    @property
    def value_at_0(self) -> float:
        return float(self._eval(np.float64(0.0)))

    @property
    def derivative_at_0(self) -> float | None:
        return None

    @property
    def spec(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class Affine(ConvexFunction):
    """x -> b x + c."""

    b: float
    c: float

    def _eval(self, x):
        return self.b * x + self.c

    @property
    def derivative_at_0(self):
        return float(self.b)

    @property
    def spec(self):
        return f"affine:{self.b!r}:{self.c!r}"


@dataclass(frozen=True)
class Power(ConvexFunction):
    """x -> x**p for p >= 1."""

    p: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"x**p is convex on [0,1] only for p >= 1 (got {self.p}); use NegPower")

    def _eval(self, x):
        return np.power(x, self.p)

    @property
    def derivative_at_0(self):
        return 1.0 if self.p == 1 else 0.0

    @property
    def spec(self):
        return f"power:{self.p!r}"


@dataclass(frozen=True)
class NegPower(ConvexFunction):
    """x -> -x**p for 0 < p < 1."""

    p: float
    differentiable_at_0 = False

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"-x**p needs 0 < p < 1, got {self.p}")

    def _eval(self, x):
        return -np.power(x, self.p)

    @property
    def spec(self):
        return f"negpower:{self.p!r}"


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


@dataclass(frozen=True)
class XLogX(ConvexFunction):
    """x -> x log x with 0 log 0 = 0."""

    differentiable_at_0 = False

    def _eval(self, x):
        return _xlogx(x)

    @property
    def spec(self):
        return "xlogx"


@dataclass(frozen=True)
class XpLogX(ConvexFunction):
    """x -> x**p log x, convex on [0, 1] exactly for 1/2 <= p <= 1."""

    p: float
    differentiable_at_0 = False

    def __post_init__(self):
        if not 0.5 <= self.p <= 1.0:
            raise ValueError(f"x**p log x is convex on [0,1] only for 1/2 <= p <= 1, got {self.p}")

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        pos = np.where(x > 0, x, 1.0)
        return np.where(x > 0, np.power(pos, self.p) * np.log(pos), 0.0)

    @property
    def spec(self):
        return f"xplogx:{self.p!r}"


@dataclass(frozen=True)
class Kink(ConvexFunction):
    """x -> max(0, x - x0)."""

    x0: float

    def __post_init__(self):
        if not 0.0 <= self.x0 <= 1.0:
            raise ValueError(f"kink location must lie in [0, 1], got {self.x0}")

    @property
    def differentiable_at_0(self):
        return self.x0 > 0

    def _eval(self, x):
        return np.maximum(0.0, x - self.x0)

    @property
    def derivative_at_0(self):
        return 0.0 if self.x0 > 0 else None

    @property
    def spec(self):
        return f"kink:{self.x0!r}"


@dataclass(frozen=True)
class FLambda(ConvexFunction):
    """x -> (2x-1)^2 / (1 - lam (2x-1)) for lam in (-1, 0]."""

    lam: float

    def __post_init__(self):
        if not -1.0 < self.lam <= 0.0:
            raise ValueError(f"lambda must lie in (-1, 0], got {self.lam}")

    def _eval(self, x):
        t = 2.0 * x - 1.0
        return t * t / (1.0 - self.lam * t)

    @property
    def derivative_at_0(self):
        lam = self.lam
        return 2.0 * (-2.0 - lam) / (1.0 + lam) ** 2

    @property
    def spec(self):
        return f"flambda:{self.lam!r}"


@dataclass(frozen=True)
class Delta0(ConvexFunction):
    """1 at x = 0, else 0. Arguments <= 1e-9 count as zero."""

    differentiable_at_0 = False

    def _eval(self, x):
        return np.where(np.asarray(x) <= DELTA_ATOL, 1.0, 0.0)

    @property
    def spec(self):
        return "delta0"


@dataclass(frozen=True)
class Delta1(ConvexFunction):
    """1 at x = 1, else 0. Arguments >= 1 - 1e-9 count as one."""

    def _eval(self, x):
        return np.where(np.asarray(x) >= 1.0 - DELTA_ATOL, 1.0, 0.0)

    @property
    def derivative_at_0(self):
        return 0.0

    @property
    def spec(self):
        return "delta1"


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finitely many atoms in (-1, 0]."""

    nodes: tuple
    weights: tuple

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        weights = tuple(float(v) for v in self.weights)
        if len(nodes) != len(weights) or not nodes:
            raise ValueError("measure needs matching, nonempty nodes and weights")
        if any(not -1.0 < v <= 0.0 for v in nodes):
            raise ValueError("measure nodes must lie in (-1, 0]")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("measure weights must be nonnegative and sum to 1")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class FromMeasure(ConvexFunction):
    """x -> alpha + beta x + gamma * sum_j w_j f_{lam_j}(x)."""

    alpha: float
    beta: float
    gamma: float
    measure: DiscreteMeasure

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        t = 2.0 * x - 1.0
        lam = np.asarray(self.measure.nodes)
        w = np.asarray(self.measure.weights)
        terms = (t[..., None] ** 2) / (1.0 - lam * t[..., None])
        return self.alpha + self.beta * x + self.gamma * (terms @ w)

    @property
    def derivative_at_0(self):
        d = sum(w * FLambda(lam).derivative_at_0 for lam, w in zip(self.measure.nodes, self.measure.weights))
        return self.beta + self.gamma * d

    @property
    def spec(self):
        nodes = ",".join(repr(v) for v in self.measure.nodes)
        weights = ",".join(repr(v) for v in self.measure.weights)
        return f"measure:{self.alpha!r}:{self.beta!r}:{self.gamma!r}:{nodes}:{weights}"


@dataclass(frozen=True)
class AffineTransformed(ConvexFunction):
    """x -> a f(x) + b x + c with a > 0."""

    f: ConvexFunction
    a: float
    b: float
    c: float

    @property
    def differentiable_at_0(self):
        return self.f.differentiable_at_0

    def _eval(self, x):
        return self.a * self.f._eval(x) + self.b * x + self.c

    @property
    def derivative_at_0(self):
        d = self.f.derivative_at_0
        return None if d is None else self.a * d + self.b

    @property
    def spec(self):
        return f"{self.a!r}*[{self.f.spec}]+{self.b!r}x+{self.c!r}"


@dataclass(frozen=True)
class Dilated(ConvexFunction):
    """x -> f(x / n)."""

    f: ConvexFunction
    n: float

    @property
    def differentiable_at_0(self):
        return self.f.differentiable_at_0

    def _eval(self, x):
        return self.f._eval(np.asarray(x, dtype=float) / self.n)

    @property
    def derivative_at_0(self):
        d = self.f.derivative_at_0
        return None if d is None else d / self.n

    @property
    def spec(self):
        return f"[{self.f.spec}](x/{self.n!r})"


@dataclass(frozen=True)
class MuTransformed(ConvexFunction):
    """x -> sum_i f(mu_i x)."""

    f: ConvexFunction
    mu: tuple

    @property
    def differentiable_at_0(self):
        return self.f.differentiable_at_0

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        return sum(self.f._eval(m * x) for m in self.mu)

    @property
    def derivative_at_0(self):
        d = self.f.derivative_at_0
        return None if d is None else d * sum(self.mu)

    @property
    def spec(self):
        return f"sum_mu[{self.f.spec}]"


@dataclass(frozen=True)
class ConvexSum(ConvexFunction):
    """Pointwise sum of convex functions."""

    terms: tuple

    @property
    def differentiable_at_0(self):
        return all(t.differentiable_at_0 for t in self.terms)

    def _eval(self, x):
        return sum(t._eval(x) for t in self.terms)

    @property
    def derivative_at_0(self):
        ds = [t.derivative_at_0 for t in self.terms]
        return None if any(d is None for d in ds) else sum(ds)

    @property
    def spec(self):
        return "+".join(t.spec for t in self.terms)


def evaluate(f: ConvexFunction, x):
    """Evaluate ``f`` at ``x`` in [0, 1] (scalar or array)."""
    return f(x)


def renyi(p: float) -> ConvexFunction:
    """The function whose trace maximisation is the minimum output p-Renyi entropy problem:
    x**p for p > 1, x log x for p = 1, -x**p for 0 < p < 1."""
    if p > 1:
        return Power(p)
    if p == 1:
        return XLogX()
    if p > 0:
        return NegPower(p)
    raise ValueError("p must be positive")


def normalize_affine(f: ConvexFunction, a: float, b: float = 0.0, c: float = 0.0) -> ConvexFunction:
    if not a > 0:
        raise ValueError(f"scale factor must be positive, got {a}")
    return AffineTransformed(f, float(a), float(b), float(c))


def dilate(f: ConvexFunction, n: float) -> ConvexFunction:
    if not n >= 1:
        raise ValueError(f"dilation factor must be >= 1, got {n}")
    if n == 1:
        return f
    return Dilated(f, n)


def mu_transform(f: ConvexFunction, mu) -> ConvexFunction:
    """x -> sum_i f(mu_i x) for a (sub-)probability vector ``mu``.

    Sub-probability vectors are accepted only for ``f`` differentiable at zero.
    """
    mu = tuple(float(m) for m in mu)
    if not mu or any(m < 0 for m in mu):
        raise ValueError("mu must be a nonempty vector of nonnegative weights")
    total = sum(mu)
    if total > 1 + 1e-12:
        raise ValueError(f"mu sums to {total} > 1")
    if total < 1 - 1e-12 and not f.differentiable_at_0:
        raise ValueError("sub-probability mu requires f differentiable at 0")
    return MuTransformed(f, mu)


def from_measure(alpha: float, beta: float, gamma: float, measure: DiscreteMeasure) -> FromMeasure:
    return FromMeasure(float(alpha), float(beta), float(gamma), measure)


def fit_measure_weights(target, nodes, samples: int = 201):
    """Least-squares fit of ``(alpha, beta, gamma, measure)`` reproducing ``target`` on [0, 1].

    Solves for nonnegative coefficients ``c_j = gamma w_j`` of the ``f_lambda``
    basis (plus a free affine part) by NNLS.
    """
    from scipy.optimize import nnls

    x = np.linspace(0.0, 1.0, samples)
    y = np.asarray(target(x), dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    t = 2 * x - 1
    basis = t[:, None] ** 2 / (1 - nodes[None, :] * t[:, None])
    # affine part enters as +/- columns so NNLS can give it any sign
    design = np.column_stack([np.ones_like(x), -np.ones_like(x), x, -x, basis])
    coef, _ = nnls(design, y)
    alpha = coef[0] - coef[1]
    beta = coef[2] - coef[3]
    cj = coef[4:]
    gamma = cj.sum()
    if gamma <= 0:
        weights = np.zeros_like(cj)
        weights[0] = 1.0
    else:
        weights = cj / gamma
        weights = weights / weights.sum()
    return from_measure(alpha, beta, gamma, DiscreteMeasure(tuple(nodes), tuple(weights)))


def trace_apply(f: ConvexFunction, sigma, eigvals=None) -> float:
    """Tr f(sigma) = sum of f over all eigenvalues (zeros included).

    Eigenvalues are clamped into [0, 1] when within 1e-9 of the boundary;
    larger excursions raise ``ValueError``. Pass ``eigvals`` to skip the
    eigendecomposition.
    """
    if eigvals is None:
        eigvals = eigvals_hermitian(sigma)
    w = clamp_spectrum(eigvals, 0.0, 1.0, CLAMP_ATOL)
    return float(np.sum(f._eval(w)))


def trace_apply_spectra(f: ConvexFunction, spectra) -> np.ndarray:
    """Vectorised ``sum_i f(w_i)`` over the last axis of an array of spectra (clipped to [0, 1])."""
    w = np.asarray(spectra, dtype=float).clip(0.0, 1.0)
    return f._eval(w).sum(axis=-1)


def is_midpoint_convex(f: ConvexFunction, points: int = 101, atol: float = 1e-12) -> bool:
    x = np.linspace(0.0, 1.0, points)
    xi, yi = np.meshgrid(x, x)
    lhs = f._eval((xi + yi) / 2)
    rhs = (f._eval(xi) + f._eval(yi)) / 2
    return bool(np.all(lhs <= rhs + atol))


@dataclass(frozen=True)
class OperatorConvexityReport:
    passed: bool
    worst_violation: float
    witness: tuple | None
    samples: int


def _random_unit_spectrum_matrix(d, rng):
    u = haar_unitary(d, rng)
    w = rng.uniform(0.0, 1.0, d)
    return (u * w) @ u.conj().T


def operator_convexity_test(
    f: ConvexFunction, dim: int = 2, samples: int = 500, seed: int = 0, atol: float = OPERATOR_CONVEXITY_ATOL
) -> OperatorConvexityReport:
    """Sample the midpoint operator convexity inequality.

    Draws Hermitian pairs ``(A, B)`` with spectra in [0, 1] and checks that
    ``(f(A) + f(B))/2 - f((A + B)/2)`` is positive semidefinite. The witness
    is the pair with the most negative eigenvalue.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = np.random.default_rng(seed)

    def fm(m):
        return spectral_apply(f._eval, m, domain=(0.0, 1.0))

    worst, witness = np.inf, None
    for _ in range(samples):
        a = _random_unit_spectrum_matrix(dim, rng)
        b = _random_unit_spectrum_matrix(dim, rng)
        gap = 0.5 * (fm(a) + fm(b)) - fm(0.5 * (a + b))
        lo = float(np.linalg.eigvalsh(as_hermitian(gap, atol=1e-8))[0])
        if lo < worst:
            worst, witness = lo, (a, b)
    return OperatorConvexityReport(worst >= -atol, max(0.0, -worst), witness, samples)


def load_measure_file(path) -> FromMeasure:
    with open(path) as fh:
        d = json.load(fh)
    return from_measure(d["alpha"], d["beta"], d["gamma"], DiscreteMeasure(tuple(d["nodes"]), tuple(d["weights"])))


def parse_function(spec: str) -> ConvexFunction:
    """Build a function from its spec string (see module docstring)."""
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if name == "measure" and len(args) == 1 and args[0].startswith("@"):
            return load_measure_file(args[0][1:])
        if name == "measure" and len(args) == 5:
            nodes = tuple(float(v) for v in args[3].split(","))
            weights = tuple(float(v) for v in args[4].split(","))
            return from_measure(float(args[0]), float(args[1]), float(args[2]), DiscreteMeasure(nodes, weights))
        nums = [float(a) for a in args]
    except (ValueError, KeyError, OSError) as exc:
        raise ValueError(f"bad function spec {spec!r}: {exc}") from None
    builders = {
        ("power", 1): lambda: Power(nums[0]),
        ("renyi", 1): lambda: renyi(nums[0]),
        ("negpower", 1): lambda: NegPower(nums[0]),
        ("xlogx", 0): XLogX,
        ("xplogx", 1): lambda: XpLogX(nums[0]),
        ("kink", 1): lambda: Kink(nums[0]),
        ("flambda", 1): lambda: FLambda(nums[0]),
        ("affine", 2): lambda: Affine(nums[0], nums[1]),
        ("delta0", 0): Delta0,
        ("delta1", 0): Delta1,
    }
    build = builders.get((name, len(nums)))
    if build is None or any(not math.isfinite(v) for v in nums):
        raise ValueError(f"bad function spec {spec!r}")
    return build()


def builtin_functions() -> dict[str, ConvexFunction]:
    """One representative of every built-in function kind, keyed by spec."""
    fns = [
        Affine(0.5, 0.25),
        Power(2.0),
        Power(5.0),
        NegPower(0.5),
        XLogX(),
        XpLogX(0.75),
        Kink(0.3),
        FLambda(-0.5),
        Delta0(),
        Delta1(),
        from_measure(0.1, -0.2, 0.5, DiscreteMeasure((-0.8, -0.3, 0.0), (0.2, 0.5, 0.3))),
    ]
    return {f.spec: f for f in fns}
