"""Global maximisation of trace objectives over pure input states.

The searches here are multi-start Nelder-Mead runs on a real chart of the
unit sphere: a state on C^n is parametrised by n-1 hyperspherical angles for
the moduli and n-1 relative phases. Each restart draws its own generator
from ``SeedSequence(seed).spawn``, so results do not depend on how many
restarts run concurrently.

Nelder-Mead is written as a coroutine that hands out the points it wants
evaluated. This lets all restarts advance together, with one vectorised
objective call per round. Every point is evaluated on its own inside that
call, so a restart follows the same trajectory however the restarts are
grouped.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channels import Channel, ChannelPair
from .functions import ConvexFunction, trace_apply_spectra
from .linalg import random_pure_state
from .wh_spectra import schmidt_state, wh3_pair_eigenvalues

AGREEMENT_ATOL = 1e-7
XATOL = 1e-6
MAXFEV_FACTOR = 2
PRODUCT_ROUNDS = 10


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 2000
    tol: float = 1e-10
    seed: int = 0
    simplex_grid: int = 200
    threads: int | None = None

    def __post_init__(self):
        for name in ("restarts", "max_iters", "simplex_grid"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class OptResult:
    value: float
    argmax: np.ndarray
    schmidt: tuple | None = None
    restarts_agreeing: int = 1
    converged: bool = True
    exact: bool = False
    values: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_re": self.argmax.real.tolist(),
            "argmax_im": self.argmax.imag.tolist(),
            "schmidt": None if self.schmidt is None else list(self.schmidt),
            "restarts_agreeing": self.restarts_agreeing,
            "converged": self.converged,
            "exact": self.exact,
        }


def schmidt_decompose(psi, d1: int, d2: int):
    """Schmidt decomposition of a pure state on C^d1 (x) C^d2.

    Returns ``(c, left, right)``: descending coefficients with ``sum c**2 = 1``
    and orthonormal columns such that ``psi = sum_i c_i left[:, i] (x) right[:, i]``.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d1 * d2,):
        raise ValueError(f"state of length {psi.size} does not match {d1}x{d2}")
    u, c, vh = np.linalg.svd(psi.reshape(d1, d2), full_matrices=False)
    return c, u, vh.T


def schmidt_probabilities(psi, d1: int, d2: int) -> tuple:
    c = schmidt_decompose(psi, d1, d2)[0]
    return tuple(float(v) for v in c**2)


def sphere_points(params, n: int) -> np.ndarray:
    """Map rows of 2n-2 real parameters (n-1 angles, n-1 phases) to unit vectors in C^n."""
    params = np.asarray(params, dtype=float)
    theta = params[..., : n - 1]
    r = np.empty(params.shape[:-1] + (n,))
    r[..., 0] = 1.0
    np.cumprod(np.sin(theta), axis=-1, out=r[..., 1:])
    r[..., :-1] *= np.cos(theta)
    z = r.astype(complex)
    z[..., 1:] *= np.exp(1j * params[..., n - 1 :])
    return z


def sphere_point(params, n: int) -> np.ndarray:
    """Map 2n-2 real parameters (n-1 angles, n-1 phases) to a unit vector in C^n."""
    return sphere_points(params, n)


def sphere_params(psi) -> np.ndarray:
    """Inverse of :func:`sphere_point` (up to global phase)."""
    psi = np.asarray(psi, dtype=complex)
    n = psi.size
    psi = psi / np.linalg.norm(psi)
    r = np.abs(psi)
    tail = np.sqrt(np.cumsum((r**2)[::-1])[::-1])
    theta = np.arctan2(tail[1:], r[:-1])
    phi = np.angle(psi[1:]) - np.angle(psi[0]) if r[0] > 0 else np.angle(psi[1:])
    return np.concatenate([theta, phi])[: 2 * n - 2]


def _threads(cfg: OptimizerConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    return max(1, int(os.environ.get("ADDLAB_THREADS", "1")))


def _restart_rngs(cfg: OptimizerConfig) -> list:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)]


def _run_restarts(task, cfg: OptimizerConfig):
    rngs = _restart_rngs(cfg)
    n = _threads(cfg)
    if n == 1:
        return [task(r) for r in rngs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(task, rngs))


def _nelder_mead(x0, cfg: OptimizerConfig, step: float | None = None):
    """Nelder-Mead minimisation with the standard coefficients, as a coroutine.

    Yields arrays of points of shape ``(k, dim)``, expects their ``k``
    objective values back, and returns ``(x, fun, converged)``. The run
    converges once the simplex fits within XATOL and its values within
    ``cfg.tol``. It stops unconverged after ``cfg.max_iters`` iterations or
    ``MAXFEV_FACTOR * cfg.max_iters`` evaluations. The default initial simplex
    moves each coordinate by 5% (to 0.00025 when it is zero); ``step`` gives
    an axis-aligned simplex of that size instead.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    sim = np.tile(x0, (dim + 1, 1))
    if step is None:
        axes = np.arange(dim)
        sim[axes + 1, axes] = np.where(x0 != 0, 1.05 * x0, 0.00025)
    else:
        sim[1:] += step * np.eye(dim)
    maxfev = MAXFEV_FACTOR * cfg.max_iters
    fsim = np.array((yield sim.copy()), dtype=float)
    nfev = dim + 1
    order = np.argsort(fsim)
    sim, fsim = sim[order], fsim[order]
    converged = False
    iteration = 1
    while nfev < maxfev and iteration < cfg.max_iters:
        if np.max(np.abs(sim[1:] - sim[0])) <= XATOL and np.max(np.abs(fsim[1:] - fsim[0])) <= cfg.tol:
            converged = True
            break
        xbar = sim[:-1].sum(axis=0) / dim
        worst = sim[-1].copy()
        xr = 2.0 * xbar - worst
        fxr = float((yield xr[None])[0])
        nfev += 1
        if fxr < fsim[0]:
            if nfev >= maxfev:
                break
            xe = 3.0 * xbar - 2.0 * worst
            fxe = float((yield xe[None])[0])
            nfev += 1
            sim[-1], fsim[-1] = (xe, fxe) if fxe < fxr else (xr, fxr)
        elif fxr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fxr
        else:
            if nfev >= maxfev:
                break
            if fxr < fsim[-1]:
                xc = 1.5 * xbar - 0.5 * worst
                fxc = float((yield xc[None])[0])
                accept = fxc <= fxr
            else:
                xc = 0.5 * xbar + 0.5 * worst
                fxc = float((yield xc[None])[0])
                accept = fxc < fsim[-1]
            nfev += 1
            if accept:
                sim[-1], fsim[-1] = xc, fxc
            else:
                if nfev + dim > maxfev:
                    break
                sim[1:] = sim[0] + 0.5 * (sim[1:] - sim[0])
                fsim[1:] = (yield sim[1:].copy())
                nfev += dim
        iteration += 1
        order = np.argsort(fsim)
        sim, fsim = sim[order], fsim[order]
    order = np.argsort(fsim)
    return sim[order[0]].copy(), float(fsim[order[0]]), converged


def _polish(x0, cfg: OptimizerConfig):
    """Nelder-Mead from ``x0``; a run that hits a cap is restarted once from its end point."""
    x, fun, ok = yield from _nelder_mead(x0, cfg)
    if not ok:
        x2, fun2, ok = yield from _nelder_mead(x, cfg)
        if fun2 <= fun:
            x, fun = x2, fun2
    return x, fun, ok


def _drive(searches, batch_fun) -> list:
    """Advance coroutine searches together, evaluating each round's points with one ``batch_fun`` call."""
    results = [None] * len(searches)
    pending = {i: next(search) for i, search in enumerate(searches)}
    while pending:
        idx = list(pending)
        values = np.asarray(batch_fun(np.concatenate([pending[i] for i in idx])), dtype=float)
        offset, following = 0, {}
        for i in idx:
            k = len(pending[i])
            try:
                following[i] = searches[i].send(values[offset : offset + k])
            except StopIteration as stop:
                results[i] = stop.value
            offset += k
        pending = following
    return results


def _minimize(fun, x0, cfg: OptimizerConfig):
    """Polished minimisation of a scalar function of one parameter vector; returns ``(x, fun, converged)``."""
    return _drive([_polish(x0, cfg)], lambda points: [fun(p) for p in points])[0]


def _minimize_all(starts, batch_fun, cfg: OptimizerConfig) -> list:
    """One polished search per start, run in lockstep; with several threads the starts are split into chunks."""
    n = min(_threads(cfg), len(starts))
    if n <= 1:
        return _drive([_polish(x, cfg) for x in starts], batch_fun)
    chunks = np.array_split(np.arange(len(starts)), n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        parts = pool.map(lambda idx: _drive([_polish(starts[i], cfg) for i in idx], batch_fun), chunks)
        return [r for part in parts for r in part]


def _polished_search(value_of, psi0, cfg: OptimizerConfig):
    """Maximise ``value_of(psi)`` from ``psi0``."""
    n = psi0.size
    x, fun, ok = _minimize(lambda p: -value_of(sphere_point(p, n)), sphere_params(psi0), cfg)
    return float(-fun), sphere_point(x, n), bool(ok)


def _reduce(results, extra_tol: float = AGREEMENT_ATOL):
    # results: list of (value, psi, converged) in restart order; ties go to the lowest index
    values = [r[0] for r in results]
    k = int(np.argmax(values))
    best = results[k]
    agreeing = sum(1 for v in values if v >= best[0] - extra_tol)
    return best, agreeing, values


def spectrum_objective(f: ConvexFunction):
    def objective(spectra):
        return trace_apply_spectra(f, spectra)

    return objective


def _largest(spectra):
    return spectra[..., -1]


def _search_channel(channel: Channel, objective, cfg: OptimizerConfig) -> OptResult:
    """Multi-start maximisation of ``objective(sorted output spectra)`` over pure inputs."""
    n = channel.dim_in
    output = channel.pure_output_fn()
    if n == 1:
        psi = np.ones(1, dtype=complex)
        value = float(objective(np.linalg.eigvalsh(output(psi))))
        results = [(value, psi, True)] * cfg.restarts
    else:
        starts = [sphere_params(random_pure_state(n, rng)) for rng in _restart_rngs(cfg)]

        def neg_values(points):
            return -objective(np.linalg.eigvalsh(output(sphere_points(points, n))))

        results = [(float(-fun), sphere_point(x, n), bool(ok)) for x, fun, ok in _minimize_all(starts, neg_values, cfg)]
    (value, psi, conv), agreeing, values = _reduce(results)
    return OptResult(value, psi, None, agreeing, conv, False, values)


def maximize_spectral(channel: Channel, objective, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise ``objective(ascending output spectrum)`` over pure inputs of ``channel``.

    ``objective`` receives an array of spectra, one per row, and returns one value per row.
    """
    return _search_channel(channel, objective, cfg)


def max_trace(f: ConvexFunction, channel: Channel, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise Tr f(channel(psi)) over pure inputs of a single channel."""
    return _search_channel(channel, spectrum_objective(f), cfg)


def _with_schmidt(res: OptResult, pair: ChannelPair) -> OptResult:
    res.schmidt = schmidt_probabilities(res.argmax, pair.left.dim_in, pair.right.dim_in)
    return res


def max_trace_entangled(f: ConvexFunction, pair: ChannelPair, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise Tr f(Phi (x) Omega(psi)) over all pure joint inputs."""
    return _with_schmidt(max_trace(f, pair.joint, cfg), pair)


def max_output_eigenvalue(target, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise the largest output eigenvalue over pure inputs of a channel or channel pair."""
    if isinstance(target, ChannelPair):
        return _with_schmidt(_search_channel(target.joint, _largest, cfg), target)
    return _search_channel(target, _largest, cfg)


def _basis_state(d):
    e = np.zeros(d, dtype=complex)
    e[0] = 1.0
    return e


def _product_search(objective, pair: ChannelPair, cfg: OptimizerConfig, rng):
    left, right = pair.left, pair.right
    outputs = {id(left): left.pure_output_fn(), id(right): right.pure_output_fn()}

    def spec_of(ch, psi):
        return np.linalg.eigvalsh(outputs[id(ch)](psi))

    def joint_value(s1, s2):
        return float(objective(np.sort(np.outer(s1, s2).ravel())))

    psi1 = random_pure_state(left.dim_in, rng)
    psi2 = random_pure_state(right.dim_in, rng)
    s1, s2 = spec_of(left, psi1), spec_of(right, psi2)
    value = joint_value(s1, s2)
    conv = False
    for _ in range(PRODUCT_ROUNDS):
        prev = value
        c1 = c2 = True
        if left.dim_in > 1:
            fixed = s2
            _, psi1, c1 = _polished_search(lambda p: joint_value(spec_of(left, p), fixed), psi1, cfg)
            s1 = spec_of(left, psi1)
        if right.dim_in > 1:
            fixed = s1
            _, psi2, c2 = _polished_search(lambda p: joint_value(fixed, spec_of(right, p)), psi2, cfg)
            s2 = spec_of(right, psi2)
        value = joint_value(s1, s2)
        if c1 and c2 and value - prev <= cfg.tol:
            conv = True
            break
    return value, np.kron(psi1, psi2), conv


def _product_max(objective, pair: ChannelPair, cfg: OptimizerConfig) -> OptResult:
    if pair.covariant(seed=cfg.seed):
        psi = np.kron(_basis_state(pair.left.dim_in), _basis_state(pair.right.dim_in))
        value = float(objective(np.linalg.eigvalsh(pair.joint.pure_output_fn()(psi))))
        schmidt = tuple([1.0] + [0.0] * (min(pair.left.dim_in, pair.right.dim_in) - 1))
        return OptResult(value, psi, schmidt, cfg.restarts, True, True, [value])
    (value, psi, conv), agreeing, values = _reduce(
        _run_restarts(lambda rng: _product_search(objective, pair, cfg, rng), cfg)
    )
    return _with_schmidt(OptResult(value, psi, None, agreeing, conv, False, values), pair)


def max_trace_product(f: ConvexFunction, pair: ChannelPair, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise Tr f(Phi(psi1) (x) Omega(psi2)) over pure product inputs.

    For pairs whose channels pass the unitary covariance check the objective
    is the same for every product input, so a single evaluation is exact
    (``exact=True``). Otherwise block coordinate ascent alternates between
    the two factors.
    """
    return _product_max(spectrum_objective(f), pair, cfg)


def max_output_eigenvalue_product(pair: ChannelPair, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Largest output eigenvalue over pure product inputs."""
    return _product_max(_largest, pair, cfg)


def simplex_grid(n: int) -> np.ndarray:
    """All points (i, j, n-i-j)/n of the 2-simplex, lexicographically descending."""
    pts = [(i, j, n - i - j) for i in range(n, -1, -1) for j in range(n - i, -1, -1)]
    return np.asarray(pts, dtype=float) / n


def _project_simplex(p):
    # rows (l1, l2); l3 = 1 - l1 - l2, clipped onto the simplex
    p = np.asarray(p, dtype=float)
    v = np.stack([p[..., 0], p[..., 1], 1.0 - p[..., 0] - p[..., 1]], axis=-1).clip(0.0, None)
    return v / v.sum(axis=-1, keepdims=True)


def max_trace_schmidt_wh3(f: ConvexFunction, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Maximise Tr f over the Schmidt simplex of Phi_3 (x) Phi_3, using the closed-form spectra.

    A full grid scan with ``cfg.simplex_grid`` steps per edge is followed by a
    Nelder-Mead refinement from the best grid point. Ties go to the
    lexicographically largest Schmidt vector.
    """
    pts = simplex_grid(cfg.simplex_grid)
    vals = trace_apply_spectra(f, wh3_pair_eigenvalues(pts))
    top = vals.max()
    k = int(np.flatnonzero(vals >= top - 1e-12 * max(1.0, abs(top)))[0])
    best_s, best_v = pts[k], float(vals[k])

    def neg_values(points):
        return -trace_apply_spectra(f, wh3_pair_eigenvalues(_project_simplex(points)))

    search = _nelder_mead(best_s[:2].copy(), cfg, step=0.5 / cfg.simplex_grid)
    x, fun, ok = _drive([search], neg_values)[0]
    if -fun > best_v + 1e-12 * max(1.0, abs(best_v)):
        best_s, best_v = _project_simplex(x), float(-fun)
    return OptResult(best_v, schmidt_state(best_s), tuple(float(v) for v in best_s), 1, bool(ok), False, [])


def with_overrides(cfg: OptimizerConfig, **kw) -> OptimizerConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
