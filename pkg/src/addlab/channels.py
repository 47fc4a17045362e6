"""Quantum channels as linear maps on (stacks of) matrices.

Every channel implements ``map``, a linear action on arrays of shape
``(..., dim_in, dim_in)``. Named channels (identity, Werner-Holevo,
maximally depolarizing) evaluate by their closed formulas; Kraus and
superoperator channels carry explicit matrices. ``apply`` is the validated
entry point for density matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .linalg import (
    as_hermitian,
    as_matrix,
    check_density,
    haar_unitary,
    matrix_from_dict,
    matrix_to_dict,
    projector,
    random_pure_state,
)

TRACE_DRIFT_ATOL = 1e-8
CPTP_ATOL = 1e-9
COVARIANCE_ATOL = 1e-7


def _trace(x):
    return np.einsum("...ii->...", x)


class Channel:
    """Base class: a linear map from ``dim_in x dim_in`` to ``dim_out x dim_out`` matrices."""

    dim_in: int
    dim_out: int

    def map(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        return repr(self)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __matmul__(self, other: "Channel") -> "TensorChannel":
        return tensor(self, other)

    @cached_property
    def choi(self) -> np.ndarray:
        """Unnormalised Choi matrix ``sum_ij |i><j| (x) map(|i><j|)``."""
        n = self.dim_in
        units = np.zeros((n, n, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                units[i, j, i, j] = 1.0
        out = self.map(units)
        return out.transpose(0, 2, 1, 3).reshape(n * self.dim_out, n * self.dim_out)

    @cached_property
    def superoperator(self) -> np.ndarray:
        """``dim_out^2 x dim_in^2`` matrix acting on row-major vectorised inputs."""
        n = self.dim_in
        units = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
        return self.map(units).reshape(n * n, -1).T.copy()

    def pure_output_fn(self, max_entries: int = 1 << 20):
        """Fast evaluator ``psi -> map(|psi><psi|)`` for optimizer inner loops.

        ``psi`` may be one state of shape ``(n,)`` or a stack ``(k, n)``; each
        output is computed on its own, so a state gives bit-identical results
        alone or inside any stack. Small channels use the cached
        superoperator; the result agrees with ``map`` to rounding.
        """
        n, m = self.dim_in, self.dim_out
        if (n * m) ** 2 > max_entries:
            return lambda psi: self.map(psi[..., :, None] * psi.conj()[..., None, :])
        s = self.superoperator

        def out(psi):
            lead = psi.shape[:-1]
            vec = (psi[..., :, None] * psi.conj()[..., None, :]).reshape(*lead, n * n, 1)
            return np.matmul(s, vec).reshape(*lead, m, m)

        return out

    def kraus(self) -> list[np.ndarray]:
        """Kraus operators from the eigendecomposition of the Choi matrix."""
        w, v = np.linalg.eigh(as_hermitian(self.choi, atol=1e-8))
        ops = []
        for lam, vec in zip(w, v.T):
            if lam > 1e-12:
                ops.append(np.sqrt(lam) * vec.reshape(self.dim_in, self.dim_out).T)
        return ops


@dataclass(frozen=True)
class IdentityChannel(Channel):
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def dim_in(self):
        return self.d

    @property
    def dim_out(self):
        return self.d

    @property
    def spec(self):
        return f"id:{self.d}"

    def map(self, x):
        return np.asarray(x, dtype=complex)


@dataclass(frozen=True)
class WernerHolevo(Channel):
    """rho -> (Tr(rho) 1 - rho^T) / (d - 1)."""

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"Werner-Holevo channel needs d >= 2, got {self.d}")

    @property
    def dim_in(self):
        return self.d

    @property
    def dim_out(self):
        return self.d

    @property
    def spec(self):
        return f"wh:{self.d}"

    def map(self, x):
        x = np.asarray(x, dtype=complex)
        eye = np.eye(self.d)
        return (_trace(x)[..., None, None] * eye - np.swapaxes(x, -1, -2)) / (self.d - 1)


@dataclass(frozen=True, eq=False)
class Depolarizing(Channel):
    """Maximally depolarizing channel A -> Tr(A) sigma (constant output)."""

    sigma: np.ndarray
    d_in: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigma", check_density(self.sigma))

    @property
    def dim_in(self):
        return self.sigma.shape[0] if self.d_in is None else self.d_in

    @property
    def dim_out(self):
        return self.sigma.shape[0]

    @property
    def spec(self):
        n = self.sigma.shape[0]
        if np.allclose(self.sigma, np.eye(n) / n, atol=1e-14):
            return f"depol:{n}" if self.d_in is None else f"depol:{n}:{self.d_in}"
        return "depol:<sigma>"

    def map(self, x):
        x = np.asarray(x, dtype=complex)
        return _trace(x)[..., None, None] * self.sigma


@dataclass(frozen=True, eq=False)
class KrausChannel(Channel):
    ops: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.ops)
        if not ops:
            raise ValueError("need at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must share one shape")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "_stack", np.stack(ops))

    @property
    def dim_in(self):
        return self.ops[0].shape[1]

    @property
    def dim_out(self):
        return self.ops[0].shape[0]

    @property
    def spec(self):
        return f"kraus[{len(self.ops)}]:{self.dim_in}->{self.dim_out}"

    def map(self, x):
        k = self._stack
        return np.einsum("kab,...bc,kdc->...ad", k, np.asarray(x, dtype=complex), k.conj())

    def kraus(self):
        return list(self.ops)

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.ops)
        return float(np.abs(s - np.eye(self.dim_in)).max())


@dataclass(frozen=True, eq=False)
class SuperoperatorChannel(Channel):
    """Channel given by a ``dim_out^2 x dim_in^2`` matrix on row-major vectorised inputs."""

    matrix: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.d_out**2, self.d_in**2):
            raise ValueError(f"superoperator shape {m.shape} does not match dims {self.d_in}->{self.d_out}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim_in(self):
        return self.d_in

    @property
    def dim_out(self):
        return self.d_out

    @property
    def spec(self):
        return f"superop:{self.d_in}->{self.d_out}"

    def map(self, x):
        x = np.asarray(x, dtype=complex)
        lead = x.shape[:-2]
        y = x.reshape(*lead, self.d_in**2) @ self.matrix.T
        return y.reshape(*lead, self.d_out, self.d_out)


@dataclass(frozen=True)
class TransposeMap(Channel):
    """rho -> rho^T. Positive and trace preserving but not completely positive."""

    d: int

    @property
    def dim_in(self):
        return self.d

    @property
    def dim_out(self):
        return self.d

    @property
    def spec(self):
        return f"transpose:{self.d}"

    def map(self, x):
        return np.swapaxes(np.asarray(x, dtype=complex), -1, -2)


@dataclass(frozen=True, eq=False)
class TensorChannel(Channel):
    left: Channel
    right: Channel

    @property
    def dim_in(self):
        return self.left.dim_in * self.right.dim_in

    @property
    def dim_out(self):
        return self.left.dim_out * self.right.dim_out

    @property
    def spec(self):
        return f"({self.left.spec})x({self.right.spec})"

    def map(self, x):
        x = np.asarray(x, dtype=complex)
        a, b = self.left.dim_in, self.right.dim_in
        lead = x.shape[:-2]
        r = x.reshape(*lead, a, b, a, b)
        # axes (..., i, k, j, l): act on (i, j) with left, then on (k, l) with right
        y = self.left.map(np.moveaxis(r, (-4, -2), (-2, -1)))
        z = self.right.map(np.moveaxis(y, (-4, -3), (-2, -1)))
        z = np.swapaxes(z, -3, -2)
        n = self.dim_out
        return z.reshape(*lead, n, n)


def identity(d: int) -> IdentityChannel:
    return IdentityChannel(d)


def werner_holevo(d: int) -> WernerHolevo:
    return WernerHolevo(d)


def depolarizing(sigma=None, d: int | None = None, d_in: int | None = None) -> Depolarizing:
    """Constant-output channel ``A -> Tr(A) sigma``; ``sigma`` defaults to ``1/d``."""
    if sigma is None:
        if d is None:
            raise ValueError("give sigma or d")
        sigma = np.eye(d) / d
    return Depolarizing(np.asarray(sigma, dtype=complex), d_in)


def tensor(a: Channel, b: Channel) -> TensorChannel:
    return TensorChannel(a, b)


def apply(ch: Channel, rho) -> np.ndarray:
    """Apply a channel to a density matrix, checking dimensions and trace preservation."""
    rho = check_density(rho)
    if rho.shape[0] != ch.dim_in:
        raise ValueError(f"input dimension {rho.shape[0]} != channel dim_in {ch.dim_in}")
    out = ch.map(rho)
    drift = abs(np.trace(out).real - 1.0)
    if drift > TRACE_DRIFT_ATOL:
        raise ValueError(f"channel output has trace drift {drift:.3g}; not trace preserving")
    return 0.5 * (out + out.conj().T)


def apply_pure(ch: Channel, psi) -> np.ndarray:
    """Unchecked fast path: output for the pure input ``|psi><psi|`` (``psi`` may be batched)."""
    psi = np.asarray(psi, dtype=complex)
    return ch.map(psi[..., :, None] * psi[..., None, :].conj())


@dataclass(frozen=True)
class CPTPReport:
    trace_preserving: bool
    completely_positive: bool
    max_violation: float
    choi_min_eigenvalue: float
    trace_error: float


def check_cptp(ch: Channel, atol: float = CPTP_ATOL) -> CPTPReport:
    """Check complete positivity and trace preservation via the Choi matrix."""
    choi = ch.choi
    herm = float(np.abs(choi - choi.conj().T).max())
    w_min = float(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))[0])
    n_in, n_out = ch.dim_in, ch.dim_out
    reduced = np.einsum("ikjk->ij", choi.reshape(n_in, n_out, n_in, n_out))
    tp_err = float(np.abs(reduced - np.eye(n_in)).max())
    cp = w_min >= -atol and herm <= atol
    return CPTPReport(
        trace_preserving=tp_err <= atol,
        completely_positive=cp,
        max_violation=max(0.0, -w_min, tp_err, herm),
        choi_min_eigenvalue=w_min,
        trace_error=tp_err,
    )


def _out_spectrum(ch: Channel, psi) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(as_hermitian(apply_pure(ch, psi), atol=1e-8)))


def check_unitary_covariance(
    ch: Channel, samples: int = 20, seed: int = 0, atol: float = COVARIANCE_ATOL
) -> bool:
    """Sampled test that output spectra are invariant under input conjugation by unitaries.

    For ``samples`` Haar unitaries and ``samples`` random pure states, compares
    the sorted output spectra of ``psi`` and ``U psi``.
    """
    rng = np.random.default_rng(seed)
    states = [random_pure_state(ch.dim_in, rng) for _ in range(samples)]
    base = [_out_spectrum(ch, psi) for psi in states]
    for _ in range(samples):
        u = haar_unitary(ch.dim_in, rng)
        for psi, ref in zip(states, base):
            if np.abs(_out_spectrum(ch, u @ psi) - ref).max() > atol:
                return False
    return True


@dataclass(frozen=True)
class ChannelPair:
    left: Channel
    right: Channel
    _covariant: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def spec(self) -> str:
        return f"{self.left.spec},{self.right.spec}"

    @cached_property
    def joint(self) -> TensorChannel:
        return tensor(self.left, self.right)

    @property
    def is_wh3_pair(self) -> bool:
        return all(isinstance(c, WernerHolevo) and c.d == 3 for c in (self.left, self.right))

    def covariant(self, samples: int = 20, seed: int = 0) -> bool:
        """True if both constituents pass :func:`check_unitary_covariance`."""
        key = (samples, seed)
        if key not in self._covariant:
            self._covariant[key] = all(
                check_unitary_covariance(c, samples, seed) for c in (self.left, self.right)
            )
        return self._covariant[key]


def channel_to_dict(ch: Channel) -> dict:
    ops = ch.kraus()
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [matrix_to_dict(k) for k in ops],
    }


def channel_from_dict(d: dict) -> KrausChannel:
    n_in, n_out = int(d["dim_in"]), int(d["dim_out"])
    ops = [matrix_from_dict(k, shape=(n_out, n_in)) for k in d["kraus"]]
    ch = KrausChannel(tuple(ops))
    err = ch.completeness_error()
    if err > CPTP_ATOL:
        raise ValueError(f"Kraus operators are not trace preserving (completeness error {err:.3g})")
    return ch


def load_kraus_file(path) -> KrausChannel:
    with open(path) as fh:
        return channel_from_dict(json.load(fh))


def save_kraus_file(ch: Channel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=1))


def parse_channel(spec: str) -> Channel:
    """Parse a channel spec: ``wh:d``, ``id:d``, ``depol:d``, ``depol:d:d_in``,
    ``pure:d`` (A -> Tr(A)|0><0|), ``transpose:d`` or ``@path/to/kraus.json``."""
    spec = spec.strip()
    if spec.startswith("@"):
        return load_kraus_file(spec[1:])
    name, _, rest = spec.partition(":")
    try:
        args = [int(a) for a in rest.split(":")] if rest else []
    except ValueError:
        raise ValueError(f"bad channel spec {spec!r}") from None
    if name == "wh" and len(args) == 1:
        return werner_holevo(args[0])
    if name == "id" and len(args) == 1:
        return identity(args[0])
    if name == "depol" and len(args) in (1, 2):
        return depolarizing(d=args[0], d_in=args[1] if len(args) == 2 else None)
    if name == "pure" and len(args) == 1:
        sigma = np.zeros((args[0], args[0]))
        sigma[0, 0] = 1.0
        return depolarizing(sigma)
    if name == "transpose" and len(args) == 1:
        return TransposeMap(args[0])
    raise ValueError(f"bad channel spec {spec!r}")


def parse_pair(spec: str) -> ChannelPair:
    parts = spec.split(",")
    if len(parts) != 2:
        raise ValueError(f"channel pair spec needs two comma-separated channels, got {spec!r}")
    return ChannelPair(parse_channel(parts[0]), parse_channel(parts[1]))


def amplitude_damping(gamma: float) -> KrausChannel:
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel((k0, k1))


__all__ = [
    "Channel",
    "ChannelPair",
    "CPTPReport",
    "Depolarizing",
    "IdentityChannel",
    "KrausChannel",
    "SuperoperatorChannel",
    "TensorChannel",
    "TransposeMap",
    "WernerHolevo",
    "amplitude_damping",
    "apply",
    "apply_pure",
    "channel_from_dict",
    "channel_to_dict",
    "check_cptp",
    "check_unitary_covariance",
    "depolarizing",
    "identity",
    "load_kraus_file",
    "parse_channel",
    "parse_pair",
    "projector",
    "save_kraus_file",
    "tensor",
    "werner_holevo",
]
