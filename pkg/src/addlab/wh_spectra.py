"""Closed-form output spectra of Werner-Holevo channel pairs.

For ``Phi_3 (x) Phi_3`` acting on a pure input with Schmidt coefficients
``(l1, l2, l3)`` the nine output eigenvalues are

* six values ``e_ab = (1 - l_a - l_b) / 4`` over ordered pairs ``a != b``;
* three values ``G_a = cos^2(theta/6 - 2 pi (a-1)/6) / 3``, where ``theta``
  depends only on ``t = l1 l2 l3``.

The product-input and maximally-entangled spectra are given for every ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

T_MAX = 1.0 / 27.0
T_CLAMP_ATOL = 1e-14
SCHMIDT_ATOL = 1e-12

_PAIRS = [(a, b) for a in range(3) for b in range(3) if a != b]


def theta_of_t(t):
    """Angle in [0, pi] with tan(theta) = sqrt(t (1/27 - t)) / (t - 1/54).

    Uses the two-argument arctangent, so ``theta(0) = pi``, ``theta(1/54) = pi/2``
    and ``theta(1/27) = 0``. Accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < -T_CLAMP_ATOL) or np.any(t > T_MAX + T_CLAMP_ATOL):
        raise ValueError("t must lie in [0, 1/27]")
    t = np.clip(t, 0.0, T_MAX)
    out = np.arctan2(np.sqrt(t * (T_MAX - t)), t - 1.0 / 54.0)
    return float(out) if out.ndim == 0 else out


def g_values(theta):
    """The three theta-dependent eigenvalues, stacked on a trailing axis of length 3."""
    theta = np.asarray(theta, dtype=float)
    shifts = 2.0 * np.pi * np.arange(3) / 6.0
    return np.cos(theta[..., None] / 6.0 - shifts) ** 2 / 3.0


def check_schmidt(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != 3:
        raise ValueError("Schmidt vector must have three entries")
    if np.any(s < -SCHMIDT_ATOL) or np.any(s > 1 + SCHMIDT_ATOL) or np.any(np.abs(s.sum(-1) - 1) > SCHMIDT_ATOL):
        raise ValueError(f"not a probability vector: {s}")
    return np.clip(s, 0.0, 1.0)


@dataclass(frozen=True)
class WHSpectrum:
    e_values: tuple
    g_values: tuple
    t: float
    theta: float

    @property
    def values(self) -> np.ndarray:
        """All nine eigenvalues, sorted descending."""
        return np.sort(np.concatenate([self.e_values, self.g_values]))[::-1]


def wh3_pair_spectrum(s) -> WHSpectrum:
    """Output spectrum of Phi_3 (x) Phi_3 for an input with Schmidt coefficients ``s``."""
    s = check_schmidt(s)
    e = tuple(float((1.0 - s[a] - s[b]) / 4.0) for a, b in _PAIRS)
    t = float(min(max(s[0] * s[1] * s[2], 0.0), T_MAX))
    th = theta_of_t(t)
    return WHSpectrum(e, tuple(float(g) for g in g_values(th)), t, th)


def wh3_pair_eigenvalues(s) -> np.ndarray:
    """Vectorised form of :func:`wh3_pair_spectrum`: ``(..., 3) -> (..., 9)`` (e-values first, unsorted)."""
    s = np.asarray(s, dtype=float)
    a = np.array([p[0] for p in _PAIRS])
    b = np.array([p[1] for p in _PAIRS])
    e = (1.0 - s[..., a] - s[..., b]) / 4.0
    t = np.clip(np.prod(s, axis=-1), 0.0, T_MAX)
    th = np.arctan2(np.sqrt(t * (T_MAX - t)), t - 1.0 / 54.0)
    return np.concatenate([e, g_values(th)], axis=-1)


def _check_d(d):
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")


def wh_product_spectrum(d: int) -> np.ndarray:
    """Spectrum of Phi_d (x) Phi_d on any pure product input, sorted descending."""
    _check_d(d)
    k = (d - 1) ** 2
    return np.concatenate([np.full(k, 1.0 / k), np.zeros(2 * d - 1)])


def wh_maxent_spectrum(d: int) -> np.ndarray:
    """Spectrum of Phi_d (x) Phi_d on the maximally entangled input, sorted descending."""
    _check_d(d)
    k = (d - 1) ** 2
    return np.concatenate([[(2.0 - 2.0 / d) / k], np.full(d * d - 1, (1.0 - 2.0 / d) / k)])


def schmidt_state(s, d: int | None = None) -> np.ndarray:
    """The pure state sum_i sqrt(s_i) |ii> on C^d (x) C^d."""
    s = np.asarray(s, dtype=float)
    d = len(s) if d is None else d
    psi = np.zeros(d * d, dtype=complex)
    for i, v in enumerate(s):
        psi[i * d + i] = np.sqrt(max(v, 0.0))
    return psi / np.linalg.norm(psi)
