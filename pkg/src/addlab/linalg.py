"""Dense complex linear algebra for small Hermitian problems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
cover what the channel and optimizer modules need: Kronecker products,
partial traces, a cyclic Jacobi eigensolver for complex Hermitian matrices,
spectral calculus, Haar sampling and a JSON matrix encoding.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-10
DENSITY_ATOL = 1e-9
CLAMP_ATOL = 1e-9

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweep cap is hit before the off-diagonal mass vanishes."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(m)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.abs(a - a.conj().T).max() <= atol)


def as_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``m`` as Hermitian and return its exactly symmetrised copy."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got {a.shape}")
    err = np.abs(a - a.conj().T).max()
    if err > atol:
        raise ValueError(f"matrix is not Hermitian (max deviation {err:.3g})")
    return 0.5 * (a + a.conj().T)


def check_density(m, atol: float = DENSITY_ATOL) -> np.ndarray:
    """Return ``m`` as a density matrix or raise ``ValueError``.

    Requires Hermiticity, unit trace and eigenvalues no smaller than ``-atol``.
    """
    a = as_hermitian(m)
    tr = np.trace(a).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(a)[0]
    if lo < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: str = "left") -> np.ndarray:
    """Trace out one factor of a bipartite operator on C^d1 (x) C^d2.

    ``keep="left"`` returns the operator on the first factor, ``keep="right"``
    the one on the second.
    """
    d1, d2 = dims
    a = as_matrix(m)
    if a.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"matrix of shape {a.shape} does not match dims {dims}")
    t = a.reshape(d1, d2, d1, d2)
    if keep == "left":
        return np.einsum("ikjk->ij", t)
    if keep == "right":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'left' or 'right', not {keep!r}")


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    # 2x2 unitary U with U^dag [[app, apq], [conj(apq), aqq]] U diagonal.
    r = abs(apq)
    phase = apq / r
    tau = (aqq - app) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])


def _off_norm(a) -> float:
    # Frobenius norm of the off-diagonal part, summed directly to avoid cancellation
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues in ascending order and matching
    eigenvector columns, mirroring :func:`numpy.linalg.eigh`.
    """
    a = as_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                u = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ u
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        off = _off_norm(a)
        if off > tol * scale:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3g})")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian(m, method: str = "jacobi"):
    """Eigendecomposition ``m = U diag(w) U^dag`` with ``w`` sorted descending.

    ``method="jacobi"`` uses :func:`jacobi_eigh`; ``method="lapack"`` defers to
    ``numpy.linalg.eigh``.
    """
    if method == "jacobi":
        w, v = jacobi_eigh(m)
    elif method == "lapack":
        w, v = np.linalg.eigh(as_hermitian(m))
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvals_hermitian(m, method: str = "lapack") -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted descending."""
    if method == "lapack":
        return np.linalg.eigvalsh(as_hermitian(m))[::-1].copy()
    return eig_hermitian(m, method)[0]


def clamp_spectrum(w, lo: float = 0.0, hi: float = 1.0, atol: float = CLAMP_ATOL) -> np.ndarray:
    """Clip eigenvalues into ``[lo, hi]`` if they overshoot by at most ``atol``."""
    w = np.asarray(w, dtype=float)
    if w.size and (w.min() < lo - atol or w.max() > hi + atol):
        raise ValueError(
            f"eigenvalues [{w.min():.3g}, {w.max():.3g}] fall outside [{lo}, {hi}] beyond tolerance {atol}"
        )
    return np.clip(w, lo, hi)


def spectral_apply(f, m, domain: tuple[float, float] | None = None, method: str = "jacobi") -> np.ndarray:
    """Spectral calculus: ``U diag(f(w)) U^dag`` for ``m = U diag(w) U^dag``.

    If ``domain`` is given, eigenvalues are clamped into it (see
    :func:`clamp_spectrum`) before ``f`` is applied.
    """
    w, u = eig_hermitian(m, method)
    if domain is not None:
        w = clamp_spectrum(w, *domain)
    fw = np.asarray([f(x) for x in w], dtype=float)
    return (u * fw) @ u.conj().T


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary (QR of a Ginibre matrix with phase fixing)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Ginibre) measure."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def matrix_to_dict(m) -> dict:
    """Encode a matrix as ``{"dim", "re", "im"}`` with row-major flat entries.

    Non-square matrices additionally carry ``rows`` and ``cols``.
    """
    a = as_matrix(m)
    out: dict = {"dim": int(a.shape[0])}
    if a.shape[0] != a.shape[1]:
        out["rows"], out["cols"] = int(a.shape[0]), int(a.shape[1])
    out["re"] = a.real.ravel().tolist()
    out["im"] = a.imag.ravel().tolist()
    return out


def matrix_from_dict(d: dict, shape: tuple[int, int] | None = None) -> np.ndarray:
    if shape is None:
        shape = (d.get("rows", d["dim"]), d.get("cols", d["dim"]))
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    if re.size != shape[0] * shape[1] or im.size != re.size:
        raise ValueError(f"matrix entries do not match shape {shape}")
    return as_matrix((re + 1j * im).reshape(shape))
