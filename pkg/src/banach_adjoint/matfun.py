"""Dense matrix functions: W-frame square roots, exponential, resolvent,
pseudo-inverse and induced operator norms between rigging spaces."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ._random import make_rng

__all__ = [
    "MatFunError", "Spectrum", "OpNorm", "spectrum", "weight_frame",
    "psd_like_function", "sqrt_psd_like", "inv_sqrt_psd_like", "expm",
    "expm_eig", "resolvent", "pinv", "opnorm", "induced_norm",
]

_POWER_RESTARTS = 32
_POWER_ITERS = 100


class MatFunError(ArithmeticError):
    """A matrix function could not be evaluated; ``defect`` says by how much."""

    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    basis: np.ndarray
    diagonalizable: bool


def spectrum(M, cond_max=1e12):
    """Eigen-decomposition; ``diagonalizable`` if the basis is well conditioned."""
    M = np.asarray(M, dtype=float)
    lam, V = np.linalg.eig(M)
    ok = bool(np.isfinite(np.linalg.cond(V)) and np.linalg.cond(V) <= cond_max)
    return Spectrum(lam, V, ok)


def weight_frame(W):
    """Return ``(W^{1/2}, W^{-1/2})`` for SPD `W` (identity when None)."""
    if W is None:
        return None, None
    W = np.asarray(W, dtype=float)
    if not np.any(W - np.diag(np.diag(W))):
        d = np.sqrt(np.diag(W))
        return np.diag(d), np.diag(1.0 / d)
    w, V = np.linalg.eigh(W)
    if w[0] <= 0:
        raise MatFunError("weight matrix is not positive definite", w[0])
    s = np.sqrt(w)
    return (V * s) @ V.T, (V / s) @ V.T


def _to_frame(M, Wh, Whi):
    if Wh is None:
        return M
    return Wh @ M @ Whi


def _from_frame(M, Wh, Whi):
    if Wh is None:
        return M
    return Whi @ M @ Wh


def psd_like_function(M, W, func, allow_zero=True):
    """Apply `func` to the spectrum of `M`, where ``W^{1/2} M W^{-1/2}`` is
    symmetric positive semidefinite.

    Eigenvalues below ``1e-12 * lambda_max`` are set to zero. Raises
    :class:`MatFunError` if the symmetrized frame is not symmetric to 1e-8
    or has eigenvalues below ``-1e-8 * max(1, lambda_max)``.
    """
    M = np.asarray(M, dtype=float)
    Wh, Whi = weight_frame(W)
    Ms = _to_frame(M, Wh, Whi)
    scale = np.linalg.norm(Ms)
    defect = np.linalg.norm(Ms - Ms.T)
    if defect > 1e-8 * max(scale, np.finfo(float).tiny):
        raise MatFunError(
            f"matrix is not self-adjoint in the given frame (defect {defect:.3e})",
            defect)
    lam, V = np.linalg.eigh(0.5 * (Ms + Ms.T))
    lmax = max(abs(lam[-1]), abs(lam[0])) if lam.size else 0.0
    if lam.size and lam[0] < -1e-8 * max(1.0, lmax):
        raise MatFunError(f"negative eigenvalue {lam[0]:.3e}", -lam[0])
    lam = np.where(lam < 1e-12 * lmax, 0.0, lam)
    if not allow_zero and np.any(lam == 0):
        raise MatFunError("singular matrix where a positive spectrum is required")
    F = (V * func(lam)) @ V.T
    return _from_frame(F, Wh, Whi)


def sqrt_psd_like(M, W=None):
    """Principal square root of `M`, self-adjoint and PSD in the W frame.

    >>> sqrt_psd_like(np.diag([0.0, 0.5]))
    array([[0.        , 0.        ],
           [0.        , 0.70710678]])
    """
    return psd_like_function(M, W, np.sqrt)


def inv_sqrt_psd_like(M, W=None):
    return psd_like_function(M, W, lambda lam: 1.0 / np.sqrt(lam), allow_zero=False)


def expm(M, t=1.0):
    """``exp(t M)`` by scaling and squaring with Padé approximants."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise MatFunError("non-finite matrix entries")
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = scipy.linalg.expm(t * M)
        except FloatingPointError:
            raise MatFunError(f"exp(tM) overflows at t={t}") from None
    if not np.all(np.isfinite(E)):
        raise MatFunError(f"exp(tM) overflows at t={t}")
    return E


def expm_eig(M, t=1.0):
    """``exp(t M)`` through the eigendecomposition (an independent oracle)."""
    sp = spectrum(M)
    if not sp.diagonalizable:
        raise MatFunError("matrix is not (numerically) diagonalizable")
    V = sp.basis
    E = (V * np.exp(t * sp.eigenvalues)) @ np.linalg.inv(V)
    return E.real if np.isrealobj(M) else E


def resolvent(M, lam):
    """``(lam I - M)^{-1}``."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    A = lam * np.eye(n) - M
    try:
        R = np.linalg.solve(A, np.eye(n))
    except np.linalg.LinAlgError:
        raise MatFunError(f"lambda={lam} is an eigenvalue of M") from None
    res = np.linalg.norm(A @ R - np.eye(n))
    if not np.isfinite(res) or res > 1e-10 * n:
        raise MatFunError(f"resolvent at lambda={lam} is numerically singular "
                          f"(residual {res:.3e})", res)
    return R


def pinv(M, rtol=1e-12):
    """Moore-Penrose inverse; singular values below ``rtol * s_max`` dropped."""
    M = np.asarray(M, dtype=float)
    U, s, Vt = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0:
        return np.zeros(M.T.shape)
    keep = s > rtol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vt.T * inv) @ U.T


class OpNorm(NamedTuple):
    value: float
    exact: bool

    def __float__(self):
        return float(self.value)


def _power_estimate(M, nf, nt, n, extra_starts=(), seed=0):
    """Boyd-type power iteration for ``sup ‖Mx‖_to / ‖x‖_from``.

    Every iterate gives an attained ratio, so the result is a lower bound.
    """
    rng = make_rng(seed)
    starts = list(extra_starts) + list(np.eye(n)) \
        + list(rng.standard_normal((_POWER_RESTARTS, n)))
    best = 0.0
    for x in starts:
        x = np.asarray(x, dtype=float)
        nx = nf(x)
        if nx == 0:
            continue
        x = x / nx
        for _ in range(_POWER_ITERS):
            y = M @ x
            val = float(nt(y) / nf(x))
            best = max(best, val)
            if val == 0:
                break
            g = M.T @ nt.norming_functional(y)
            xn = nf.maximizer(g)
            if g @ xn <= (g @ x) * (1 + 1e-13):
                break
            x = xn
    return best


def induced_norm(M, nf, nt, extra_starts=()):
    """Induced norm of `M` from norm object `nf` to `nt`."""
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    if not np.any(M):
        return OpNorm(0.0, True)
    hf, ht = nf.as_hilbert(n), nt.as_hilbert(M.shape[0])
    if hf is not None and ht is not None:
        Th, _ = weight_frame(ht.W)
        _, Fhi = weight_frame(hf.W)
        return OpNorm(float(np.linalg.norm(Th @ M @ Fhi, 2)), True)
    if not nf.is_hilbert and nf.p == 1:
        d = nf.scales(n)
        return OpNorm(float(np.max(nt(M) / d)), True)
    if not nt.is_hilbert and nt.p == math.inf:
        d = nt.scales(M.shape[0])
        rows = (d[:, None] * M).T
        return OpNorm(float(np.max(nf.dual(rows))), True)
    return OpNorm(_power_estimate(M, nf, nt, n, extra_starts), False)


def opnorm(M, src="B", dst="B", r=None, extra_starts=()):
    """Induced norm of `M` from space `src` to `dst` of rigging `r`.

    Exact for l^1, l^inf, l^2 and weighted-2 pairs; otherwise a lower-bound
    estimate with ``exact=False``.
    """
    if r is None:
        raise ValueError("opnorm needs the rigging that defines the spaces")
    return induced_norm(M, r.space(src), r.space(dst), extra_starts)
