"""Finite-dimensional Gross-Kuelbs riggings ``H1 ⊆ B ⊆ H2``.

A rigging on ``R^n`` consists of a Banach norm ``‖·‖_B`` together with two
weighted Euclidean inner products

    (x, y)_2 = x^T W2 y,        (x, y)_1 = x^T W1 y,   W1 = W2 T12^{-1},

normalized so that ``‖x‖_{H2} <= ‖x‖_B <= ‖x‖_{H1}`` for every ``x``, each
inequality attained by some vector. Functionals act through the coordinate
pairing ``<x, f> = sum_i x_i f_i``.
"""

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize

from ._random import make_rng
from .report import PropertyReport

__all__ = [
    "RiggingError", "BanachNorm", "HilbertNorm", "Rigging", "Functional",
    "make_rigging", "identity_rigging", "wiener_rigging",
    "random_diagonal_rigging", "norm", "pairing", "j_map", "j_inverse",
    "special_duality", "check_embedding", "embedding_constants",
]

SPACES = ("B", "H1", "H2", "B-dual")

# enumerate sign vectors exactly up to this dimension
_MAX_SIGN_ENUM = 20
_RESTARTS = 64


class RiggingError(ValueError):
    """Invalid rigging input (shape, positivity, commutation)."""


def _dual_exponent(p):
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def _pnorm(y, p):
    """Plain p-norm along axis 0."""
    a = np.abs(y)
    if p == 1:
        return a.sum(axis=0)
    if p == math.inf:
        return a.max(axis=0, initial=0.0)
    m = a.max(axis=0, initial=0.0)
    safe = np.where(m > 0, m, 1.0)
    b = a / safe
    if p == 2:
        return m * np.sqrt((b * b).sum(axis=0))
    return m * (b ** p).sum(axis=0) ** (1.0 / p)


def _norming(y, p):
    """Unit vector g of the dual p-norm with ``<y, g> = ‖y‖_p``."""
    y = np.asarray(y, dtype=float)
    g = np.zeros_like(y)
    if not np.any(y):
        return g
    if p == 1:
        g = np.sign(y)
    elif p == math.inf:
        k = int(np.argmax(np.abs(y)))
        g[k] = np.sign(y[k])
    else:
        g = np.sign(y) * (np.abs(y) / _pnorm(y, p)) ** (p - 1.0)
    return g


@dataclass(frozen=True)
class BanachNorm:
    """The norm of B.

    ``kind`` is ``"p"`` (plain l^p), ``"weighted-p"`` with
    ``‖x‖ = (sum_i w_i |x_i|^p)^{1/p}`` (``max_i w_i |x_i|`` for p = inf) or
    ``"grid-sup"``, the sup norm of grid values.
    """

    kind: str = "p"
    p: float = 2.0
    weights: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("p", "weighted-p", "grid-sup"):
            raise RiggingError(f"unknown norm kind {self.kind!r}")
        p = float(self.p)
        if self.kind == "grid-sup":
            p = math.inf
        if not (p >= 1.0):
            raise RiggingError(f"exponent must satisfy p >= 1, got {self.p}")
        object.__setattr__(self, "p", p)
        if self.kind == "weighted-p":
            if self.weights is None:
                raise RiggingError("weighted-p needs weights")
            w = tuple(float(v) for v in np.ravel(self.weights))
            if not all(np.isfinite(v) and v > 0 for v in w):
                raise RiggingError("weights must be strictly positive")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise RiggingError(f"{self.kind} norm takes no weights")

    @classmethod
    def lp(cls, p):
        return cls("p", p)

    @classmethod
    def weighted(cls, p, weights):
        return cls("weighted-p", p, tuple(weights))

    @classmethod
    def grid_sup(cls):
        return cls("grid-sup", math.inf)

    @property
    def q(self):
        return _dual_exponent(self.p)

    @property
    def is_hilbert(self):
        return self.p == 2

    def scales(self, n):
        """Diagonal ``d`` with ``‖x‖_B = ‖d * x‖_p``."""
        if self.weights is None:
            return np.ones(n)
        w = np.asarray(self.weights)
        if w.size != n:
            raise RiggingError(f"norm has {w.size} weights, vector has {n}")
        return w if self.p == math.inf else w ** (1.0 / self.p)

    def _d(self, x):
        d = self.scales(x.shape[0])
        return d if x.ndim == 1 else d[:, None]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _pnorm(self._d(x) * x, self.p)

    def dual(self, f):
        f = np.asarray(f, dtype=float)
        return _pnorm(f / self._d(f), self.q)

    def norming_functional(self, x):
        """``f`` with ``<x, f> = ‖x‖_B`` and ``‖f‖_{B'} = 1``."""
        x = np.asarray(x, dtype=float)
        d = self.scales(x.size)
        return d * _norming(d * x, self.p)

    def maximizer(self, f):
        """Unit vector ``x`` with ``<x, f> = ‖f‖_{B'}``."""
        f = np.asarray(f, dtype=float)
        d = self.scales(f.size)
        return _norming(f / d, self.q) / d

    def as_hilbert(self, n):
        if not self.is_hilbert:
            return None
        return HilbertNorm(np.diag(self.scales(n) ** 2))

    def to_dict(self):
        d = {"kind": self.kind, "p": "inf" if self.p == math.inf else self.p}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d):
        p = d.get("p", 2.0)
        p = math.inf if p in ("inf", "Infinity", math.inf) else float(p)
        w = d.get("weights")
        return cls(d.get("kind", "p"), p, tuple(w) if w is not None else None)


def _quad_norm(x, G):
    """``sqrt(x^T G x)`` per column, rescaled so tiny or huge x cannot
    under- or overflow."""
    x = np.asarray(x, dtype=float)
    m = np.abs(x).max(axis=0) if x.size else np.zeros(x.shape[1:])
    safe = np.where(m > 0, m, 1.0)
    y = x / safe
    return safe * np.sqrt(np.maximum((y * (G @ y)).sum(axis=0), 0.0))


class HilbertNorm:
    """Weighted Euclidean norm ``‖x‖ = sqrt(x^T W x)``."""

    is_hilbert = True
    p = 2.0

    def __init__(self, W):
        self.W = np.asarray(W, dtype=float)
        self._Winv = None

    @property
    def Winv(self):
        if self._Winv is None:
            self._Winv = np.linalg.inv(self.W)
        return self._Winv

    def __call__(self, x):
        return _quad_norm(x, self.W)

    def dual(self, f):
        return _quad_norm(f, self.Winv)

    def norming_functional(self, x):
        nx = self(x)
        return self.W @ x / nx if nx > 0 else np.zeros_like(x)

    def maximizer(self, f):
        nf = self.dual(f)
        if nf == 0:
            x = np.zeros_like(f)
            x[0] = 1.0
            return x / self(x)
        return self.Winv @ f / nf

    def as_hilbert(self, n):
        return self


@dataclass(frozen=True)
class Functional:
    """Covector acting by the coordinate pairing."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if not np.all(np.isfinite(c)):
            raise ValueError("functional coordinates must be finite")
        object.__setattr__(self, "coords", c)

    def __call__(self, x):
        return float(np.dot(np.asarray(x, dtype=float), self.coords))


def pairing(x, f):
    """``<x, f>`` for a vector and a Functional (or raw covector)."""
    c = f.coords if isinstance(f, Functional) else np.asarray(f, dtype=float)
    return float(np.dot(np.asarray(x, dtype=float), c))


def _is_diag(M):
    return not np.any(M - np.diag(np.diag(M)))


@dataclass(frozen=True, eq=False)
class Rigging:
    """``H1 ⊆ B ⊆ H2`` on ``R^n``.

    ``W2`` and ``W1`` are the normalized Gram matrices; ``w2_raw`` and
    ``T12`` are kept as given so the rigging can be rebuilt from JSON.
    ``c_scale = (c1, c2)`` with ``W2 = c2**2 w2_raw`` and
    ``W1 = c1**2 W2 T12^{-1}``.
    """

    n: int
    b_norm: BanachNorm
    W2: np.ndarray
    T12: np.ndarray
    W1: np.ndarray
    c_scale: tuple
    w2_raw: np.ndarray

    def __post_init__(self):
        for name in ("W2", "T12", "W1", "w2_raw"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @cached_property
    def h1(self):
        return HilbertNorm(self.W1)

    @cached_property
    def h2(self):
        return HilbertNorm(self.W2)

    @cached_property
    def is_diagonal(self):
        return _is_diag(self.W2) and _is_diag(self.T12) and _is_diag(self.W1)

    @cached_property
    def is_identity(self):
        eye = np.eye(self.n)
        return (self.b_norm.kind == "p" and self.b_norm.p == 2
                and np.array_equal(self.W1, eye) and np.array_equal(self.W2, eye))

    def space(self, tag):
        if tag == "B":
            return self.b_norm
        if tag == "H1":
            return self.h1
        if tag == "H2":
            return self.h2
        raise ValueError(f"unknown space tag {tag!r}; expected B, H1 or H2")

    def to_dict(self):
        def enc(M):
            return np.diag(M).tolist() if _is_diag(M) else M.ravel().tolist()

        return {
            "n": self.n,
            "b_norm": self.b_norm.to_dict(),
            "w2": enc(self.w2_raw),
            "t12": enc(self.T12),
            "c_scale": [float(c) for c in self.c_scale],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d):
        """Rebuild from :meth:`to_dict` output.

        Without ``c_scale`` the embedding constants are recomputed by
        :func:`make_rigging`.
        """
        n = int(d["n"])
        b = BanachNorm.from_dict(d["b_norm"])
        w2 = _decode(d["w2"], n)
        t12 = _decode(d["t12"], n)
        if d.get("c_scale") is None:
            return make_rigging(n, b, w2, t12)
        c1, c2 = (float(c) for c in d["c_scale"])
        W2raw, _ = _as_spd(w2, n, "w2")
        T, _ = _as_spd(t12, n, "t12")
        W2 = c2 ** 2 * W2raw
        return cls(n, b, W2, T, c1 ** 2 * _h1_gram(W2, T), (c1, c2), W2raw)

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def _decode(a, n):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1 and a.size == n * n and n > 1:
        return a.reshape(n, n)
    return a


def _as_spd(M, n, name):
    M = np.asarray(M, dtype=float)
    if M.ndim == 0:
        M = np.full(n, float(M))
    if M.ndim == 1:
        if M.size != n:
            raise RiggingError(f"{name}: expected {n} diagonal entries, got {M.size}")
        if not np.all(np.isfinite(M)) or np.any(M <= 0):
            raise RiggingError(f"{name}: diagonal entries must be positive")
        return np.diag(M), True
    if M.shape != (n, n):
        raise RiggingError(f"{name}: expected shape {(n, n)}, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise RiggingError(f"{name}: non-finite entries")
    if np.linalg.norm(M - M.T) > 1e-12 * np.linalg.norm(M):
        raise RiggingError(f"{name}: not symmetric")
    M = 0.5 * (M + M.T)
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise RiggingError(f"{name}: not positive definite") from None
    return M, _is_diag(M)


def _h1_gram(W2, T):
    if _is_diag(W2) and _is_diag(T):
        return np.diag(np.diag(W2) / np.diag(T))
    G = W2 @ np.linalg.inv(T)
    return 0.5 * (G + G.T)


# --- embedding constants -------------------------------------------------


def _sign_vectors(n):
    s = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1)))
    return np.hstack([np.ones((s.shape[0], 1)), s]) if n > 1 else np.ones((1, 1))


def _numeric_sup(num, den, n, seed=0):
    """Largest ``num(z)/den(z)`` found by local ascent from many starts.

    A lower bound on the true supremum.
    """
    rng = make_rng(seed)
    starts = list(np.eye(n)) + list(rng.standard_normal((_RESTARTS, n)))
    best = 0.0

    def neg(z):
        d = den(z)
        return -num(z) / d if d > 0 else 0.0

    for z0 in starts:
        best = max(best, -neg(z0))
        res = optimize.minimize(neg, z0, method="L-BFGS-B")
        best = max(best, -float(res.fun))
    return best


def _upper_plain(W, p):
    """sup ‖y‖_W / ‖y‖_p."""
    n = W.shape[0]
    if _is_diag(W):
        w = np.diag(W)
        if p <= 2:
            return math.sqrt(w.max())
        if p == math.inf:
            return math.sqrt(w.sum())
        return math.sqrt(_pnorm(w, p / (p - 2.0)))
    if p == 1:
        return math.sqrt(np.diag(W).max())
    if p == 2:
        return math.sqrt(np.linalg.eigvalsh(W)[-1])
    if p == math.inf and n <= _MAX_SIGN_ENUM:
        S = _sign_vectors(n)
        return math.sqrt(((S @ W) * S).sum(axis=1).max())
    return _numeric_sup(lambda z: math.sqrt(z @ W @ z), lambda z: _pnorm(z, p), n)


def _lower_plain(W, p):
    """sup ‖y‖_p / ‖y‖_W."""
    n = W.shape[0]
    if _is_diag(W):
        w = np.diag(W)
        if p >= 2:
            return 1.0 / math.sqrt(w.min())
        e = p / (2.0 - p)
        return float(np.sum(w ** -e) ** ((2.0 - p) / (2.0 * p)))
    if p == math.inf:
        return math.sqrt(np.diag(np.linalg.inv(W)).max())
    if p == 2:
        return 1.0 / math.sqrt(np.linalg.eigvalsh(W)[0])
    if p == 1 and n <= _MAX_SIGN_ENUM:
        S = _sign_vectors(n)
        Wi = np.linalg.inv(W)
        return math.sqrt(((S @ Wi) * S).sum(axis=1).max())
    return _numeric_sup(lambda z: _pnorm(z, p), lambda z: math.sqrt(z @ W @ z), n)


def embedding_constants(b_norm, W, n=None):
    """Return ``(sup ‖x‖_W/‖x‖_B, sup ‖x‖_B/‖x‖_W)``.

    Closed forms cover diagonal ``W`` against every p, and any SPD ``W``
    against p in {1, 2, inf}; other cases fall back to multistart ascent.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0] if n is None else n
    d = b_norm.scales(n)
    Wp = W / np.outer(d, d)
    return _upper_plain(Wp, b_norm.p), _lower_plain(Wp, b_norm.p)


# --- constructors ----------------------------------------------------------


def make_rigging(n, b_norm, w2_raw, t12):
    """Build a normalized rigging from a B-norm, raw H2 weights and T12.

    Diagonal inputs may be given as 1-D arrays. ``w2_raw`` and ``t12`` must
    be SPD and commute.
    """
    n = int(n)
    if n < 1:
        raise RiggingError("dimension must be positive")
    if isinstance(b_norm, dict):
        b_norm = BanachNorm.from_dict(b_norm)
    b_norm.scales(n)
    W2raw, _ = _as_spd(w2_raw, n, "w2_raw")
    T, _ = _as_spd(t12, n, "t12")
    comm = np.linalg.norm(W2raw @ T - T @ W2raw)
    if comm > 1e-12 * np.linalg.norm(W2raw) * np.linalg.norm(T):
        raise RiggingError(f"w2_raw and t12 do not commute (defect {comm:.3e})")
    up, _ = embedding_constants(b_norm, W2raw, n)
    c2 = 1.0 / up
    W2 = c2 ** 2 * W2raw
    W1raw = _h1_gram(W2, T)
    _, lo = embedding_constants(b_norm, W1raw, n)
    c1 = lo
    return Rigging(n, b_norm, W2, T, c1 ** 2 * W1raw, (c1, c2), W2raw)


def identity_rigging(n, p=2.0):
    """Unit weights; for p = 2 all three spaces coincide with l^2."""
    return make_rigging(n, BanachNorm.lp(p), np.ones(n), np.ones(n))


def wiener_rigging(n=16):
    """Discrete analogue of ``H^1_0 ⊆ C ⊆ L^2`` on a uniform grid.

    B is the sup norm of grid values, ``W2 = I/n`` and ``T12`` is the inverse
    of the Dirichlet Laplacian.
    """
    h = 1.0 / (n + 1)
    L = (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h ** 2
    return make_rigging(n, BanachNorm.grid_sup(), np.full(n, 1.0 / n),
                        np.linalg.inv(L))


def random_diagonal_rigging(n, b_norm, rng):
    from ._random import random_spd_like_diag, random_trace_class_diag

    if not isinstance(b_norm, BanachNorm):
        b_norm = BanachNorm.lp(b_norm)
    return make_rigging(n, b_norm, random_spd_like_diag(n, rng),
                        random_trace_class_diag(n, rng))


# --- norms and duality maps -------------------------------------------------


def norm(r, x, space="B"):
    """Norm of `x` in B, H1, H2, or of a functional in B-dual."""
    if space == "B-dual":
        c = x.coords if isinstance(x, Functional) else x
        return float(r.b_norm.dual(c))
    if isinstance(x, Functional):
        raise TypeError("functionals are measured in 'B-dual'")
    return float(r.space(space)(np.asarray(x, dtype=float)))


def j_map(r, x, i=2):
    """Conjugate isomorphism ``J_i: H_i -> H_i'``, coords ``W_i x``."""
    if i not in (1, 2):
        raise ValueError(f"J index must be 1 or 2, got {i!r}")
    W = r.W1 if i == 1 else r.W2
    return Functional(W @ np.asarray(x, dtype=float))


def j_inverse(r, f, i=2):
    if i not in (1, 2):
        raise ValueError(f"J index must be 1 or 2, got {i!r}")
    W = r.W1 if i == 1 else r.W2
    c = f.coords if isinstance(f, Functional) else np.asarray(f, dtype=float)
    return np.linalg.solve(W, c)


def special_duality(r, x):
    """``(‖x‖_B^2 / ‖x‖_{H2}^2) J2(x)``; undefined at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("special duality map is undefined at x = 0")
    nb = r.b_norm(x)
    n2 = r.h2(x)
    return Functional((nb / n2) ** 2 * (r.W2 @ x))


def check_embedding(r, trials=1000, seed=0):
    """Sample the norm ordering and the duality-map identities.

    The ratio ``‖φ^s_x‖_{B'} / ‖x‖_B`` is measured, never asserted.
    """
    rng = make_rng(seed)
    rep = PropertyReport("embedding", seed=seed, trials=trials)
    X = rng.standard_normal((r.n, trials))
    nb = r.b_norm(X)
    n1 = r.h1(X)
    n2 = r.h2(X)
    wit = [{"x": X[:, k]} for k in range(trials)]
    rep.assert_worst("h2_le_b", (n2 - nb) / nb, wit, 1e-12)
    rep.assert_worst("b_le_h1", (nb - n1) / n1, wit, 1e-12)

    phi = (nb / n2) ** 2 * (r.W2 @ X)
    pair = (X * phi).sum(axis=0)
    rep.assert_worst("special_duality_pairing",
                     np.abs(pair - nb ** 2) / nb ** 2, wit, 1e-12)
    pair_j = (X * (r.W1 @ X)).sum(axis=0)
    rep.assert_worst("j1_pairing", np.abs(pair_j - n1 ** 2) / n1 ** 2, wit, 1e-12)

    ratio = r.b_norm.dual(phi) / nb
    k = int(np.argmax(ratio))
    rep.measure("duality_dual_norm_ratio_max", ratio[k], {"x": X[:, k]})
    k = int(np.argmin(ratio))
    rep.measure("duality_dual_norm_ratio_min", ratio[k], {"x": X[:, k]})
    return rep
