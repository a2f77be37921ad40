"""The embedding adjoint ``A* = W1^{-1} A^T W2`` and its theorem checkers.

``A*`` is obtained by restricting A to H1, taking the coordinate transpose on
covectors, and identifying duals through ``J1`` and ``J2``. It is always the
H1→H2 Hilbert adjoint, which is why ``A*A`` is H1-self-adjoint and positive.
"""

from dataclasses import dataclass

import numpy as np

from ._random import make_rng
from .matfun import MatFunError, opnorm, weight_frame
from .report import PropertyReport
from .rigging import Rigging

__all__ = [
    "Operator", "adjoint", "gram", "star_residual", "h2_symmetry_defect",
    "check_vonneumann", "check_lax", "check_h2_bound", "is_orthogonal",
    "check_orthogonality", "h2_symmetric_operator", "random_operator",
]


@dataclass(frozen=True, eq=False)
class Operator:
    """An n×n matrix acting on the coordinates of a rigging."""

    r: Rigging
    M: np.ndarray

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.shape != (self.r.n, self.r.n):
            raise ValueError(f"operator shape {M.shape} does not match n={self.r.n}")
        if not np.all(np.isfinite(M)):
            raise ValueError("operator has non-finite entries")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def n(self):
        return self.r.n

    def __call__(self, x):
        return self.M @ np.asarray(x, dtype=float)

    def _same(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.r is not self.r:
            raise ValueError("operators live on different riggings")
        return True

    def __matmul__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Operator(self.r, self.M @ other.M)

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Operator(self.r, self.M + other.M)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Operator(self.r, self.M - other.M)

    def __mul__(self, alpha):
        return Operator(self.r, float(alpha) * self.M)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.r, -self.M)

    @classmethod
    def identity(cls, r):
        return cls(r, np.eye(r.n))


def random_operator(r, rng):
    """Operator with i.i.d. standard normal entries."""
    return Operator(r, rng.standard_normal((r.n, r.n)))


def h2_symmetric_operator(r, rng):
    """``W2^{-1} S`` with S a random symmetric matrix (self-adjoint on H2)."""
    G = rng.standard_normal((r.n, r.n))
    S = 0.5 * (G + G.T)
    return Operator(r, np.linalg.solve(r.W2, S))


def _w1_solve(r, X):
    if r.is_diagonal:
        return X / np.diag(r.W1)[:, None]
    return np.linalg.solve(r.W1, X)


def adjoint(A):
    """``A* = J1^{-1} A'_1 J2``, i.e. the matrix ``W1^{-1} A^T W2``."""
    r = A.r
    return Operator(r, _w1_solve(r, A.M.T @ r.W2))


def gram(A):
    """Return ``(A*A, (I + A*A)^{-1})``."""
    n = A.n
    AtA = adjoint(A) @ A
    B = np.eye(n) + AtA.M
    inv = np.linalg.solve(B, np.eye(n))
    res = np.linalg.norm(B @ inv - np.eye(n))
    if not res <= 1e-10 * n:
        raise MatFunError(f"I + A*A inversion residual {res:.3e}", res)
    return AtA, Operator(A.r, inv)


def star_residual(A):
    """``‖(A*A)* - A*A‖_F``, zero only in special riggings."""
    AtA = adjoint(A) @ A
    return float(np.linalg.norm(adjoint(AtA).M - AtA.M))


def h2_symmetry_defect(A):
    W2 = A.r.W2
    return float(np.linalg.norm(W2 @ A.M - A.M.T @ W2))


def check_vonneumann(A, n_x=100, seed=0):
    """Check the adjoint-existence theorem for a single operator.

    Asserts accretivity of ``A*A`` against the special duality map,
    a real nonnegative spectrum, H1-self-adjointness and the inverse of
    ``I + A*A``. The literal star identity and H2-symmetry are measured.
    """
    r = A.r
    rng = make_rng(seed)
    rep = PropertyReport("vonneumann", seed=seed, trials=n_x)
    AtA, inv = gram(A)
    T = AtA.M
    X = rng.standard_normal((r.n, n_x))
    Y = rng.standard_normal((r.n, n_x))
    wit = [{"A": A.M, "x": X[:, k], "y": Y[:, k]} for k in range(n_x)]

    nb = r.b_norm(X)
    n2 = r.h2(X)
    phi = (nb / n2) ** 2 * (r.W2 @ X)
    acc = ((T @ X) * phi).sum(axis=0)
    fro2 = np.linalg.norm(A.M) ** 2
    scale = np.where(fro2 > 0, fro2, 1.0) * nb ** 2
    rep.assert_worst("accretive", -acc / scale, wit, 1e-10)

    lam = np.linalg.eigvals(T)
    tscale = max(np.linalg.norm(T), 1.0)
    rep.add_assertion("spectrum_real", np.abs(lam.imag).max() / tscale, 1e-8,
                      {"A": A.M})
    rep.add_assertion("spectrum_nonnegative", max(0.0, -lam.real.min()) / tscale,
                      1e-8, {"A": A.M})

    lhs = ((r.W1 @ (T @ X)) * Y).sum(axis=0)
    rhs = ((r.W1 @ X) * (T @ Y)).sum(axis=0)
    sscale = (np.linalg.norm(r.W1) * np.linalg.norm(T)
              * np.linalg.norm(X, axis=0) * np.linalg.norm(Y, axis=0))
    sscale = np.where(sscale > 0, sscale, 1.0)
    rep.assert_worst("h1_selfadjoint", np.abs(lhs - rhs) / sscale, wit, 1e-10)

    res = np.linalg.norm((np.eye(r.n) + T) @ inv.M - np.eye(r.n))
    rep.add_assertion("inverse_residual", res / r.n, 1e-10, {"A": A.M})

    rep.measure("star_residual", star_residual(A), {"A": A.M})
    rep.measure("h2_symmetry_defect_AstarA", h2_symmetry_defect(AtA), {"A": A.M})
    return rep


def _h2_norm_symmetric(A):
    Wh, Whi = weight_frame(A.r.W2)
    S = Wh @ A.M @ Whi
    lam, V = np.linalg.eigh(0.5 * (S + S.T))
    k = int(np.argmax(np.abs(lam)))
    return abs(lam[k]), Whi @ V[:, k]


def check_lax(A, tol=1e-10):
    """Lax bound ``‖A‖_{H2} <= ‖A‖_B`` for an H2-self-adjoint operator."""
    r = A.r
    defect = h2_symmetry_defect(A)
    if defect > 1e-12 * max(np.linalg.norm(r.W2) * np.linalg.norm(A.M), 1e-300):
        raise ValueError(f"operator is not H2-self-adjoint (defect {defect:.3e})")
    rep = PropertyReport("lax", trials=1)
    h2, v = _h2_norm_symmetric(A)
    nb = opnorm(A.M, "B", "B", r, extra_starts=[v])
    b_val = nb.value
    if not nb.exact:
        # a real eigenvector certifies ‖A‖_B >= |eigenvalue|
        b_val = max(b_val, float(r.b_norm(A.M @ v) / r.b_norm(v)))
    rel = (h2 - b_val) / b_val if b_val > 0 else (0.0 if h2 == 0 else np.inf)
    rep.add_assertion("h2_le_b", rel, tol, {"A": A.M})
    rep.measure("norm_h2", h2)
    rep.measure("norm_b", b_val)
    rep.measure("norm_b_exact", float(nb.exact))
    return rep


def check_h2_bound(A):
    """Record ``‖A‖_{H2}^2``, ``‖A*A‖_B`` and ``‖A‖_B^2``.

    Only finiteness is asserted. Whether ``‖A‖_{H2}^2 <= ‖A*A‖_B`` held is
    measured as a 0/1 flag.
    """
    r = A.r
    rep = PropertyReport("h2bound", trials=1)
    Wh, Whi = weight_frame(r.W2)
    h2 = float(np.linalg.norm(Wh @ A.M @ Whi, 2))
    AtA = adjoint(A) @ A
    nAA = opnorm(AtA.M, "B", "B", r)
    nA = opnorm(A.M, "B", "B", r)
    vals = np.array([h2 ** 2, nAA.value, nA.value ** 2])
    rep.add_assertion("finite", 0.0 if np.all(np.isfinite(vals)) else np.inf, 0.0,
                      {"A": A.M})
    rep.measure("norm_h2_sq", vals[0], {"A": A.M})
    rep.measure("norm_AstarA_b", vals[1])
    rep.measure("norm_b_sq", vals[2])
    if vals[2] > 0:
        rep.measure("ratio_AstarA_over_b_sq", vals[1] / vals[2])
        rep.measure("ratio_h2_sq_over_b_sq", vals[0] / vals[2])
    rep.measure("chain_h2_sq_le_AstarA_b",
                float(vals[0] <= vals[1] * (1 + 1e-10) + 1e-300))
    rep.measure("norms_exact", float(nAA.exact and nA.exact))
    return rep


def _as_columns(U, n):
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U.reshape(n, -1) if U.size else np.zeros((n, 0))
    return U


def is_orthogonal(r, U, V, tol=1e-12):
    """Whether span(U) is orthogonal to span(V) in the sense of B.

    ``<y, φ^s_x> = 0`` iff ``<y, J2 x> = 0``, so this reduces to
    ``V^T W2 U = 0``.
    """
    U = _as_columns(U, r.n)
    V = _as_columns(V, r.n)
    if U.shape[1] == 0 or V.shape[1] == 0:
        return True
    G = V.T @ r.W2 @ U
    scale = np.linalg.norm(V) * np.linalg.norm(r.W2) * np.linalg.norm(U)
    return bool(np.abs(G).max() <= tol * scale)


def check_orthogonality(r, trials=100, seed=0):
    """Symmetry of orthogonality on random and on constructed pairs."""
    rng = make_rng(seed)
    rep = PropertyReport("orthogonality", seed=seed, trials=trials)
    asym = []
    missed = []
    wit = []
    for _ in range(trials):
        k = int(rng.integers(1, r.n)) if r.n > 1 else 1
        U = rng.standard_normal((r.n, k))
        # basis of the W2-orthogonal complement of span(U)
        _, _, Vt = np.linalg.svd((r.W2 @ U).T)
        V = Vt[k:].T
        R = rng.standard_normal((r.n, max(r.n - k, 1)))
        asym.append(float(is_orthogonal(r, U, R) != is_orthogonal(r, R, U)))
        asym.append(float(is_orthogonal(r, U, V) != is_orthogonal(r, V, U)))
        missed.append(0.0 if is_orthogonal(r, U, V) else 1.0)
        wit.append({"U": U, "V": V})
    rep.assert_worst("symmetric", asym, [w for w in wit for _ in (0, 1)], 0.0)
    rep.assert_worst("complement_detected", missed, wit, 0.0)
    return rep
