"""Unit-norm Markushevich bases built from the common eigenbasis of a rigging."""

import json
from dataclasses import dataclass

import numpy as np

from ._random import make_rng
from .report import PropertyReport, jsonable
from .rigging import Rigging, RiggingError

__all__ = ["MBasis", "markushevich", "check_basis"]


@dataclass(frozen=True, eq=False)
class MBasis:
    """Biorthogonal system: ``vectors[:, i]`` is x_i, ``functionals[i]`` is x_i*."""

    vectors: np.ndarray
    functionals: np.ndarray
    r: Rigging

    def to_dict(self):
        return jsonable({
            "vectors": self.vectors.T,
            "functionals": self.functionals,
            "rigging": self.r.to_dict(),
        })

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["vectors"], dtype=float).T,
                   np.asarray(d["functionals"], dtype=float),
                   Rigging.from_dict(d["rigging"]))


def _common_eigenbasis(r):
    if r.is_diagonal:
        return np.eye(r.n)
    # a generic combination separates the joint eigenspaces
    alpha = np.pi / 7.0
    M = r.W2 / np.linalg.norm(r.W2) + alpha * r.T12 / np.linalg.norm(r.T12)
    _, V = np.linalg.eigh(0.5 * (M + M.T))
    for G in (r.W2, r.T12):
        D = V.T @ G @ V
        off = np.linalg.norm(D - np.diag(np.diag(D)))
        if off > 1e-10 * np.linalg.norm(G):
            raise RiggingError("rigging has no common orthogonal eigenbasis "
                               f"(off-diagonal defect {off:.3e})")
    return V


def markushevich(r):
    """``x_i = v_i / ‖v_i‖_B`` and ``x_i* = J2(x_i) / ‖x_i‖_{H2}^2``.

    The ``v_i`` diagonalize W2 and T12 at once, so they are orthogonal in
    both H1 and H2.
    """
    V = _common_eigenbasis(r)
    X = V / r.b_norm(V)
    if r.is_diagonal:
        w = np.diag(r.W2)
        F = (w[:, None] * X) / (w * (X * X).sum(axis=0))[None, :]
    else:
        F = (r.W2 @ X) / r.h2(X) ** 2
    return MBasis(X, F.T, r)


def check_basis(b, n_coeffs=200, seed=0):
    """Biorthogonality, unit primal and dual norms, monotonicity, full rank."""
    r = b.r
    X, F = b.vectors, b.functionals
    n = r.n
    rep = PropertyReport("basis", seed=seed, trials=n_coeffs)

    G = F @ X
    k = np.unravel_index(np.argmax(np.abs(G - np.eye(n))), G.shape)
    rep.add_assertion("biorthogonal", np.abs(G - np.eye(n)).max(), 1e-12,
                      {"i": k[1], "j": k[0]})

    primal = r.b_norm(X)
    k = int(np.argmax(np.abs(primal - 1)))
    rep.add_assertion("unit_norm", abs(primal[k] - 1), 1e-12, {"i": k})
    dual = r.b_norm.dual(F.T)
    k = int(np.argmax(np.abs(dual - 1)))
    rep.add_assertion("unit_dual_norm", abs(dual[k] - 1), 1e-12, {"i": k})

    rng = make_rng(seed)
    A = rng.standard_normal((n_coeffs, n))
    mono = []
    for a in A:
        partial = r.b_norm(np.cumsum(X * a, axis=1))
        # ‖S_m‖ <= ‖S_m'‖ for all m < m'
        mono.append(float(np.max(np.maximum.accumulate(partial)[:-1] - partial[1:],
                                 initial=0.0)))
    rep.assert_worst("monotone", mono, [{"a": a} for a in A], 1e-12)

    # monotone coordinates give |<y, x_n*>| <= |a_n| <= ‖y‖_B for ‖y‖_B <= 1
    Y = X @ A.T
    Y = Y / r.b_norm(Y)
    pair = np.abs(F @ Y).max(axis=0)
    rep.assert_worst("dual_pairing_bound", pair - 1.0,
                     [{"y": Y[:, k]} for k in range(n_coeffs)], 1e-12)

    rank_x = np.linalg.matrix_rank(X)
    rank_f = np.linalg.matrix_rank(F)
    rep.add_assertion("full_rank", float(2 * n - rank_x - rank_f), 0.0,
                      {"rank_vectors": rank_x, "rank_functionals": rank_f})
    return rep
