"""Polar factors, generalized Yosida approximation and the bounded-transform
metric for operators on a rigging.

With ``T = -(A*A)^{1/2}`` and ``A = U T`` the approximator is

    A_lam = lam A R(lam, T) = lam^2 U R(lam, T) - lam U,

which only needs the resolvent of the nonpositive operator ``T``, never that
of ``A`` itself.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ._random import make_rng
from .adjoint import Operator, adjoint, random_operator
from .matfun import (expm, expm_eig, inv_sqrt_psd_like, opnorm,
                     pinv, resolvent, spectrum, sqrt_psd_like, weight_frame)
from .report import PropertyReport, jsonable

__all__ = [
    "PolarData", "ConvergenceTable", "polar_factors", "yosida_general",
    "yosida_classical", "semigroup_experiment", "bounded_transform",
    "operator_metric", "check_polar", "check_yosida_identities",
    "check_metric", "CSV_HEADER",
]

CSV_HEADER = ("lambda", "approx_err", "t", "semigroup_err", "expm_norm_B")


@dataclass(frozen=True, eq=False)
class PolarData:
    T: Operator
    Tbar: Operator
    U: Operator
    rank_T: int
    rank_Tbar: int


def _weighted_pinv(M, W):
    """Moore-Penrose inverse in the inner product ``x^T W y``."""
    Wh, Whi = weight_frame(W)
    return Whi @ pinv(Wh @ M @ Whi) @ Wh


def _frame_rank(M, W, rtol=1e-12):
    Wh, Whi = weight_frame(W)
    s = np.linalg.svd(Wh @ M @ Whi, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0


def polar_factors(A):
    """``T = -(A*A)^{1/2}``, ``Tbar = -(AA*)^{1/2}`` and U with ``A = U T``.

    U is formed with the H1 pseudo-inverse of T, so it vanishes on ker T and
    maps range T isometrically from H1 into H2.
    """
    r = A.r
    As = adjoint(A)
    T = -sqrt_psd_like((As @ A).M, r.W1)
    Tbar = -sqrt_psd_like((A @ As).M, r.W2)
    U = A.M @ _weighted_pinv(T, r.W1)
    return PolarData(Operator(r, T), Operator(r, Tbar), Operator(r, U),
                     _frame_rank(T, r.W1), _frame_rank(Tbar, r.W2))


def yosida_general(A, lam, polar=None):
    """``lam A R(lam, T)``; bounded for every ``lam > 0``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    P = polar_factors(A) if polar is None else polar
    R = resolvent(P.T.M, lam)
    return Operator(A.r, lam * (A.M @ R))


def yosida_classical(A, lam):
    """``lam A R(lam, A)``; needs lam above the spectral abscissa of A."""
    abscissa = float(np.max(np.linalg.eigvals(A.M).real))
    if not lam > abscissa:
        raise ValueError(f"lambda={lam} does not exceed the spectral abscissa "
                         f"{abscissa:.6g}; R(lambda, A) is not available")
    return Operator(A.r, lam * (A.M @ resolvent(A.M, lam)))


def check_polar(A, n_x=100, seed=0):
    """``U T = A``, ``‖U‖_{H1->H2} = 1`` and ``‖Tx‖_{H1} = ‖Ax‖_{H2}``."""
    r = A.r
    rep = PropertyReport("polar", seed=seed, trials=n_x)
    P = polar_factors(A)
    nA = np.linalg.norm(A.M)
    wit = {"A": A.M}
    rep.add_assertion("UT_equals_A",
                      np.linalg.norm(P.U.M @ P.T.M - A.M) / (nA if nA > 0 else 1.0),
                      1e-8, wit)
    if nA > 0:
        u = opnorm(P.U.M, "H1", "H2", r).value
        rep.add_assertion("partial_isometry_norm", abs(u - 1.0), 1e-8, wit)
    X = make_rng(seed).standard_normal((r.n, n_x))
    tx = r.h1(P.T.M @ X)
    ax = r.h2(A.M @ X)
    sc = np.maximum(ax, np.linalg.norm(X, axis=0) * max(nA, 1e-300))
    rep.assert_worst("isometry_identity", np.abs(tx - ax) / sc,
                     [{"A": A.M, "x": X[:, k]} for k in range(n_x)], 1e-9)
    rep.measure("rank_T", P.rank_T)
    rep.measure("rank_Tbar", P.rank_Tbar)
    rep.measure("U_norm_B", opnorm(P.U.M, "B", "B", r).value, wit)
    return rep


def check_yosida_identities(A, lambdas):
    """The algebraic identity for ``A_lam`` and the intertwining with Tbar."""
    rep = PropertyReport("yosida_identities", trials=len(lambdas))
    P = polar_factors(A)
    nA = np.linalg.norm(A.M)
    nU = np.linalg.norm(P.U.M)
    d_id, d_tw, wit = [], [], []
    for lam in lambdas:
        R = resolvent(P.T.M, lam)
        Rb = resolvent(P.Tbar.M, lam)
        nR, nRb = np.linalg.norm(R), np.linalg.norm(Rb)
        Al = yosida_general(A, lam, P).M
        alt = lam ** 2 * (P.U.M @ R) - lam * P.U.M
        sc = lam * nA * nR + lam ** 2 * nU * nR + lam * nU
        d_id.append(np.linalg.norm(Al - alt) / (sc if sc > 0 else 1.0))
        sc = nA * (nR + nRb)
        d_tw.append(np.linalg.norm(A.M @ R - Rb @ A.M) / (sc if sc > 0 else 1.0))
        wit.append({"A": A.M, "lambda": lam})
    rep.assert_worst("resolvent_identity", d_id, wit, 1e-9)
    rep.assert_worst("intertwining", d_tw, wit, 1e-8)
    return rep


@dataclass
class ConvergenceTable:
    """One row per (lambda, t) cell; ``approx_err`` repeats across t."""

    rows: list
    report: PropertyReport = field(default_factory=lambda: PropertyReport("semigroup"))

    def __post_init__(self):
        lams = self.lambdas
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("lambdas must be strictly increasing")

    @property
    def lambdas(self):
        out = []
        for row in self.rows:
            if not out or out[-1] != row[0]:
                out.append(row[0])
        return out

    def approx_errors(self):
        seen = {}
        for lam, a, *_ in self.rows:
            seen.setdefault(lam, a)
        return np.array([seen[l] for l in self.lambdas])

    def semigroup_errors(self):
        """Max over the time grid, per lambda."""
        best = {}
        for lam, _, _, s, _ in self.rows:
            best[lam] = max(best.get(lam, 0.0), s)
        return np.array([best[l] for l in self.lambdas])

    def lookup(self, lam, t):
        for row in self.rows:
            if row[0] == lam and row[2] == t:
                return row
        raise KeyError((lam, t))

    def to_csv(self, header=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        if header:
            w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue()

    def to_dict(self):
        return jsonable({
            "columns": list(CSV_HEADER),
            "rows": [list(map(float, row)) for row in self.rows],
            "report": self.report.to_dict(),
        })


def _monotone_defect(e):
    worst = 0.0
    for a, b in zip(e, e[1:]):
        if a == 0:
            if b > 0:
                return np.inf
            continue
        worst = max(worst, b / a - 1.0)
    return worst


def _rate_defect(lams, e, lo=0.35, hi=0.65, last=3):
    """Distance of the last `last` doubling ratios from ``[lo, hi]``.

    Returns None when there are not enough doublings to judge.
    """
    ratios = [e[k + 1] / e[k] for k in range(len(e) - 1)
              if lams[k + 1] == 2 * lams[k] and e[k] > 0]
    if np.all(np.asarray(e) == 0):
        return 0.0, []
    if len(ratios) < last:
        return None, ratios
    ratios = ratios[-last:]
    return max(max(lo - q, q - hi, 0.0) for q in ratios), ratios


def semigroup_experiment(A, lambdas, ts, xs):
    """Convergence of ``A_lam x`` and ``exp(t A_lam) x`` as lam grows.

    Returns a :class:`ConvergenceTable` whose report asserts monotone decay
    (5% slack) and halving under lambda doubling for both errors.
    Contraction of ``exp(t A_lam)`` is asserted only on the identity
    rigging and measured elsewhere.
    """
    r = A.r
    lambdas = [float(l) for l in lambdas]
    ts = [float(t) for t in ts]
    if not lambdas or not ts:
        raise ValueError("lambda and time grids must be nonempty")
    if any(l <= 0 for l in lambdas):
        raise ValueError("lambdas must be positive")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be strictly increasing")
    if any(t < 0 for t in ts):
        raise ValueError("times must be nonnegative")
    X = np.column_stack([np.asarray(x, dtype=float) for x in xs])
    rep = PropertyReport("semigroup", trials=X.shape[1])

    AX = A.M @ X
    nAX = r.b_norm(AX)
    active = nAX > 0
    E = {t: expm(A.M, t) for t in ts}

    sp = spectrum(A.M)
    if sp.diagonalizable and np.linalg.cond(sp.basis) <= 1e4:
        cross = max(np.linalg.norm(E[t] - expm_eig(A.M, t))
                    / max(np.linalg.norm(E[t]), 1.0) for t in ts)
        rep.add_assertion("expm_cross_check", cross, 1e-9, {"A": A.M})

    P = polar_factors(A)
    rows = []
    norms = []
    for lam in lambdas:
        Al = yosida_general(A, lam, P).M
        D = Al @ X - AX
        a_err = float(np.max(r.b_norm(D[:, active]) / nAX[active])) if active.any() else 0.0
        for t in ts:
            El = expm(Al, t)
            s_err = float(np.max(r.b_norm(El @ X - E[t] @ X)))
            nrm = opnorm(El, "B", "B", r).value
            rows.append((lam, a_err, t, s_err, nrm))
            norms.append((nrm, lam, t))
    table = ConvergenceTable(rows, rep)

    ea, es = table.approx_errors(), table.semigroup_errors()
    rep.add_assertion("approx_err_nonincreasing", _monotone_defect(ea), 0.05,
                      {"errors": ea})
    rep.add_assertion("semigroup_err_nonincreasing", _monotone_defect(es), 0.05,
                      {"errors": es})
    for name, e in (("approx_err_rate", ea), ("semigroup_err_rate", es)):
        d, ratios = _rate_defect(lambdas, e)
        if d is None:
            rep.measure(name + "_unjudged", len(ratios))
        else:
            rep.add_assertion(name, d, 0.0, {"ratios": ratios})

    top, lam_w, t_w = max(norms)
    if r.is_identity:
        rep.add_assertion("contraction", top - 1.0, 1e-10,
                          {"A": A.M, "lambda": lam_w, "t": t_w})
    rep.measure("expm_norm_B_max", top, {"A": A.M, "lambda": lam_w, "t": t_w})
    rep.measure("semigroup_err_final", es[-1])
    rep.measure("approx_err_final", ea[-1])
    return table


def bounded_transform(A):
    """``A (I + A*A)^{-1/2}``, the inverse square root taken in the H1 frame."""
    r = A.r
    G = np.eye(r.n) + (adjoint(A) @ A).M
    return Operator(r, A.M @ inv_sqrt_psd_like(G, r.W1))


def _canonical_sign(X):
    flat = X.ravel()
    nz = np.flatnonzero(flat)
    return -X if nz.size and flat[nz[0]] < 0 else X


def operator_metric(A, B):
    """``‖A0 - B0‖_{B->B}`` with ``A0 = A (I + A*A)^{-1/2}``."""
    if A.r is not B.r:
        raise ValueError("operators must share a rigging")
    X = bounded_transform(A).M - bounded_transform(B).M
    # d(A,B) and d(B,A) see bitwise-identical matrices
    return opnorm(_canonical_sign(X), "B", "B", A.r).value


def check_metric(r, trials=100, seed=0):
    """Metric axioms on random operator triples."""
    rng = make_rng(seed)
    rep = PropertyReport("metric", seed=seed, trials=trials)
    sym, zero, tri, bt, sep, wit = [], [], [], [], [], []
    for _ in range(trials):
        A, B, C = (random_operator(r, rng) for _ in range(3))
        dab, dba = operator_metric(A, B), operator_metric(B, A)
        dbc, dac = operator_metric(B, C), operator_metric(A, C)
        sym.append(abs(dab - dba))
        zero.append(operator_metric(A, A))
        tri.append(dac - dab - dbc)
        A0 = bounded_transform(A).M
        bt.append(opnorm(A0, "B", "B", r).value)
        sep.append(dab)
        wit.append({"A": A.M, "B": B.M, "C": C.M})
    rep.assert_worst("symmetric", sym, wit, 0.0)
    rep.assert_worst("self_distance_zero", zero, wit, 0.0)
    rep.assert_worst("triangle", tri, wit, 1e-12)
    k = int(np.argmax(bt))
    if r.is_identity:
        rep.assert_worst("bounded_transform_le_1", np.asarray(bt) - 1.0, wit, 1e-10)
        rep.assert_worst("separation", [0.0 if d > 0 else 1.0 for d in sep], wit, 0.0)
    rep.measure("bounded_transform_norm_max", bt[k], wit[k])
    k = int(np.argmin(sep))
    rep.measure("distance_min", sep[k], wit[k])
    return rep

