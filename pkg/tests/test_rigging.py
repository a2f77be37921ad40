import math

import numpy as np
import pytest

from banach_adjoint import (BanachNorm, Functional, Rigging, RiggingError,
                            check_embedding, identity_rigging, j_inverse, j_map,
                            make_rigging, norm, pairing, random_diagonal_rigging,
                            special_duality, wiener_rigging)
from banach_adjoint._random import make_rng
from banach_adjoint.rigging import embedding_constants, _numeric_sup, _pnorm


def unit_circle(k=200001):
    th = np.linspace(0, 2 * np.pi, k)
    return np.vstack([np.cos(th), np.sin(th)])


# --- make_rigging -----------------------------------------------------------

def test_example_rigging_constants(ex_rig):
    assert ex_rig.c_scale == (1.0, 1.0)
    np.testing.assert_array_equal(ex_rig.W1, np.diag([2.0, 2.0]))
    np.testing.assert_array_equal(ex_rig.W2, np.diag([1.0, 0.25]))


def test_example_rigging_grid_search(ex_rig):
    # brute-force sup of both ratios over the unit circle
    X = unit_circle()
    nb, n1, n2 = ex_rig.b_norm(X), ex_rig.h1(X), ex_rig.h2(X)
    assert np.max(n2 / nb) == pytest.approx(1.0, abs=1e-9)
    assert np.max(nb / n1) == pytest.approx(1.0, abs=1e-9)
    assert np.all(n2 <= nb * (1 + 1e-12))
    assert np.all(nb <= n1 * (1 + 1e-12))


def test_one_dimensional_identity():
    r = make_rigging(1, BanachNorm.lp(2), [1.0], [1.0])
    x = np.array([-3.5])
    assert norm(r, x, "B") == norm(r, x, "H1") == norm(r, x, "H2") == 3.5
    np.testing.assert_array_equal(r.W1, [[1.0]])


def test_wiener_ordering_and_attainment():
    r = wiener_rigging(16)
    assert r.c_scale[1] == pytest.approx(1.0)
    rng = make_rng(7)
    X = rng.standard_normal((16, 10_000))
    X /= r.b_norm(X)
    assert np.all(r.h2(X) <= 1 + 1e-12)
    assert np.all(r.h1(X) >= 1 - 1e-12)
    # equality cases: the constant vector for H2, a Green's function column for H1
    ones = np.ones(16)
    assert r.h2(ones) == pytest.approx(r.b_norm(ones), rel=1e-12)
    G = np.linalg.inv(r.W1)
    k = int(np.argmax(np.diag(G)))
    g = G[:, k]
    assert r.b_norm(g) == pytest.approx(r.h1(g), rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_diagonal_constants_match_numeric_ascent(p):
    rng = make_rng(3)
    w = np.exp(rng.uniform(-1, 1, 4))
    W = np.diag(w)
    up, lo = embedding_constants(BanachNorm.lp(p), W)
    num_up = _numeric_sup(lambda z: math.sqrt(z @ W @ z), lambda z: _pnorm(z, p), 4)
    num_lo = _numeric_sup(lambda z: _pnorm(z, p), lambda z: math.sqrt(z @ W @ z), 4)
    assert num_up <= up * (1 + 1e-9)
    assert num_lo <= lo * (1 + 1e-9)
    assert num_up == pytest.approx(up, rel=1e-5)
    assert num_lo == pytest.approx(lo, rel=1e-5)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_full_spd_constants_match_numeric_ascent(p):
    rng = make_rng(11)
    G = rng.standard_normal((4, 4))
    W = G @ G.T + 0.5 * np.eye(4)
    up, lo = embedding_constants(BanachNorm.lp(p), W)
    num_up = _numeric_sup(lambda z: math.sqrt(z @ W @ z), lambda z: _pnorm(z, p), 4)
    num_lo = _numeric_sup(lambda z: _pnorm(z, p), lambda z: math.sqrt(z @ W @ z), 4)
    assert num_up <= up * (1 + 1e-9) and num_up == pytest.approx(up, rel=1e-5)
    assert num_lo <= lo * (1 + 1e-9) and num_lo == pytest.approx(lo, rel=1e-5)


def test_weighted_norm_constants():
    b = BanachNorm.weighted(3.0, [1.0, 2.0, 0.5])
    r = make_rigging(3, b, [1.0, 2.0, 3.0], [1.0, 0.5, 0.25])
    X = make_rng(5).standard_normal((3, 5000))
    assert np.all(r.h2(X) <= r.b_norm(X) * (1 + 1e-12))
    assert np.all(r.b_norm(X) <= r.h1(X) * (1 + 1e-12))


@pytest.mark.parametrize("bad", [
    dict(n=0, w2=[], t=[]),
    dict(n=2, w2=[1.0, -1.0], t=[1.0, 1.0]),
    dict(n=2, w2=[[1.0, 2.0], [2.0, 1.0]], t=[1.0, 1.0]),
    dict(n=2, w2=[[2.0, 1.0], [1.0, 2.0]], t=[1.0, 2.0]),
    dict(n=2, w2=[1.0, 1.0, 1.0], t=[1.0, 1.0]),
])
def test_make_rigging_rejects(bad):
    with pytest.raises(RiggingError):
        make_rigging(bad["n"], BanachNorm.lp(2), bad["w2"], bad["t"])


def test_banach_norm_validation():
    with pytest.raises(RiggingError):
        BanachNorm.lp(0.5)
    with pytest.raises(RiggingError):
        BanachNorm.weighted(2, [1.0, 0.0])
    with pytest.raises(RiggingError):
        BanachNorm("p", 2, (1.0,))


def test_commuting_full_inputs_accepted():
    Q, _ = np.linalg.qr(make_rng(1).standard_normal((3, 3)))
    W2 = Q @ np.diag([1.0, 2.0, 3.0]) @ Q.T
    T = Q @ np.diag([0.5, 0.2, 0.1]) @ Q.T
    r = make_rigging(3, BanachNorm.lp(2), W2, T)
    np.testing.assert_allclose(r.W1, r.W1.T, atol=1e-14)
    assert not r.is_diagonal


# --- norms and maps ---------------------------------------------------------

def test_norm_examples(ex_rig):
    x = np.array([1.0, 1.0])
    assert norm(ex_rig, x, "B") == 2.0
    assert norm(ex_rig, x, "H2") == pytest.approx(math.sqrt(1.25), rel=1e-15)
    # brute-force sum of weighted squares
    assert norm(ex_rig, x, "H2") ** 2 == pytest.approx(sum(w * v * v for w, v in zip([1, .25], x)))
    for tag in ("B", "H1", "H2", "B-dual"):
        assert norm(ex_rig, np.zeros(2), tag) == 0.0
    assert norm(ex_rig, Functional([0.0, 1.0]), "B-dual") == 1.0
    with pytest.raises(ValueError):
        norm(ex_rig, x, "H3")


@pytest.mark.parametrize("b", [BanachNorm.lp(1), BanachNorm.lp(1.5), BanachNorm.lp(3),
                               BanachNorm.lp(math.inf),
                               BanachNorm.weighted(2.5, [1.0, 3.0]),
                               BanachNorm.weighted(math.inf, [2.0, 0.5])])
def test_dual_norm_against_unit_circle_sup(b):
    X = unit_circle()
    X = X / b(X)
    for f in ([1.0, 0.3], [-0.2, 2.0]):
        f = np.asarray(f)
        brute = np.max(f @ X)
        # polyhedral balls: the grid reaches the maximizing corner only to O(h)
        rel = 1e-4 if b.p in (1, math.inf) else 1e-8
        assert brute <= b.dual(f) * (1 + 1e-12)
        assert b.dual(f) == pytest.approx(brute, rel=rel)
        x = b.maximizer(f)
        assert b(x) == pytest.approx(1.0, rel=1e-12)
        assert x @ f == pytest.approx(b.dual(f), rel=1e-12)
        g = b.norming_functional(f)
        assert b.dual(g) == pytest.approx(1.0, rel=1e-12)
        assert f @ g == pytest.approx(b(f), rel=1e-12)


def test_j_map_examples(ex_rig, id2):
    x = np.array([1.0, 1.0])
    np.testing.assert_array_equal(j_map(id2, [2.0, -1.0], 2).coords, [2.0, -1.0])
    f = j_map(ex_rig, x, 2)
    np.testing.assert_array_equal(f.coords, [1.0, 0.25])
    assert pairing(x, f) == 1.25
    assert norm(ex_rig, x, "H2") ** 2 == pytest.approx(1.25, rel=1e-15)
    with pytest.raises(ValueError):
        j_map(ex_rig, x, 3)


def test_j_inverse_roundtrip():
    r = random_diagonal_rigging(5, 2.5, make_rng(2))
    X = make_rng(9).standard_normal((100, 5))
    for i in (1, 2):
        for x in X:
            np.testing.assert_allclose(j_inverse(r, j_map(r, x, i), i), x,
                                       rtol=0, atol=1e-12 * max(1, np.abs(x).max()))


def test_special_duality_examples(ex_rig, id2):
    x = np.array([1.0, 1.0])
    phi = special_duality(ex_rig, x)
    np.testing.assert_allclose(phi.coords, [3.2, 0.8], rtol=1e-15)
    assert pairing(x, phi) == pytest.approx(4.0, rel=1e-15)
    y = np.array([0.3, -1.7])
    np.testing.assert_allclose(special_duality(id2, y).coords, y, rtol=1e-15)
    np.testing.assert_allclose(special_duality(ex_rig, 2.5 * y).coords,
                               2.5 * special_duality(ex_rig, y).coords, rtol=1e-14)
    with pytest.raises(ValueError):
        special_duality(ex_rig, np.zeros(2))


# --- check_embedding ----------------------------------------------------------

def test_check_embedding_identity():
    rep = check_embedding(identity_rigging(4), 500, 1)
    assert rep.passed
    assert rep.get("duality_dual_norm_ratio_max").value == pytest.approx(1.0, rel=1e-12)
    assert rep.get("duality_dual_norm_ratio_min").value == pytest.approx(1.0, rel=1e-12)


def test_check_embedding_example(ex_rig):
    rep = check_embedding(ex_rig, 10_000, 3)
    assert rep.passed, rep.summary()


def test_check_embedding_corrupted(ex_rig):
    from dataclasses import replace
    bad = replace(ex_rig, W2=4 * ex_rig.W2)
    rep = check_embedding(bad, 1000, 3)
    a = rep.get("h2_le_b")
    assert not a.passed
    x = a.witness["x"]
    assert bad.h2(x) > bad.b_norm(x)


# --- serialization ------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: make_rigging(2, BanachNorm.lp(1), [1.0, 0.25], [0.5, 0.125]),
    lambda: wiener_rigging(6),
    lambda: make_rigging(3, BanachNorm.weighted(math.inf, [1, 2, 3]), [1, 2, 3], [3, 2, 1]),
])
def test_rigging_json_roundtrip(make):
    r = make()
    s = r.to_json()
    r2 = Rigging.from_json(s)
    assert r2.n == r.n and r2.b_norm == r.b_norm
    np.testing.assert_allclose(r2.W1, r.W1, rtol=1e-14)
    np.testing.assert_allclose(r2.W2, r.W2, rtol=1e-14)
    assert tuple(r2.c_scale) == tuple(r.c_scale)
    d = r.to_dict()
    assert set(d) == {"n", "b_norm", "w2", "t12", "c_scale"}


def test_rigging_from_dict_without_constants():
    r = Rigging.from_dict({"n": 2, "b_norm": {"kind": "p", "p": 1},
                           "w2": [4.0, 1.0], "t12": [1.0, 1.0]})
    assert r.c_scale[1] == pytest.approx(0.5)
