import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from banach_adjoint import (BanachNorm, Operator, adjoint, j_map, make_rigging,
                            norm, operator_metric, pairing, special_duality)

finite = st.floats(-10, 10, allow_nan=False, allow_subnormal=False)
positive = st.floats(0.05, 20, allow_nan=False)
exponent = st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf])


@st.composite
def riggings(draw, n=None):
    n = draw(st.integers(1, 6)) if n is None else n
    w2 = draw(arrays(float, n, elements=positive))
    t12 = draw(arrays(float, n, elements=st.floats(0.01, 1.0)))
    return make_rigging(n, BanachNorm.lp(draw(exponent)), w2, t12)


@st.composite
def rig_vectors(draw, k=1):
    r = draw(riggings())
    xs = [draw(arrays(float, r.n, elements=finite)) for _ in range(k)]
    return (r, *xs)


@st.composite
def rig_operators(draw):
    r = draw(riggings())
    M = draw(arrays(float, (r.n, r.n), elements=finite))
    x = draw(arrays(float, r.n, elements=finite))
    y = draw(arrays(float, r.n, elements=finite))
    return r, Operator(r, M), x, y


@settings(max_examples=200, deadline=None)
@given(rig_vectors(k=2), finite, finite)
def test_j_linear(data, a, b):
    r, x, y = data
    for i in (1, 2):
        lhs = j_map(r, a * x + b * y, i).coords
        rhs = a * j_map(r, x, i).coords + b * j_map(r, y, i).coords
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(rig_vectors())
def test_special_duality_pairing(data):
    r, x = data
    nb = norm(r, x, "B")
    if nb < 1e-6:
        return
    assert pairing(x, special_duality(r, x)) == pytest.approx(nb ** 2, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(rig_vectors())
def test_norm_ordering(data):
    r, x = data
    h2, b, h1 = (norm(r, x, s) for s in ("H2", "B", "H1"))
    assert h2 <= b * (1 + 1e-12) + 1e-300
    assert b <= h1 * (1 + 1e-12) + 1e-300


@settings(max_examples=200, deadline=None)
@given(rig_operators())
def test_adjoint_identity(data):
    r, A, x, y = data
    lhs = (A.M @ x) @ r.W2 @ y
    rhs = x @ r.W1 @ (adjoint(A).M @ y)
    # max-abs products: squaring tiny entries would underflow the scale
    amax = [np.abs(v).max() for v in (r.W1, r.W2, A.M, x, y)]
    scale = r.n ** 3 * max(amax[0], amax[1]) * amax[2] * amax[3] * amax[4]
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(rig_operators())
def test_gram_positive_in_h1(data):
    # (A*A x, x)_{H1} = ‖Ax‖_{H2}^2 >= 0 in every rigging
    r, A, x, _ = data
    AtA = adjoint(A) @ A
    q = x @ r.W1 @ (AtA.M @ x)
    ax = norm(r, A.M @ x, "H2") ** 2
    assert q == pytest.approx(ax, rel=1e-10, abs=1e-10 * max(1.0, np.linalg.norm(AtA.M)))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_metric_symmetric(data):
    r = data.draw(riggings())
    M1 = data.draw(arrays(float, (r.n, r.n), elements=finite))
    M2 = data.draw(arrays(float, (r.n, r.n), elements=finite))
    A, B = Operator(r, M1), Operator(r, M2)
    assert operator_metric(A, B) == operator_metric(B, A)
    assert operator_metric(A, A) == 0.0
