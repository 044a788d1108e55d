import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from coordrepr.losses import cross_entropy, entropy, grad_check, kl_divergence, mse, softmax

finite = st.floats(-20, 20, allow_nan=False)


def test_softmax_examples():
    np.testing.assert_allclose(softmax(np.zeros(4)), [0.25] * 4, rtol=0, atol=1e-15)
    # scalar oracle: e^{ln 2} / (e^{ln 2} + 1 + 1)
    e = math.exp(math.log(2))
    want = [e / (e + 2), 1 / (e + 2), 1 / (e + 2)]
    np.testing.assert_allclose(softmax([math.log(2), 0, 0]), want, rtol=1e-15)
    np.testing.assert_allclose(want, [0.5, 0.25, 0.25], rtol=1e-15)


@given(arrays(float, st.integers(1, 40), elements=finite), st.floats(-500, 500))
def test_softmax_shift_invariant_and_normalised(z, c):
    p = softmax(z)
    assert (p > 0).all()
    assert abs(p.sum() - 1) < 1e-12
    np.testing.assert_allclose(softmax(z + c), p, rtol=1e-9, atol=1e-300)


def test_softmax_no_overflow():
    p = softmax([1000.0, 0.0])
    assert np.isfinite(p).all() and p[0] == pytest.approx(1.0)


def test_cross_entropy_examples():
    t = np.zeros(16); t[3] = 1
    assert cross_entropy(np.zeros(16), t).value == pytest.approx(math.log(16), abs=1e-12)
    q = 0.9 * t + 0.1 / 16
    assert cross_entropy(np.zeros(16), q).value == pytest.approx(math.log(16), abs=1e-12)
    t4 = np.array([1.0, 0, 0, 0])
    np.testing.assert_allclose(cross_entropy(np.zeros(4), t4).grad, [-0.75, 0.25, 0.25, 0.25])


def test_shape_mismatch():
    for fn in (cross_entropy, kl_divergence, mse):
        with pytest.raises(ValueError):
            fn(np.zeros(3), np.zeros(4))


def test_kl_examples():
    t = np.array([0.1, 0.2, 0.3, 0.4])
    assert abs(kl_divergence(np.log(t), t).value) < 1e-12
    oh = np.zeros(16); oh[0] = 1
    # KL = CE - H(target) = ln 16 - 0
    assert kl_divergence(np.zeros(16), oh).value == pytest.approx(math.log(16) - 0.0, abs=1e-12)


@given(arrays(float, 12, elements=finite), arrays(float, 12, elements=st.floats(0, 1)))
def test_kl_non_negative_and_identity(z, w):
    if w.sum() == 0:
        w[0] = 1.0
    t = w / w.sum()
    kl = kl_divergence(z, t)
    ce = cross_entropy(z, t)
    assert kl.value >= -1e-12
    assert kl.value == pytest.approx(ce.value - entropy(t), abs=1e-9)
    np.testing.assert_array_equal(kl.grad, ce.grad)


def test_ce_one_hot_is_neg_log_prob():
    rng = np.random.default_rng(0)
    z = rng.normal(size=10)
    t = np.zeros(10); t[6] = 1
    assert cross_entropy(z, t).value == pytest.approx(-math.log(softmax(z)[6]), rel=1e-12)


def test_mse_examples():
    p = np.arange(6.0).reshape(2, 3)
    l = mse(p, p)
    assert l.value == 0 and not l.grad.any()
    assert mse(p + 1, p).value == 1.0
    l = mse([1.0, 0.0], [0.0, 0.0])
    assert l.value == 0.5
    np.testing.assert_array_equal(l.grad, [1.0, 0.0])


def test_grad_check_examples():
    rng = np.random.default_rng(4)
    t = rng.dirichlet(np.ones(32))
    assert grad_check("ce", rng.normal(size=32), t, 1e-5) < 1e-6
    assert grad_check("kl", rng.normal(size=32), t, 1e-5) < 1e-6
    assert grad_check("mse", rng.normal(size=(8, 8)), rng.normal(size=(8, 8)), 1e-5) < 1e-8


def test_grad_check_catches_wrong_gradient():
    from coordrepr.losses import LossValue

    def bad(x, t):
        return LossValue(float(np.sum(x**2)), x)  # true gradient is 2x

    assert grad_check(bad, np.ones(3), None) > 0.4
