import numpy as np
import pytest

from hbinterp.errors import OrderExceededError, UnknownFunctionError
from hbinterp.multiindex import indices_up_to
from hbinterp.testfunctions import BUILTINS, builtin, central_difference, derivative_check, polynomial


def test_constant():
    f = builtin("constant", 2, c=5.0)
    assert f([0.3, -0.2]) == 5.0
    assert f.derivative([0.3, -0.2], (1, 0)) == 0.0
    assert f.derivative([0.3, -0.2], (1, 1)) == 0.0


def test_linear():
    f = builtin("linear", 2, a=[2.0, 3.0], b=1.0)
    assert f.derivative(np.random.default_rng(0).normal(size=(5, 2)), (1, 0)).tolist() == [2.0] * 5
    assert f([1.0, 1.0]) == 6.0


def test_gaussian_second_partial_at_origin():
    # d2/dx2 exp(-x^2 - y^2) at 0 is -2
    assert builtin("gaussian", 2, c=1.0).derivative([0.0, 0.0], (2, 0)) == pytest.approx(-2.0)


def test_trig_product_hand_values():
    f = builtin("trig-product", 2)
    x, y = 0.3, -0.4
    assert f([x, y]) == pytest.approx(np.cos(x) * np.cos(y))
    assert f.derivative([x, y], (1, 1)) == pytest.approx(np.sin(x) * np.sin(y))
    assert f.derivative([x, y], (3, 0)) == pytest.approx(np.sin(x) * np.cos(y))


def test_unknown_name():
    with pytest.raises(UnknownFunctionError):
        builtin("bessel", 2)


def test_order_exceeded():
    f = builtin("gaussian", 2)
    with pytest.raises(OrderExceededError):
        f.derivative([0, 0], (5, 0))
    with pytest.raises(OrderExceededError):
        derivative_check(f, [0.0, 0.0], (3, 2), 1e-4)


def test_derivative_check_examples():
    v = np.array([0.2, -0.1])
    assert derivative_check(builtin("constant", 2), v, (1, 0), 1e-4) <= 1e-12
    assert derivative_check(builtin("linear", 2), v, (0, 1), 1e-4) <= 1e-10
    g = builtin("gaussian", 2)
    r1 = derivative_check(g, v, (1, 1), 1e-4)
    r2 = derivative_check(g, v, (1, 1), 5e-5)
    assert 3.0 <= r1 / r2 <= 5.0


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_builtins_pass_derivative_check(name, m):
    f = builtin(name, m)
    pts = np.random.default_rng(m).uniform(-0.6, 0.6, (100, m))
    worst = 0.0
    for beta in indices_up_to(m, f.max_order):
        for v in pts:
            worst = max(worst, derivative_check(f, v, beta, 1e-5))
    assert worst <= 1e-6


def test_mixed_partials_symmetric():
    f = builtin("quadratic", 2)
    g = builtin("gaussian", 3, c=0.7)
    v2, v3 = np.array([0.1, 0.4]), np.array([0.1, -0.3, 0.2])
    assert f.derivative(v2, (1, 1)) == f.derivative(v2, (1, 1))
    # direct full-order central difference of the function values
    assert central_difference(f, v2, (1, 1), 1e-3) == pytest.approx(f.derivative(v2, (1, 1)), abs=1e-8)
    assert central_difference(g, v3, (1, 0, 1), 1e-3) == pytest.approx(
        g.derivative(v3, (1, 0, 1)), abs=1e-5)


def test_polynomial_partials():
    p = polynomial(2, {(2, 1): 3.0, (0, 0): 1.0})
    assert p.degree == 3
    # d/dx 3x^2 y = 6xy ; d2/dxdy = 6x
    assert p.derivative([2.0, 5.0], (1, 0)) == 60.0
    assert p.derivative([2.0, 5.0], (1, 1)) == 12.0
    assert p.derivative([2.0, 5.0], (3, 0)) == 0.0
