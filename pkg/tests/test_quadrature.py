import math

import numpy as np
import pytest

from sigcore import NumericalError
from sigcore.quadrature import integrate_halfline


@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda t: np.exp(-t), 1.0),
        (lambda t: t * np.exp(-t), 1.0),
        (lambda t: 1.0 / (1.0 + t * t), math.pi / 2),
        (lambda t: np.exp(-t) / np.sqrt(np.maximum(t, 1e-300)), math.sqrt(math.pi)),
    ],
    ids=["exp", "gamma2", "cauchy", "inverse-sqrt"],
)
def test_known_integrals(f, exact):
    res = integrate_halfline(f, 1e-10)
    assert res.value == pytest.approx(exact, abs=1e-9)
    assert res.error <= 1e-10


def test_breakpoint_at_kink():
    # indicator-like density with a jump at t = 2
    f = lambda t: np.where(t < 2.0, 0.5, 0.0)
    res = integrate_halfline(f, 1e-12, breakpoints=[2.0])
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_scale_does_not_change_the_answer():
    f = lambda t: 40.0 * np.exp(-40.0 * t)
    for scale in (0.025, 1.0, 10.0):
        assert integrate_halfline(f, 1e-10, scale=scale).value == pytest.approx(1.0, abs=1e-9)


def test_nonconvergence_raises():
    f = lambda t: np.sin(1.0 / np.maximum(t, 1e-300)) / np.maximum(t, 1e-300)
    with pytest.raises(NumericalError):
        integrate_halfline(f, 1e-12, max_intervals=64)


def test_non_finite_integrand_raises():
    with pytest.raises(NumericalError):
        integrate_halfline(lambda t: np.full_like(t, np.nan))


@pytest.mark.parametrize("kw", [{"tol": 0.0}, {"scale": -1.0}])
def test_bad_arguments(kw):
    with pytest.raises(ValueError):
        integrate_halfline(lambda t: np.exp(-t), **kw)
