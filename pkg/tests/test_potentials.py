import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from dimred.errors import UnsupportedOperationError
from dimred.potentials import make_hard_sphere, make_smooth_step, make_species_table, sphere_area


def test_hard_sphere_values():
    u = make_hard_sphere(1.0)
    assert u(0.5) == 0 and u(2.0) == 1 and u(1.0) == 1
    assert make_hard_sphere(0.5)(0.26) == 1
    with pytest.raises(UnsupportedOperationError):
        u.derivative(1.0)
    with pytest.raises(ValueError):
        make_hard_sphere(0.0)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.5, 0.9])
def test_smooth_step_endpoints_and_integral(eps):
    u = make_smooth_step(eps)
    assert u(0.0) == 0.0 and u(4.0) == 1.0
    total, _ = integrate.quad(u.derivative, 0.0, 4.0, points=u.kinks, epsabs=1e-13)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_smooth_step_approaches_hard_step():
    prev = None
    for eps in (0.5, 0.4, 0.2, 0.1):
        u = make_smooth_step(eps)
        gap = abs(u(0.5) - 0.0) + abs(u(2.0) - 1.0)
        assert prev is None or gap <= prev
        prev = gap
    assert prev == 0.0


@pytest.mark.parametrize("eps", [-0.1, 0.0, 1.0, 2.0])
def test_smooth_step_rejects_bad_width(eps):
    with pytest.raises(ValueError):
        make_smooth_step(eps)


POTENTIALS = [make_hard_sphere(1.0), make_hard_sphere(0.7), make_smooth_step(0.1),
              make_smooth_step(0.6)]


@pytest.mark.parametrize("u", POTENTIALS)
def test_range_and_monotone_on_grid(u):
    t = np.linspace(0.0, 100.0, 1000)
    v = u(t)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) >= 0)


@given(st.floats(0, 100), st.floats(0, 100), st.sampled_from(POTENTIALS))
def test_monotone_pairs(t1, t2, u):
    lo, hi = min(t1, t2), max(t1, t2)
    assert u(lo) <= u(hi)


def _fd_error(eps, h=1e-4):
    u = make_smooth_step(eps)
    lo, hi = u.kinks
    t = np.concatenate([np.linspace(0.0, lo - 2 * h, 50), np.linspace(lo + 2 * h, hi - 2 * h, 200),
                        np.linspace(hi + 2 * h, 3.0, 50)])
    fd = (u(t + h) - u(t - h)) / (2 * h)
    return np.max(np.abs(fd - u.derivative(t)))


@pytest.mark.parametrize("eps", [0.3, 0.5, 0.9])
def test_derivative_matches_central_difference(eps):
    assert _fd_error(eps) < 1e-6


def test_narrow_ramp_difference_error_is_truncation():
    # |U'''| <= 60 / w^3 on a ramp of width w, so h^2/6 of that bounds the error
    w, h = 0.2, 1e-4
    bound = h * h / 6 * 60 / w ** 3 + 1e-11
    assert 1e-6 < _fd_error(0.1, h) <= bound
    assert _fd_error(0.1, h / 10) < 1e-6


def test_species_tables():
    one = make_species_table([[1.0]], [1.0])
    assert one.potential(0, 0) == make_hard_sphere(1.0)
    two = make_species_table([[1.0, 0.75], [0.75, 0.5]], [1.0, 2.0])
    assert two.radius(0, 1) == two.radius(1, 0) == 0.75
    assert two.activities == (1.0, 2.0)
    wr = make_species_table([[1e-6, 1.0], [1.0, 1e-6]], [1.0, 1.0])
    assert wr.potential(0, 0)(1e-11) == 1.0 and wr.potential(0, 1)(0.5) == 0.0
    with pytest.raises(ValueError):
        make_species_table([[1.0, 0.5], [0.75, 1.0]], [1.0, 1.0])


def test_sphere_area():
    assert sphere_area(3, 1.0) == pytest.approx(4 * np.pi)
    assert sphere_area(2, 2.0) == pytest.approx(4 * np.pi)
