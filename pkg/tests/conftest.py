import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import j0, j1


def kernel_radial_oracle(n, theta, t, r):
    """Free-space kernel value at radius r by 1-D radial quadrature."""
    if n == 1:
        f = lambda rho: math.exp(-t * rho ** theta) * math.cos(rho * r) / math.pi
    elif n == 2:
        f = lambda rho: math.exp(-t * rho ** theta) * j0(rho * r) * rho / (2 * math.pi)
    elif n == 3:
        if r == 0:
            f = lambda rho: math.exp(-t * rho ** theta) * rho ** 2 / (2 * math.pi ** 2)
        else:
            f = lambda rho: math.exp(-t * rho ** theta) * math.sin(rho * r) * rho / (2 * math.pi ** 2 * r)
    val, _ = integrate.quad(f, 0, np.inf, limit=400)
    return val


def equivariant_fourier_profile(f_of_r, rho, n, rmax=400.0):
    """Radial profile g with FT[f(r) rhat] = i xihat g(rho), by quadrature."""
    if n == 2:
        integrand = lambda r: -2 * math.pi * f_of_r(r) * r * j1(rho * r)
    elif n == 3:
        def j1_spherical(z):
            return math.sin(z) / z ** 2 - math.cos(z) / z if z > 1e-8 else z / 3.0
        integrand = lambda r: -4 * math.pi * f_of_r(r) * r ** 2 * j1_spherical(rho * r)
    val, _ = integrate.quad(integrand, 0, rmax, limit=400)
    return val


def poisson_product_profile(n):
    """Closed radial profile f with P grad psi[P](1, y) = f(|y|) yhat."""
    if n == 2:
        def f(r):
            if r == 0:
                return 0.0
            P = (1.0 / (2 * math.pi)) * (1 + r * r) ** (-1.5)
            enclosed = 1.0 - (1 + r * r) ** (-0.5)
            return -P * enclosed / (2 * math.pi * r)
        return f
    if n == 3:
        def f(r):
            if r == 0:
                return 0.0
            P = math.pi ** (-2) * (1 + r * r) ** (-2)
            enclosed = (2.0 / math.pi) * (math.atan(r) - r / (1 + r * r))
            return -P * enclosed / (4 * math.pi * r * r)
        return f
    raise ValueError(n)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
