"""Shared brute-force oracles for the test suite.

The oracles integrate on a transformed axis t with s = 1 - 2^-t, which
resolves integrands that concentrate at s = 1, and stay independent of the
package's quadrature code (plain Simpson sums over dense grids).
"""

import math

import numpy as np
import pytest
from scipy.integrate import simpson


def graded_integral(fn, t_max=96.0, n=96_001, lo=0.0):
    """Brute-force integral of fn(s, 1-s) over [lo, 1).

    Uses s = lo + (1-lo)(1 - 2^-t); the callback receives 1-s through the
    exact formula (1-lo) 2^-t so that boundary singularities keep full
    precision far beyond where 1.0 - s would round away.
    """
    t = np.linspace(0.0, t_max, n)
    decay = np.exp(t * (-math.log(2.0)))
    u = (1.0 - lo) * decay
    s = 1.0 - u
    jac = (1.0 - lo) * math.log(2.0) * decay
    return float(simpson(fn(s, u) * jac, x=t))


def left_graded_integral(fn, hi=0.5, t_max=80.0, n=48_001):
    """Brute-force integral of fn(s, 1-s) over [0, hi], graded toward 0.

    Uses s = hi * 2^-t so fractional powers of s stay smooth on the
    transformed axis.
    """
    t = np.linspace(0.0, t_max, n)
    s = hi * np.exp(t * (-math.log(2.0)))
    return float(simpson(fn(s, 1.0 - s) * math.log(2.0) * s, x=t))


def two_sided_integral(fn):
    """Brute-force integral over [0, 1) graded toward both endpoints."""
    return left_graded_integral(fn) + graded_integral(fn, lo=0.5)


def oracle_std_tail(alpha, r):
    return graded_integral(lambda s, u: (alpha + 1.0) * (u * (2.0 - u)) ** alpha, lo=r)


def oracle_std_moment(alpha, x):
    return two_sided_integral(lambda s, u: s**x * (alpha + 1.0) * (u * (2.0 - u)) ** alpha)


def oracle_log_moment(alpha, x, t_max=46.0):
    """Brute-force moment of the log-family weight.

    The graded sum misses the (slowly decaying) mass at 1 - s < 2^-t_max;
    that piece is added analytically: for u -> 0 the weight behaves like
    (2u)^-1 (1 - log(2u))^-alpha whose tail integral is closed-form.
    """

    def density(s, u):
        one_minus_sq = u * (2.0 - u)
        return s**x / one_minus_sq * (1.0 - np.log(one_minus_sq)) ** (-alpha)

    body = graded_integral(density, t_max=t_max, n=96_001)
    u0 = 2.0**-t_max
    correction = ((1.0 - math.log(2.0)) - math.log(u0)) ** (1.0 - alpha) / (2.0 * (alpha - 1.0))
    return body + correction


def oracle_exp_tail(c, gamma, r):
    def density(s, u):
        with np.errstate(over="ignore", divide="ignore"):
            e = -c / u**gamma
        return np.where(e < -700, 0.0, np.exp(np.maximum(e, -700)))

    return graded_integral(density, lo=r)


def oracle_parseval_mean(coeffs, r):
    """sqrt(sum |c_n|^2 r^(2n)): the p = 2 integral mean of a polynomial."""
    coeffs = np.asarray(coeffs, dtype=complex)
    powers = r ** (2.0 * np.arange(len(coeffs)))
    return math.sqrt(float(np.sum(np.abs(coeffs) ** 2 * powers)))


def oracle_circle_values(coeffs, r, q):
    """Direct Horner evaluation of the polynomial at the q-th roots of unity."""
    angles = 2.0 * np.pi * np.arange(q) / q
    points = r * np.exp(1j * angles)
    return np.polynomial.polynomial.polyval(points, np.asarray(coeffs, dtype=complex))


def oracle_beta_odd_moment(n, beta):
    """mu_{2n+1} for the standard weight of exponent beta, via log-Gamma."""
    return math.exp(
        math.lgamma(n + 1.0) + math.lgamma(beta + 1.0) - math.lgamma(n + beta + 1.0)
    ) / 2.0


@pytest.fixture(scope="session")
def std0():
    from bergweight import StandardWeight

    return StandardWeight(0.0)


@pytest.fixture(scope="session")
def std1():
    from bergweight import StandardWeight

    return StandardWeight(1.0)


@pytest.fixture(scope="session")
def log2w():
    from bergweight import LogWeight

    return LogWeight(2.0)


@pytest.fixture(scope="session")
def exp11():
    from bergweight import ExponentialWeight

    return ExponentialWeight(1.0, 1.0)
