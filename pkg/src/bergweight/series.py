"""Truncated Taylor series on the unit disc and coefficient-multiplier operators.

A series is a finite coefficient vector; every "analytic function" claim in
this package is exercised on polynomials.  Three derivative-type operators
act coefficientwise:

* ``frac_deriv_mu``       c_n -> c_n / mu_{2n+1}   (odd moments of a weight)
* ``frac_deriv_beta``     c_n -> (2 / Gamma(b+1)) * Gamma(n+b+1)/Gamma(n+1) * c_n
* ``multiplier_transform``  c_n -> (n+1)^b * c_n

The first two coincide when mu is the standard weight b*(1-s^2)^(b-1); both
apply the n = 0 term through the same formula even though classical
presentations sometimes start the Gamma-quotient sum at n = 1.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, QuadratureError
from .weights import StandardWeight, dhat_verdict

DEFAULT_DEGREE = 1024


class TaylorSeries:
    """Coefficients c_0..c_N of a polynomial / truncated analytic function."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coefficients must form a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise DomainError("coefficients must be finite")
        self.coeffs = arr.copy()

    @classmethod
    def monomial(cls, n, c=1.0):
        if n < 0:
            raise DomainError(f"monomial degree must be >= 0, got {n}")
        arr = np.zeros(n + 1, dtype=complex)
        arr[n] = c
        return cls(arr)

    @classmethod
    def constant(cls, c):
        return cls([c])

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, n):
        return complex(self.coeffs[n]) if 0 <= n < len(self.coeffs) else 0.0j

    @property
    def degree(self):
        """Largest index with a nonzero coefficient; -1 for the zero series."""
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else -1

    @property
    def is_zero(self):
        return self.degree < 0

    def support(self):
        return np.nonzero(self.coeffs)[0]

    def padded(self, n):
        if n < len(self.coeffs):
            return self.coeffs[: n].copy()
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __add__(self, other):
        n = max(len(self), len(other))
        return TaylorSeries(self.padded(n) + other.padded(n))

    def __mul__(self, scalar):
        return TaylorSeries(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"<TaylorSeries deg={self.degree} len={len(self)}>"


def _multiplied(f, multipliers):
    return TaylorSeries(f.coeffs * np.asarray(multipliers))


def odd_moments(mu, max_n):
    """mu_{2n+1} for n = 0..max_n, via the Beta identity for standard weights."""
    n = np.arange(max_n + 1)
    if isinstance(mu, StandardWeight):
        a = mu.alpha + 1.0
        return mu.amplitude * (a / 2.0) * np.exp(betaln_vec(n + 1.0, a))
    return np.array([mu.moment(2.0 * k + 1.0) for k in n])


def betaln_vec(a, b):
    return gammaln(a) + gammaln(b) - gammaln(a + b)


def frac_deriv_mu(f, mu, check=True):
    """Divide coefficient n by the odd moment mu_{2n+1} of the weight ``mu``.

    ``check`` screens ``mu`` against the upper-doubling diagnostic (the
    operator is classically well defined for such weights); pass
    ``check=False`` to override.
    """
    if check and dhat_verdict(mu) == "out":
        raise DomainError(
            f"weight {mu.label} looks outside the upper-doubling class; "
            "pass check=False to apply the derivative anyway"
        )
    moments = odd_moments(mu, len(f) - 1)
    bad = np.nonzero(~(moments > 0.0) | ~np.isfinite(moments))[0]
    if bad.size:
        raise QuadratureError(
            f"odd moment mu_{{2n+1}} of {mu.label} vanished numerically at n = {int(bad[0])}",
            residual=float(moments[bad[0]]),
        )
    return _multiplied(f, 1.0 / moments)


def frac_deriv_beta(f, beta):
    """Gamma-quotient fractional derivative of order ``beta`` > 0."""
    if not (beta > 0.0) or not math.isfinite(beta):
        raise DomainError(f"order must be positive, got {beta!r}")
    n = np.arange(len(f), dtype=float)
    log_mult = math.log(2.0) + gammaln(n + beta + 1.0) - gammaln(n + 1.0) - gammaln(beta + 1.0)
    return _multiplied(f, np.exp(log_mult))


def multiplier_transform(f, beta):
    """Coefficient multiplier (n+1)^beta."""
    if not (beta > 0.0) or not math.isfinite(beta):
        raise DomainError(f"order must be positive, got {beta!r}")
    n = np.arange(len(f), dtype=float)
    return _multiplied(f, (n + 1.0) ** beta)


def hadamard(w, f):
    """Coefficientwise product; the shorter support wins."""
    n = min(len(w), len(f))
    return TaylorSeries(w.coeffs[:n] * f.coeffs[:n])


def evaluate_circle(f, r, q):
    """Values f(r e^{2 pi i j/q}), j = 0..q-1, via an FFT at roots of unity."""
    if q < 1:
        raise DomainError(f"sample count must be >= 1, got {q}")
    if not (0.0 <= r <= 1.0):
        raise DomainError(f"radius must lie in [0, 1], got {r!r}")
    scaled = f.coeffs * (r ** np.arange(len(f)))
    folded = np.zeros(q, dtype=complex)
    np.add.at(folded, np.arange(len(f)) % q, scaled)
    return np.fft.ifft(folded) * q


def circle_power_means(coeffs, radii, p, q):
    """mean_j |f(r e^{2 pi i j/q})|^p for each radius, batched over radii.

    This is the workhorse behind the norm computations: one scaled
    coefficient matrix per radius block, one batched FFT, one power mean.
    """
    import scipy.fft

    coeffs = np.asarray(coeffs, dtype=complex)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    n = len(coeffs)
    out = np.empty(radii.size, dtype=float)
    # keep each FFT batch under ~2^22 complex entries
    chunk = max(1, (1 << 22) // max(q, 1))
    powers = np.arange(n)
    absc = np.abs(coeffs)
    for start in range(0, radii.size, chunk):
        rr = radii[start : start + chunk]
        # r^0..r^(n-1) per radius via cumulative products
        scal = np.ones((rr.size, n))
        if n > 1:
            scal[:, 1:] = rr[:, None]
            np.cumprod(scal, axis=1, out=scal)
        # normalize each row to O(1): tiny r^n would otherwise square into
        # denormals inside |values|^2 and turn the means into noise
        rowmax = np.max(scal * absc[None, :], axis=1)
        # below ~1e-290 the cumulative products have already saturated in
        # denormal territory (r^n sticks at 5e-324); those means are not
        # representable and flush to exact zero
        dead = rowmax < 1e-290
        rowmax = np.where(dead, 1.0, rowmax)
        mat = coeffs[None, :] * (scal / rowmax[:, None])
        folded = np.zeros((rr.size, q), dtype=complex)
        if n <= q:
            folded[:, :n] = mat
        else:
            np.add.at(folded.T, powers % q, mat.T)
        values = scipy.fft.ifft(folded, axis=1, workers=-1, overwrite_x=True)
        mag2 = values.real**2 + values.imag**2
        means = np.mean(_half_power(mag2, 0.5 * p), axis=1)
        out[start : start + chunk] = np.where(
            dead, 0.0, means * (float(q) * rowmax) ** p
        )
    return out


def _half_power(mag2, half_p):
    """mag2 ** half_p with cheap paths for the common exponents."""
    if half_p == 1.0:
        return mag2
    if half_p == 0.5:
        return np.sqrt(mag2)
    if half_p == 0.25:
        return np.sqrt(np.sqrt(mag2))
    if half_p == 2.0:
        return mag2 * mag2
    frac, whole = math.modf(half_p)
    if frac == 0.0 and whole <= 8:
        return mag2 ** int(whole)
    if frac == 0.5 and whole <= 8:
        return mag2 ** int(whole) * np.sqrt(mag2)
    return mag2**half_p


# ---------------------------------------------------------------------------
# named families and CSV io


def parse_series_spec(text, default_degree=DEFAULT_DEGREE):
    """Named test functions: ``monomial:n``, ``geometric:lam,s``, ``lacunary:k,N``.

    ``geometric:lam,s`` is the binomial series of (1 - lam z)^(-s) truncated
    at ``default_degree``; ``lacunary:k,N`` is the sum of z^(k^j) up to N.
    """
    text = text.strip()
    name, _, params = text.partition(":")
    args = [a for a in params.split(",") if a != ""]
    if name == "monomial" and len(args) == 1:
        try:
            n = int(args[0])
        except ValueError:
            raise DomainError(f"bad monomial degree in {text!r}") from None
        return TaylorSeries.monomial(n)
    if name == "geometric" and len(args) == 2:
        try:
            lam, s = float(args[0]), float(args[1])
        except ValueError:
            raise DomainError(f"bad geometric parameters in {text!r}") from None
        if not (0.0 < lam < 1.0) or not (s > 0.0):
            raise DomainError(f"geometric family needs 0 < lam < 1 and s > 0, got {text!r}")
        return geometric_series(lam, s, default_degree)
    if name == "lacunary" and len(args) == 2:
        try:
            k, n_max = int(args[0]), int(args[1])
        except ValueError:
            raise DomainError(f"bad lacunary parameters in {text!r}") from None
        if k < 2 or n_max < 1:
            raise DomainError(f"lacunary family needs k >= 2 and N >= 1, got {text!r}")
        return lacunary_series(k, n_max)
    raise DomainError(f"cannot parse series spec {text!r}")


def geometric_series(lam, s, degree):
    """Truncated binomial expansion of (1 - lam z)^(-s)."""
    n = np.arange(degree + 1, dtype=float)
    log_c = gammaln(n + s) - gammaln(s) - gammaln(n + 1.0)
    return TaylorSeries(np.exp(log_c + n * math.log(lam)).astype(complex))


def lacunary_series(k, n_max):
    """Sum of z^(k^j) over the powers k^j <= n_max."""
    idx = []
    power = 1
    while power <= n_max:
        idx.append(power)
        power *= k
    arr = np.zeros(max(idx) + 1, dtype=complex)
    arr[idx] = 1.0
    return TaylorSeries(arr)


def write_series_csv(f, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n,re,im\n")
        for n, c in enumerate(f.coeffs):
            fh.write(f"{n},{float(c.real)!r},{float(c.imag)!r}\n")


def read_series_csv(path):
    coeffs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.lower().startswith("n,"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DomainError(f"{path}:{line_no}: expected 'n,re,im', got {line!r}")
            try:
                n = int(parts[0])
                coeffs[n] = complex(float(parts[1]), float(parts[2]))
            except ValueError:
                raise DomainError(f"{path}:{line_no}: non-numeric entry in {line!r}") from None
    if not coeffs:
        raise DomainError(f"{path}: no coefficients found")
    arr = np.zeros(max(coeffs) + 1, dtype=complex)
    for n, c in coeffs.items():
        arr[n] = c
    return TaylorSeries(arr)
