r"""Modified Bessel functions of integer order 0 and 1, plus exponentially scaled forms.

The flow solutions only need :math:`I_0, I_1, K_0, K_1` and a few derivatives,
but they need them at arguments up to :math:`1/\lambda_1 \sim 10^3`, where the
unscaled values overflow.  Every function therefore comes with a scaled twin:

.. math::
    \hat I_\nu(z) = e^{-z} I_\nu(z), \qquad \hat K_\nu(z) = e^{z} K_\nu(z).

Evaluation strategy
-------------------
* ``I``: ascending power series (all terms positive, so no cancellation) for
  ``z <= 25``; Hankel asymptotic expansion above that, where the smallest
  term of the divergent series is already below ``1e-21``.
* ``K``: logarithmic ascending series for ``z <= 2``; trapezoidal rule on the
  integral :math:`e^z K_\nu(z) = \int_0^\infty e^{-z(\cosh t - 1)}\cosh(\nu t)\,dt`
  for ``2 < z <= 25`` (the integrand is entire, so the trapezoid rule converges
  geometrically); asymptotic expansion above 25.

All functions accept scalars or arrays and return the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "BesselValue",
    "bessel_value",
    "i0",
    "i1",
    "k0",
    "k1",
    "i0_scaled",
    "i1_scaled",
    "k0_scaled",
    "k1_scaled",
    "i0_prime",
    "i1_prime",
    "i0_second",
    "i1_prime_scaled",
    "i0_second_scaled",
    "i0_decayed",
    "i1_decayed",
    "i_over_pow_decayed",
]

_SERIES_MAX = 25.0
_K_SERIES_MAX = 2.0
_EULER_GAMMA = 0.57721566490153286061
_REL_STOP = 1e-17
_LD_STOP = 1e-21
_TRAP_STEP = 0.05


def _check(z, *, positive=False):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise DomainError("K_nu requires z > 0 (logarithmic singularity at 0)")
    elif np.any(arr < 0.0):
        raise DomainError("Bessel argument must be nonnegative")
    return arr


def _ret(out):
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# I_n(z) / z^n, optionally scaled by e^{-z}; n in {0, 1, 2, 3}
# --------------------------------------------------------------------------

def _i_series_over_pow(n, z, stop=_REL_STOP):
    """sum_k (z^2/4)^k / (k! (n+k)!) / 2^n  ==  I_n(z) / z^n (in the dtype of z)."""
    q = z * z / 4
    term = np.full_like(z, 1.0 / (2.0**n * _factorial(n)))
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + n))
        total += term
        if np.all(term <= stop * total) or k > 200:
            break
    return total


def _factorial(n):
    out = 1.0
    for j in range(2, n + 1):
        out *= j
    return out


def _hankel_sum(n, z, sign):
    """sum_k sign^k a_k(n) / z^k for the I (sign=-1) and K (sign=+1) expansions."""
    mu = 4.0 * n * n
    term = np.ones_like(z)
    total = term.copy()
    for k in range(1, 60):
        term = term * sign * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        total += term
        if np.all(np.abs(term) <= _REL_STOP * np.abs(total)):
            break
    return total


def _iv_over_pow_scaled(n, z):
    """e^{-z} I_n(z) / z^n for integer n in 0..3 (finite at z = 0)."""
    out = np.empty_like(z)
    small = z <= _SERIES_MAX
    if np.any(small):
        zs = z[small]
        out[small] = _i_series_over_pow(n, zs) * np.exp(-zs)
    if np.any(~small):
        zl = z[~small]
        out[~small] = _hankel_sum(n, zl, -1.0) / np.sqrt(2.0 * np.pi * zl) / zl**n
    return out


def _iv_scaled(n, z):
    return _iv_over_pow_scaled(n, z) * z**n


def _iv(n, z):
    out = np.empty_like(z)
    small = z <= _SERIES_MAX
    if np.any(small):
        zs = z[small]
        out[small] = _i_series_over_pow(n, zs) * zs**n
    if np.any(~small):
        zl = z[~small]
        with np.errstate(over="ignore"):
            out[~small] = _hankel_sum(n, zl, -1.0) / np.sqrt(2.0 * np.pi * zl) * np.exp(zl)
    return out


# --------------------------------------------------------------------------
# K_0, K_1
# --------------------------------------------------------------------------

def _k_series(n, z):
    q = 0.25 * z * z
    log_half = np.log(0.5 * z)
    if n == 0:
        term = np.ones_like(z)
        harmonic = 0.0
        total = np.zeros_like(z)
        for k in range(1, 60):
            term = term * q / (k * k)
            harmonic += 1.0 / k
            total += harmonic * term
            if np.all(term * harmonic <= _REL_STOP * np.abs(total)):
                break
        return -(log_half + _EULER_GAMMA) * _iv(0, z) + total
    # n == 1: psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
    term = np.ones_like(z)
    h_k = 0.0
    total = (-2.0 * _EULER_GAMMA + 1.0) * term
    for k in range(1, 60):
        term = term * q / (k * (k + 1))
        h_k += 1.0 / k
        weight = -2.0 * _EULER_GAMMA + 2.0 * h_k + 1.0 / (k + 1)
        total += weight * term
        if np.all(np.abs(weight * term) <= _REL_STOP * np.abs(total)):
            break
    return 1.0 / z + log_half * _iv(1, z) - 0.25 * z * total


def _k_trapezoid_scaled(n, z):
    """e^z K_n(z) from the cosh-integral, trapezoid rule on a fixed step."""
    t_max = np.arccosh(1.0 + 45.0 / z.min())
    t = np.arange(0.0, t_max + _TRAP_STEP, _TRAP_STEP)
    weights = np.full(t.shape, _TRAP_STEP)
    weights[0] *= 0.5
    integrand = np.exp(-np.multiply.outer(z, np.cosh(t) - 1.0))
    if n:
        integrand = integrand * np.cosh(n * t)
    return integrand @ weights


def _kv_scaled(n, z):
    out = np.empty_like(z)
    low = z <= _K_SERIES_MAX
    high = z > _SERIES_MAX
    mid = ~(low | high)
    if np.any(low):
        zs = z[low]
        out[low] = _k_series(n, zs) * np.exp(zs)
    if np.any(mid):
        out[mid] = _k_trapezoid_scaled(n, z[mid])
    if np.any(high):
        zh = z[high]
        out[high] = _hankel_sum(n, zh, 1.0) * np.sqrt(0.5 * np.pi / zh)
    return out


def _kv(n, z):
    out = np.empty_like(z)
    low = z <= _K_SERIES_MAX
    if np.any(low):
        out[low] = _k_series(n, z[low])
    if np.any(~low):
        zh = z[~low]
        out[~low] = _kv_scaled(n, zh) * np.exp(-zh)
    return out


# --------------------------------------------------------------------------
# public surface
# --------------------------------------------------------------------------

def i0(z):
    """Modified Bessel function of the first kind, order 0."""
    return _ret(_iv(0, _check(z)))


def i1(z):
    """Modified Bessel function of the first kind, order 1."""
    return _ret(_iv(1, _check(z)))


def k0(z):
    """Modified Bessel function of the second kind, order 0 (z > 0)."""
    return _ret(_kv(0, _check(z, positive=True)))


def k1(z):
    """Modified Bessel function of the second kind, order 1 (z > 0)."""
    return _ret(_kv(1, _check(z, positive=True)))


def i0_scaled(z):
    """``exp(-z) * I0(z)``; finite for every finite ``z >= 0``."""
    return _ret(_iv_scaled(0, _check(z)))


def i1_scaled(z):
    """``exp(-z) * I1(z)``."""
    return _ret(_iv_scaled(1, _check(z)))


def k0_scaled(z):
    """``exp(z) * K0(z)``."""
    return _ret(_kv_scaled(0, _check(z, positive=True)))


def k1_scaled(z):
    """``exp(z) * K1(z)``."""
    return _ret(_kv_scaled(1, _check(z, positive=True)))


def i0_prime(z):
    """I0'(z) = I1(z)."""
    return i1(z)


def i1_prime(z):
    """I1'(z) = I0(z) - I1(z)/z, with the limit 1/2 at z = 0."""
    arr = _check(z)
    # I1(z)/z straight from the series, so z = 0 needs no special case
    return _ret(_iv(0, arr) - _i_over_z(arr, scaled=False))


def i0_second(z):
    """I0''(z) = I1'(z)."""
    return i1_prime(z)


def i1_prime_scaled(z):
    """``exp(-z) * I1'(z)``."""
    arr = _check(z)
    return _ret(_iv_scaled(0, arr) - _i_over_z(arr, scaled=True))


def i0_second_scaled(z):
    """``exp(-z) * I0''(z)``."""
    return i1_prime_scaled(z)


def _iv_decayed(n, x, z, over_pow=False):
    """e^{-z} I_n(x) (or e^{-z} I_n(x) / x^n) for 0 <= x <= z, in long double.

    Inside the series range the factor e^{-z} is a single constant and the
    series is summed in extended precision, so values on a grid of x carry
    essentially one rounding each.  Callers that assemble profiles keep the
    long double result until the final cast; fourth-derivative diagnostics
    amplify node-to-node rounding noise by ``h**-4``.
    """
    x, z = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(z, dtype=float))
    out = np.empty(x.shape, dtype=np.longdouble)
    direct = (x <= _SERIES_MAX) & (z <= 700.0)
    if np.any(direct):
        xs = x[direct].astype(np.longdouble)
        ez = np.exp(-z[direct].astype(np.longdouble))
        val = _i_series_over_pow(n, xs, _LD_STOP) * ez
        out[direct] = val if over_pow else val * xs**n
    if np.any(~direct):
        xl = x[~direct]
        scaled = _iv_over_pow_scaled(n, xl) if over_pow else _iv_scaled(n, xl)
        out[~direct] = np.exp(xl - z[~direct]) * scaled
    return out


def i_over_pow_decayed(n, x, z, extended=False):
    """``exp(-z) * I_n(x) / x**n`` for ``n`` in 0..3 and ``0 <= x <= z``.

    Finite at ``x = 0`` (limit ``exp(-z) / (2**n n!)``); used for ratios like
    ``I1(x)/x`` that appear once a field is divided by the radius.
    """
    if n not in (0, 1, 2, 3):
        raise DomainError("order must be 0, 1, 2 or 3")
    arr = _check(x)
    zz = _check(z)
    if np.any(arr > zz):
        raise DomainError("requires x <= z")
    out = _iv_decayed(n, arr, zz, over_pow=True)
    return _ret(out if extended else out.astype(float))


def i0_decayed(x, z, extended=False):
    """``exp(-z) * I0(x)`` for ``0 <= x <= z``, without overflow.

    With ``extended=True`` the long double intermediate is returned as is.
    """
    arr = _check(x)
    zz = _check(z)
    if np.any(arr > zz):
        raise DomainError("i0_decayed requires x <= z")
    out = _iv_decayed(0, arr, zz)
    return _ret(out if extended else out.astype(float))


def i1_decayed(x, z, extended=False):
    """``exp(-z) * I1(x)`` for ``0 <= x <= z``, without overflow.

    With ``extended=True`` the long double intermediate is returned as is.
    """
    arr = _check(x)
    zz = _check(z)
    if np.any(arr > zz):
        raise DomainError("i1_decayed requires x <= z")
    out = _iv_decayed(1, arr, zz)
    return _ret(out if extended else out.astype(float))


def _i_over_z(z, scaled):
    out = _iv_over_pow_scaled(1, z)
    if not scaled:
        with np.errstate(over="ignore"):
            out = out * np.exp(z)
    return out


@dataclass(frozen=True)
class BesselValue:
    """A Bessel evaluation carrying both the plain and the scaled value.

    ``scaled_value`` is ``value * exp(-z)`` for I-type functions and
    ``value * exp(z)`` for K-type functions.
    """

    value: float
    scaled_value: float
    argument: float


_TABLE = {
    "i0": (i0, i0_scaled),
    "i1": (i1, i1_scaled),
    "k0": (k0, k0_scaled),
    "k1": (k1, k1_scaled),
}


def bessel_value(kind: str, z: float) -> BesselValue:
    """Evaluate ``kind`` in {'i0', 'i1', 'k0', 'k1'} at a scalar ``z``."""
    try:
        plain, scaled = _TABLE[kind]
    except KeyError:
        raise DomainError(f"unknown Bessel function {kind!r}") from None
    return BesselValue(float(plain(z)), float(scaled(z)), float(z))
