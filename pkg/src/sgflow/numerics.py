"""Shared numerical kernels: quadrature, finite differences, tridiagonal solves,
cumulative integration.

Everything here works on uniform grids only; the flow modules never need
anything else.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .errors import GridError, QuadratureError, SolverError, ValidationError

__all__ = [
    "QuadratureResult",
    "TridiagonalSystem",
    "adaptive_quad",
    "panel_quad",
    "solve_tridiagonal",
    "fd_weights",
    "fd_derivative",
    "fd_apply_L",
    "cumulative_integral",
    "uniform_spacing",
]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def adaptive_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = 1e-10,
    max_depth: int = 50,
    min_depth: int = 4,
) -> QuadratureResult:
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``.

    Each panel compares Simpson's rule with the two-half composite rule; the
    difference (divided by 15) is both the local error estimate and the
    Richardson correction that is added to the result.  Tolerance is split
    evenly between the two halves on every bisection.

    Raises
    ------
    QuadratureError
        If a panel still misses its tolerance at ``max_depth``.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValidationError("integration limits must be finite")
    if a > b:
        raise ValidationError("adaptive_quad requires a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    evaluations = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    err_total = 0.0
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        evaluations += 2
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= min_depth and abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
            err_total += abs(delta) / 15.0
        elif depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson exceeded max depth {max_depth} near x={mid:.6g}",
                achieved=abs(delta) / 15.0,
            )
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1))
    if not np.isfinite(total):
        raise QuadratureError("integrand produced non-finite values")
    return QuadratureResult(float(total), float(err_total), evaluations)


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[1:7:2] = _WG[:3]
_W_GAUSS[7] = _WG[3]
_W_GAUSS[9:15:2] = _WG[2::-1]


def panel_quad(f, edges, abs_tol=1e-10, max_level=30, with_index=False):
    """Integrate a vectorised ``f`` over every panel ``[edges[i], edges[i+1]]``.

    Panels are processed together: each round evaluates a Gauss-Kronrod 7/15
    pair on all unfinished sub-panels at once and bisects the ones whose
    Kronrod-Gauss difference exceeds their share of ``abs_tol`` (shares are
    proportional to length, so any sum of panels stays within ``abs_tol``).

    With ``with_index=True`` the integrand is called as ``f(x, k)`` where
    ``k`` (same shape as ``x``) is the index of the panel each point belongs
    to, so the integrand may depend on its panel.

    Returns
    -------
    values, errors : ndarray
        Per-panel integrals and error estimates, length ``len(edges) - 1``.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) < 0):
        raise ValidationError("edges must be a nondecreasing 1-D array")
    span = edges[-1] - edges[0]
    values = np.zeros(edges.size - 1)
    errors = np.zeros(edges.size - 1)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    owner = np.arange(edges.size - 1)
    for level in range(max_level + 1):
        half = 0.5 * (hi - lo)
        x = (0.5 * (lo + hi))[:, None] + half[:, None] * _NODES[None, :]
        if with_index:
            k = np.broadcast_to(owner[:, None], x.shape)
            fx = np.asarray(f(x.ravel(), k.ravel()), dtype=float).reshape(x.shape)
        else:
            fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        kron = half * (fx @ _W_KRONROD)
        gauss = half * (fx @ _W_GAUSS)
        err = np.abs(kron - gauss)
        if not np.all(np.isfinite(kron)):
            raise QuadratureError("integrand produced non-finite values")
        share = abs_tol * (2.0 * half) / span if span > 0 else abs_tol
        done = (err <= share) | (half == 0.0)
        np.add.at(values, owner[done], kron[done])
        np.add.at(errors, owner[done], err[done])
        if np.all(done):
            return values, errors
        if level == max_level:
            raise QuadratureError(
                f"panel quadrature did not converge in {max_level} bisections",
                achieved=float(err[~done].max()),
            )
        lo, hi, owner = lo[~done], hi[~done], owner[~done]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i]`` couples row ``i+1`` to column ``i``; ``sup[i]`` couples row ``i`` to ``i+1``."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if n < 3:
            raise ValidationError("tridiagonal system needs n >= 3")
        if len(self.sub) != n - 1 or len(self.sup) != n - 1 or len(self.rhs) != n:
            raise ValidationError("inconsistent tridiagonal array lengths")

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = np.asarray(self.diag) * x
        y[1:] += np.asarray(self.sub) * x[:-1]
        y[:-1] += np.asarray(self.sup) * x[1:]
        return y


def solve_tridiagonal(system: TridiagonalSystem) -> np.ndarray:
    """Solve ``A x = rhs`` for a tridiagonal ``A`` (LAPACK banded LU with pivoting)."""
    n = system.n
    ab = np.zeros((3, n))
    ab[0, 1:] = system.sup
    ab[1] = system.diag
    ab[2, :-1] = system.sub
    rhs = np.asarray(system.rhs, dtype=float)
    try:
        x = solve_banded((1, 1), ab, rhs)
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal solve failed: {exc}") from exc
    scale = np.max(np.abs(rhs)) if rhs.size else 0.0
    resid = np.max(np.abs(system.matvec(x) - rhs))
    if not np.all(np.isfinite(x)) or resid > 1e-10 * max(scale, np.finfo(float).tiny):
        raise SolverError(f"tridiagonal residual {resid:.3e} exceeds tolerance")
    return x


def fd_weights(z: float, x, m: int) -> np.ndarray:
    """Fornberg's finite-difference weights.

    Returns an array ``c`` of shape ``(m + 1, len(x))`` with ``c[k] @ f(x)``
    approximating the ``k``-th derivative at ``z``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def uniform_spacing(grid, rtol=1e-9) -> float:
    """Return the spacing of a uniform, strictly increasing grid or raise GridError."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise GridError("grid must be 1-D with at least two nodes")
    steps = np.diff(grid)
    h = (grid[-1] - grid[0]) / (grid.size - 1)
    if h <= 0 or np.any(steps <= 0):
        raise GridError("grid must be strictly increasing")
    if np.max(np.abs(steps - h)) > rtol * max(1.0, abs(h)) + 4 * np.finfo(float).eps * np.abs(grid).max():
        raise GridError("grid must be uniform")
    return float(h)


def fd_derivative(samples, grid, order: int, accuracy: int = 4, parity=None) -> np.ndarray:
    """Derivative of sampled data on a uniform grid.

    Central stencils in the interior, one-sided stencils of ``order + accuracy``
    nodes near the ends, so every node gets a value of the requested accuracy.
    When the grid starts at 0 and ``parity`` is +1 (even) or -1 (odd), the
    data are mirrored about 0 first and the left end keeps central stencils.
    """
    if order < 1:
        raise ValidationError("derivative order must be >= 1")
    if accuracy < 2 or accuracy % 2:
        raise ValidationError("accuracy must be a positive even integer")
    f = np.asarray(samples, dtype=float)
    grid = np.asarray(grid, dtype=float)
    h = uniform_spacing(grid)
    if f.shape != grid.shape:
        raise ValidationError("samples and grid lengths differ")
    n = f.size
    half = (order + 1) // 2 + accuracy // 2 - 1
    width = order + accuracy
    if n < max(2 * half + 1, width):
        raise GridError(f"need at least {max(2 * half + 1, width)} nodes for this stencil")

    pad = 0
    if parity is not None and grid[0] == 0.0:
        if parity not in (1, -1):
            raise ValidationError("parity must be +1, -1 or None")
        pad = half
        f = np.concatenate([parity * f[pad:0:-1], f])
    m = f.size

    out = np.empty(m)
    offsets = np.arange(-half, half + 1)
    central = fd_weights(0.0, offsets, order)[order] / h**order
    acc = np.zeros(m - 2 * half)
    for w, off in zip(central, offsets):
        acc += w * f[half + off : m - half + off]
    out[half : m - half] = acc
    for i in list(range(half)) + list(range(m - half, m)):
        start = min(max(i - width // 2, 0), m - width)
        idx = np.arange(start, start + width)
        w = fd_weights(0.0, idx - i, order)[order] / h**order
        out[i] = w @ f[idx]
    return out[pad:]


_PARITY = {"poiseuille": 1, "couette": -1}


def fd_apply_L(samples, sigma, operator: str, accuracy: int = 4, power: int = 1) -> np.ndarray:
    """Apply a cylindrical radial operator, or its square, to sampled data.

    ``operator='poiseuille'``: ``L = D^2 + (1/s) D`` on even fields, so that
    ``L u(0) = 2 u''(0)`` and ``L^2 u(0) = (8/3) u''''(0)``.

    ``operator='couette'``: ``L = D^2 + (1/s) D - 1/s^2`` on odd fields;
    ``L u`` and ``L^2 u`` both vanish at ``s = 0``.

    The square is expanded into derivatives up to fourth order instead of
    nesting two applications, so every node away from the outer end uses
    central stencils.  A grid starting at 0 is mirrored with the parity above.
    """
    if operator not in _PARITY:
        raise ValidationError(f"unknown operator {operator!r}")
    if power not in (1, 2):
        raise ValidationError("power must be 1 or 2")
    s = np.asarray(sigma, dtype=float)
    u = np.asarray(samples, dtype=float)
    parity = _PARITY[operator]
    d = {k: fd_derivative(u, s, k, accuracy, parity) for k in range(1, 2 * power + 1)}
    out = np.empty_like(u)
    pos = s > 0
    r = s[pos]
    if operator == "poiseuille":
        if power == 1:
            out[pos] = d[2][pos] + d[1][pos] / r
            out[~pos] = 2.0 * d[2][~pos]
        else:
            out[pos] = d[4][pos] + 2.0 * d[3][pos] / r - d[2][pos] / r**2 + d[1][pos] / r**3
            out[~pos] = 8.0 / 3.0 * d[4][~pos]
    else:
        if power == 1:
            out[pos] = d[2][pos] + d[1][pos] / r - u[pos] / r**2
        else:
            out[pos] = (d[4][pos] + 2.0 * d[3][pos] / r - 3.0 * d[2][pos] / r**2
                        + 3.0 * d[1][pos] / r**3 - 3.0 * u[pos] / r**4)
        out[~pos] = 0.0
    return out


def cumulative_integral(samples, grid) -> np.ndarray:
    """Running integral from the first node, 0 at ``grid[0]``.

    Each cell uses the integral of the cubic through four neighbouring samples
    (one-sided at the two end cells), so the result is exact for cubics and
    fourth-order accurate in general.  Three-node grids fall back to the
    Simpson half-panel rules, two-node grids to the trapezoid rule.
    """
    f = np.asarray(samples, dtype=float)
    h = uniform_spacing(grid)
    n = f.size
    if n != np.asarray(grid).size:
        raise ValidationError("samples and grid lengths differ")
    cells = np.empty(n - 1)
    if n == 2:
        cells[0] = 0.5 * h * (f[0] + f[1])
    elif n == 3:
        cells[0] = h / 12.0 * (5 * f[0] + 8 * f[1] - f[2])
        cells[1] = h / 12.0 * (-f[0] + 8 * f[1] + 5 * f[2])
    else:
        cells[1:-1] = h / 24.0 * (-f[:-3] + 13 * f[1:-2] + 13 * f[2:-1] - f[3:])
        cells[0] = h / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3])
        cells[-1] = h / 24.0 * (f[-4] - 5 * f[-3] + 19 * f[-2] + 9 * f[-1])
    return np.concatenate([[0.0], np.cumsum(cells)])
