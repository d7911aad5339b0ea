"""Independent numerical ground truth.

Nothing here uses the symbolic engine: principal values are computed by
symmetric excision (simple poles) or Taylor subtraction (higher poles),
log-weighted integrals by scipy's QAWS routine, the remaining regular
pieces by tanh-sinh quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _si

from .errors import DomainError, NonConvergent, PoleOutsideInterval
from .testfn import PolyTestFn, TestFn

PI2 = math.pi ** 2


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


# --------------------------------------------------------------------------
# tanh-sinh

@lru_cache(maxsize=None)
def _ts_rule(level: int, tmax: float = 3.2):
    """Nodes on (-1, 1) as (x, distance to nearest end, weight), step 2^-level."""
    h = 2.0 ** -level
    t = np.arange(-int(tmax / h), int(tmax / h) + 1) * h
    u = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(u)
    # 1 - |x| without cancellation
    d = 2.0 / (np.exp(2 * np.abs(u)) + 1.0)
    w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = d > 1e-300
    return x[keep], d[keep], w[keep], t[keep]


def _ts_points(a, b, level):
    """Broadcast nodes and weights for intervals [a, b] (arrays ok), last axis = nodes."""
    x, d, w, _ = _ts_rule(level)
    a = np.asarray(a, float)[..., None]
    b = np.asarray(b, float)[..., None]
    half = 0.5 * (b - a)
    # measure from the nearer end to keep resolution next to endpoints
    # nodes are sorted, so the left half is measured from a, the rest from b
    m = int(np.searchsorted(x, 0.0))
    pts = np.concatenate([a + half * d[:m], b - half * d[m:]], axis=-1)
    return pts, half * w


def ts_quad(f: Callable, a, b, tol: float = 1e-12, min_level: int = 3, max_level: int = 9) -> QuadResult:
    """Tanh-sinh quadrature of a vectorised ``f`` over ``[a, b]``.

    ``a`` and ``b`` may be arrays (one integral per entry); the returned value
    then has their broadcast shape.  Endpoint singularities of algebraic or
    logarithmic type are handled by the double-exponential clustering.
    """
    prev = None
    evals = 0
    for level in range(min_level, max_level + 1):
        pts, wts = _ts_points(a, b, level)
        with np.errstate(all="ignore"):
            fv = f(pts)
        fv = np.where(np.isfinite(fv), fv, 0.0)
        val = np.sum(fv * wts, axis=-1)
        evals += pts.size
        if prev is not None:
            err = np.max(np.abs(val - prev))
            scale = max(1.0, float(np.max(np.abs(val))))
            if err <= tol * scale:
                return QuadResult(val if np.ndim(val) else float(val), float(err), evals)
        prev = val
    return QuadResult(val if np.ndim(val) else float(val), float(np.max(np.abs(val - prev))), evals)


@lru_cache(maxsize=None)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_composite(a, b, panels: int, order: int):
    """Composite Gauss-Legendre nodes/weights on [a, b] (broadcast, last axis nodes)."""
    x, w = _gl(order)
    a = np.asarray(a, float)[..., None]
    b = np.asarray(b, float)[..., None]
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    s = (lo + (hi - lo) * (x + 1) / 2).ravel()
    ws = ((hi - lo) / 2 * w).ravel()
    return a + (b - a) * s, (b - a) * ws


# --------------------------------------------------------------------------
# principal values

def _taylor_coeffs(derivs: Sequence, y, n: int):
    """f^(j)(y)/j! for j < n."""
    return [np.asarray(derivs[j](y), float) / math.factorial(j) for j in range(n)]


def _fp_monomial(p: int, lo, hi):
    """Finite-part integral of t^p over [lo, hi] (lo < 0 < hi allowed), p integer."""
    if p == -1:
        return np.log(np.abs(hi)) - np.log(np.abs(lo))
    return (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)


_CHUNK = 512


def pv_batch(f: Callable, derivs: Sequence[Callable], y, n: int, a, b,
             order: int = 48, panels: int = 2, tol: float = 1e-12) -> np.ndarray:
    """Vectorised ``FP int_a^b f(x) / (x - y)^n dx`` for arrays of poles ``y``.

    Symmetric part around the pole by Taylor subtraction of the even/odd
    combination; the outer remainder by tanh-sinh.  ``derivs[j]`` gives
    ``f^(j)`` (only ``j < n`` used).  Requires ``a < y < b``.
    """
    y = np.asarray(y, float)
    a = np.broadcast_to(np.asarray(a, float), y.shape)
    b = np.broadcast_to(np.asarray(b, float), y.shape)
    if y.size > _CHUNK and y.ndim == 1 and a.ndim == 1:
        # bound memory: the outer tanh-sinh rule has thousands of nodes per pole
        out = np.empty_like(y)
        for i in range(0, y.size, _CHUNK):
            sl = slice(i, i + _CHUNK)
            out[sl] = pv_batch(f, derivs, y[sl], n, a[sl], b[sl], order, panels, tol)
        return out
    h = np.minimum(y - a, b - y)
    if np.any(h <= 0):
        raise PoleOutsideInterval("pole must lie strictly inside the interval")
    coeffs = _taylor_coeffs(derivs, y, n) if n > 1 else [np.asarray(f(y), float)]
    tt, tw = _gl_composite(np.zeros_like(h), h, panels, order)
    yy = y[..., None]
    fp = f(yy + tt)
    fm = f(yy - tt)
    comb_ = fp + (-1) ** n * fm
    sub = np.zeros_like(comb_)
    closed = np.zeros_like(y)
    for j in range(n):
        if (j + n) % 2 == 0:
            sub = sub + 2 * coeffs[j][..., None] * tt ** j
            closed = closed + 2 * coeffs[j] * h ** (j - n + 1) / (j - n + 1)
    sym = np.sum((comb_ - sub) / tt ** n * tw, axis=-1) + closed
    # outer remainder: [y+h, b] or [a, y-h], one of them empty
    right = ts_quad(lambda x: f(x) / (x - y[..., None]) ** n, y + h, b, tol=tol).value
    left = ts_quad(lambda x: f(x) / (x - y[..., None]) ** n, a, y - h, tol=tol).value
    return sym + np.asarray(right) + np.asarray(left)


def _as_callable(f) -> Callable:
    return f.fn if isinstance(f, TestFn) else f


def _deriv_callables(f: TestFn, n: int) -> list[Callable]:
    out = [_as_callable(f)]
    for j in range(1, n):
        out.append(_as_callable(f.derivative((j,))))
    return out


def pv_quad(f, pole: float, n: int, a: float, b: float, eps0: float | None = None,
            terms: int = 8, cauchy_tol: float = 1e-9) -> QuadResult:
    """Principal value (n = 1) or finite part (n >= 2) of ``int_a^b f(x)/(x-pole)^n dx``.

    n = 1: symmetric excision ``int_eps^h (f(y+t) - f(y-t))/t dt`` on the
    schedule ``eps_k = eps0 2^-k`` followed by Richardson extrapolation in
    odd powers of eps (the excision error is an odd series in eps), plus the
    conventional outer remainder.
    n >= 2: Taylor subtraction with exact finite-part integrals of the
    subtracted polynomial.
    """
    if not (a < pole < b):
        raise PoleOutsideInterval(f"pole {pole} not inside ({a}, {b})")
    if n < 1:
        raise ValueError("n must be >= 1")
    fn = f if isinstance(f, TestFn) else TestFn(f, 1)
    call = _as_callable(fn)
    y = float(pole)
    h = min(y - a, b - y)
    if n >= 2:
        derivs = _deriv_callables(fn, n)
        v1 = float(pv_batch(call, derivs, np.array(y), n, a, b, order=40))
        v2 = float(pv_batch(call, derivs, np.array(y), n, a, b, order=56))
        err = abs(v1 - v2) + 1e-15 * max(1.0, abs(v2))
        return QuadResult(v2, err, 2 * (2 * 2 * (40 + 56)))
    eps0 = (b - a) / 8 if eps0 is None else eps0
    eps0 = min(eps0, h)
    x, w = _gl(40)

    def sym(lo, hi):
        t = lo + (hi - lo) * (x + 1) / 2
        return float(np.sum((call(y + t) - call(y - t)) / t * w) * (hi - lo) / 2)

    # S(eps_k) = int_{eps_k}^h, accumulated panel by panel
    base = sum(sym(lo, hi) for lo, hi in _split(eps0, h, 4))
    seq = []
    acc = base
    eps = eps0
    for k in range(terms):
        if k:
            acc += sym(eps, 2 * eps)
        seq.append(acc)
        eps /= 2
    # Richardson: S(eps) = S + c1 eps + c3 eps^3 + ...
    table = [seq]
    for m in range(1, terms):
        p = 2 * m - 1
        fac = 2.0 ** p
        prev = table[-1]
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)])
    diag = [row[-1] for row in table]
    sym_val = diag[-1]
    err = abs(diag[-1] - diag[-2])
    scale = max(1.0, abs(sym_val))
    if err > cauchy_tol * scale:
        raise NonConvergent(f"excision sequence did not settle (last change {err:.3g})")
    outer = 0.0
    if b - y > h:
        outer += ts_quad(lambda t: call(t) / (t - y), y + h, b).value
    if y - a > h:
        outer += ts_quad(lambda t: call(t) / (t - y), a, y - h).value
    evals = terms * 80 + 4 * 80
    return QuadResult(sym_val + outer, err + 1e-14 * scale, evals)


def _split(lo, hi, k):
    edges = np.linspace(lo, hi, k + 1)
    return list(zip(edges[:-1], edges[1:]))


# --------------------------------------------------------------------------
# log-weighted integrals

def _qaws_log_left(f: Callable, c: float, b: float) -> tuple[float, float]:
    """int_c^b ln(x - c) f(x) dx for b > c."""
    if b == c:
        return 0.0, 0.0
    val, err = _si.quad(lambda x: float(f(x)), c, b, weight="alg-loga", wvar=(0.0, 0.0),
                        limit=200, epsabs=1e-14, epsrel=1e-13)
    return val, err


def _qaws_log_right(f: Callable, a: float, c: float) -> tuple[float, float]:
    """int_a^c ln(c - x) f(x) dx for a < c."""
    if a == c:
        return 0.0, 0.0
    val, err = _si.quad(lambda x: float(f(x)), a, c, weight="alg-logb", wvar=(0.0, 0.0),
                        limit=200, epsabs=1e-14, epsrel=1e-13)
    return val, err


def log_quad(f, c: float, a: float, b: float, tol: float = 1e-10) -> QuadResult:
    """``int_a^b ln|x - c| f(x) dx`` for smooth ``f``; ``c`` anywhere.

    The interval is split at ``c``; each piece with the singular point at
    an end is handled by QUADPACK's algebraic-logarithmic weight (QAWS).
    For ``c`` outside ``[a, b]`` the integral is written as a difference of
    two such pieces anchored at ``c``, which keeps it continuous in ``c``.
    """
    call = _as_callable(f)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pieces: list[tuple[float, float]] = []
    if a <= c <= b:
        pieces.append(_qaws_log_right(call, a, c))
        pieces.append(_qaws_log_left(call, c, b))
    elif c < a:
        v1, e1 = _qaws_log_left(call, c, b)
        v2, e2 = _qaws_log_left(call, c, a)
        pieces = [(v1, e1), (-v2, e2)]
    else:
        v1, e1 = _qaws_log_right(call, a, c)
        v2, e2 = _qaws_log_right(call, b, c)
        pieces = [(v1, e1), (-v2, e2)]
    val = sum(p[0] for p in pieces)
    err = sum(p[1] for p in pieces)
    if err > tol * max(1.0, abs(val)):
        raise NonConvergent(f"log-weighted quadrature error {err:.3g} above target")
    return QuadResult(sign * val, err, 0)


# --------------------------------------------------------------------------
# dilogarithm, dilog(z) = int_1^z ln t / (1 - t) dt = Li2(1 - z)

def _bernoulli(n: int) -> list[Fraction]:
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        B[m] = -sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1)
    return B


_B = _bernoulli(40)
# Li2(w) = sum_n B_n u^(n+1)/(n+1)!, u = -ln(1-w)
_LI2_COEFFS = [float(_B[k] / math.factorial(k + 1)) for k in range(41)]


def _li2_series(w: float) -> float:
    u = -math.log1p(-w)
    acc = 0.0
    for k in range(40, -1, -1):
        acc = acc * u + _LI2_COEFFS[k]
    return acc * u


def _li2(w: float) -> float:
    """Real dilogarithm Li2(w) for w <= 1."""
    if w == 1.0:
        return PI2 / 6
    if w < -1.0:
        return -PI2 / 6 - 0.5 * math.log(-w) ** 2 - _li2_series(1.0 / w)
    if w > 0.5:
        return PI2 / 6 - math.log(w) * math.log1p(-w) - _li2_series(1.0 - w)
    return _li2_series(w)


def dilog(z: float) -> float:
    """``int_1^z ln(t)/(1-t) dt`` for real ``z > 0`` (equals Li2(1 - z))."""
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"dilog is defined here for finite z > 0, got {z}")
    if z == 1.0:
        return 0.0
    w = 1.0 - z
    if z < 0.5:
        # w in (0.5, 1): reflection, with ln(1 - w) = ln z computed directly
        return PI2 / 6 - math.log1p(-z) * math.log(z) - _li2_series(z)
    return _li2(w)


# --------------------------------------------------------------------------
# nested regular-order integrals

def _is_constant(u) -> bool:
    return isinstance(u, PolyTestFn) and u.poly.is_const()


def multiple_integral_regular(poles: Sequence[int], u: TestFn | None = None,
                              cube: Sequence[tuple[float, float]] | None = None,
                              order: int = 40) -> QuadResult:
    """Regular-order integral ``int dx prod_i [int dz_i VP 1/(x - z_i)^n_i] u(x, z_1, ...)``.

    ``poles`` lists the degrees ``n_i``; ``u`` takes ``(x, z_1, ..., z_m)``
    (``None`` means u = 1).  The z-integrations are innermost, each a
    principal value / finite part with the pole at ``z_i = x``; the outer
    x-integration is tanh-sinh over the log-singular result.
    """
    m = len(poles)
    cube = list(cube) if cube is not None else [(0.0, 1.0)] * (m + 1)
    if len(cube) != m + 1:
        raise ValueError("cube needs one interval for x and each z")
    (xa, xb), zlims = cube[0], cube[1:]
    const_u = u is None or _is_constant(u)
    scale = 1.0 if u is None else (float(u.poly.const_value()) if const_u else None)

    def inner_const(xs):
        out = np.ones_like(xs)
        for (za, zb), n in zip(zlims, poles):
            one = lambda t: np.ones_like(t)
            zero = lambda t: np.zeros_like(t)
            val = pv_batch(one, [one] + [zero] * (n - 1), xs, n, za, zb, order=order)
            out = out * (-1) ** n * val
        return out * scale

    zlo = max(za for za, _ in zlims)
    zhi = min(zb for _, zb in zlims)
    if not (zlo <= xa and xb <= zhi):
        raise PoleOutsideInterval("the x-range must lie inside every z-range")

    def interior(fn):
        # tanh-sinh nodes may round onto the ends; their weight is negligible
        def g(xs):
            ok = (xs > zlo) & (xs < zhi)
            out = np.zeros_like(xs)
            if np.any(ok):
                out[ok] = fn(xs[ok])
            return out
        return g

    if const_u:
        res = ts_quad(interior(inner_const), xa, xb, tol=1e-13, max_level=8)
        return QuadResult(float(res.value), res.error_estimate, res.evaluations)

    if not isinstance(u, TestFn):
        raise TypeError("u must be a TestFn")

    def nested(level: int, xs, fixed: list, dindex: tuple):
        """int over z_level..z_m of the remaining poles times d^dindex u."""
        if level == m:
            fn = u.derivative(dindex) if any(dindex) else u
            return fn(xs, *fixed)
        n = poles[level]
        za, zb = zlims[level]

        def widen(arr, z):
            if np.ndim(z) > np.ndim(arr):
                return np.broadcast_to(np.asarray(arr)[..., None], np.shape(z))
            return arr

        def g(d):
            def call(z):
                idx = list(dindex)
                idx[level + 1] += d
                return nested(level + 1, widen(xs, z), [widen(f, z) for f in fixed] + [z], tuple(idx))
            return call

        derivs = [g(j) for j in range(n)]
        return (-1) ** n * pv_batch(derivs[0], derivs, xs, n, za, zb, order=order)

    zero_idx = (0,) * (m + 1)
    res = ts_quad(interior(lambda xs: nested(0, xs, [], zero_idx)), xa, xb, tol=1e-10, min_level=3, max_level=6)
    return QuadResult(float(res.value), res.error_estimate, res.evaluations)


def bracket_term_cube(order: int = 48) -> QuadResult:
    """``int dz1 dz2 VP 1/(z1-z2) int dx [VP 1/(x-z1) - VP 1/(x-z2)]`` over the unit cube.

    x innermost, then z2 (a principal value at z1), then z1.
    """
    one = lambda t: np.ones_like(t)

    def A(z):
        z = np.asarray(z, float)
        out = np.full(z.shape, np.nan)
        ok = (z > 0) & (z < 1)
        out[ok] = pv_batch(one, [one], z[ok].ravel(), 1, 0.0, 1.0, order=order, tol=1e-10)
        return out

    def inner(z1):
        # int_0^1 dz2 (A(z1) - A(z2)) / (z1 - z2): bounded divided difference,
        # log-singular only at the ends of [0, 1]
        a1 = A(z1)[..., None]

        def integrand(z2):
            with np.errstate(all="ignore"):
                return (a1 - A(z2)) / (z1[..., None] - z2)
        # the integrand is symmetric in (z1, z2): twice the triangle z2 < z1
        return 2 * ts_quad(integrand, np.zeros_like(z1), z1, tol=1e-10, max_level=6).value

    res = ts_quad(inner, 0.0, 1.0, tol=1e-9, max_level=5)
    return QuadResult(float(res.value), res.error_estimate, res.evaluations)


def simplex_regular(z: float, order: int = 48) -> QuadResult:
    """Nested regular-order value of ``int_0^{2+z} dx VP 1/(x-1) int_0^{2+z-x} dy VP 1/(y-1)``.

    The inner y-integral is a numeric principal value (or an ordinary
    integral when its upper limit is below the pole); the outer x-integral is
    split at the pole x = 1 and at x = 1 + z, where the inner result has a
    logarithmic singularity.
    """
    if z == 0:
        from .errors import ThresholdUndefined
        raise ThresholdUndefined("z = 0 is the threshold")
    if z <= -1:
        raise DomainError("the simplex integral is considered for z > -1")
    one = lambda t: np.ones_like(t)
    top = 2.0 + z

    def inner(xs):
        xs = np.asarray(xs, float)
        ub = top - xs
        out = np.empty_like(xs)
        above = ub > 1.0
        if np.any(above):
            out[above] = pv_batch(one, [one], np.ones(np.count_nonzero(above)), 1, 0.0, ub[above], order=order)
        below = ~above
        if np.any(below):
            out[below] = ts_quad(lambda y: 1.0 / (y - 1.0), np.zeros(np.count_nonzero(below)),
                                 ub[below], tol=1e-13).value
        return out

    h = 0.5 * min(abs(z), 1.0, 1.0 + z)

    def inner_flat(xs):
        shp = np.shape(xs)
        return inner(np.ravel(xs)).reshape(shp)

    # principal value around x = 1 from the symmetric pairing
    t, w = _gl_composite(0.0, h, 2, order)
    t, w = t[0] if t.ndim > 1 else t, w[0] if w.ndim > 1 else w
    sym = float(np.sum((inner_flat(1.0 + t) - inner_flat(1.0 - t)) / t * w))
    total = sym
    breaks = sorted({0.0, 1.0 - h, 1.0 + h, 1.0 + z, top})
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if lo >= 1.0 - h and hi <= 1.0 + h:
            continue
        total += float(ts_quad(lambda x: inner_flat(x) / (x - 1.0), lo, hi, tol=1e-12, max_level=7).value)
    return QuadResult(total, 1e-9, 0)
