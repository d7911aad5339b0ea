"""Smooth weight functions with derivatives.

Polynomial weights carry exact coefficients; any other callable falls back
to Richardson-refined central differences.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Callable, Sequence

import numpy as np

from .algebra import Poly

EPS = np.finfo(float).eps


class TestFn:
    """Vectorised smooth function of ``arity`` real arguments.

    ``fn`` must accept numpy arrays (broadcasting) and be safe to call from
    several threads at once; it should not keep mutable state.
    """

    __test__ = False  # not a pytest class

    def __init__(self, fn: Callable, arity: int, support: Sequence[tuple[float, float]] | None = None,
                 name: str = "u", deriv: tuple[int, ...] | None = None, scale: float = 1.0):
        self.fn = fn
        self.arity = arity
        self.support = tuple(support) if support is not None else ((-np.inf, np.inf),) * arity
        self.name = name
        self.deriv = deriv if deriv is not None else (0,) * arity
        self.scale = scale

    def __call__(self, *args):
        return self.fn(*args)

    @property
    def is_polynomial(self) -> bool:
        return False

    def derivative(self, index: Sequence[int]) -> "TestFn":
        """Partial derivative with multi-index ``index`` (one order per argument)."""
        index = tuple(index)
        if not any(index):
            return self
        base = self
        f = base.fn
        for arg, k in enumerate(index):
            if k:
                f = _fd(f, arg, k, base.scale)
        total = tuple(a + b for a, b in zip(self.deriv, index))
        return TestFn(f, self.arity, self.support, self.name, total, self.scale)


def _fd(f: Callable, arg: int, k: int, scale: float) -> Callable:
    h = EPS ** (1.0 / (k + 2)) * scale * 4

    def stencil(step, args):
        acc = 0.0
        for j in range(k + 1):
            shifted = list(args)
            shifted[arg] = args[arg] + (k / 2 - j) * step
            acc = acc + (-1) ** j * comb(k, j) * f(*shifted)
        return acc / step ** k

    def g(*args):
        args = [np.asarray(a, dtype=float) for a in args]
        coarse = stencil(h, args)
        fine = stencil(h / 2, args)
        return (4 * fine - coarse) / 3

    return g


class PolyTestFn(TestFn):
    """Polynomial weight ``u(v1, ..., vk)`` with exact rational coefficients."""

    def __init__(self, poly: Poly, variables: Sequence[str], support=None, name: str = "u"):
        self.poly = poly
        self.variables = tuple(variables)
        terms = [(float(c), [dict(m).get(v, 0) for v in self.variables]) for m, c in poly.terms.items()]

        def fn(*args):
            acc = 0.0
            for c, exps in terms:
                t = c
                for a, e in zip(args, exps):
                    if e:
                        t = t * np.asarray(a, dtype=float) ** e
                acc = acc + t
            if np.ndim(acc) == 0 and args and np.ndim(args[0]) > 0:
                acc = np.full(np.shape(np.broadcast_arrays(*args)[0]), float(acc))
            return acc

        super().__init__(fn, len(self.variables), support, name)

    @property
    def is_polynomial(self) -> bool:
        return True

    def derivative(self, index: Sequence[int]) -> "PolyTestFn":
        p = self.poly
        for v, k in zip(self.variables, index):
            if k:
                p = p.diff(v, k)
        return PolyTestFn(p, self.variables, self.support, self.name)

    def as_poly(self, args: Sequence[str] | None = None) -> Poly:
        """The polynomial with its formal variables renamed to ``args``."""
        if args is None or tuple(args) == self.variables:
            return self.poly
        p = self.poly
        tmp = [f"__arg{i}" for i in range(len(self.variables))]
        for v, t in zip(self.variables, tmp):
            p = p.subs(v, Poly.var(t))
        for t, a in zip(tmp, args):
            p = p.subs(t, a)
        return p


def constant_testfn(arity: int, value=1) -> PolyTestFn:
    vs = [f"t{i}" for i in range(arity)]
    return PolyTestFn(Poly.const(value), vs)


def window(variables: Sequence[str], power: int) -> Poly:
    """``prod (v (1 - v))^power`` which vanishes to order ``power`` on the unit cube faces."""
    out = Poly.const(1)
    for v in variables:
        x = Poly.var(v)
        out = out * (x * (1 - x)) ** power
    return out


def _falling(p: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= p - i
    return out


def _window_deriv(v, p: int, k: int):
    """``(d/dv)^k [v (1 - v)]^p`` as a sum of products (accurate near 0 and 1)."""
    acc = 0.0
    for j in range(k + 1):
        if j > p or k - j > p:
            continue
        c = comb(k, j) * _falling(p, j) * _falling(p, k - j) * (-1) ** (k - j)
        acc = acc + c * v ** (p - j) * (1 - v) ** (p - k + j)
    return acc


class WindowedPolyTestFn(PolyTestFn):
    """``P * prod_v (v (1 - v))^p`` evaluated in factored form.

    The expanded product is exact but loses all relative accuracy near the
    cube faces where the window vanishes; numerical evaluation therefore
    uses the Leibniz rule on the factors.
    """

    def __init__(self, base: Poly, variables: Sequence[str], power: int, support=None, name: str = "u",
                 deriv: tuple[int, ...] | None = None):
        self.base = base
        self.power = power
        full = base * window(variables, power)
        super().__init__(full, variables, support, name)
        self.deriv = deriv if deriv is not None else (0,) * len(self.variables)
        if any(self.deriv):
            for v, k in zip(self.variables, self.deriv):
                if k:
                    self.poly = self.poly.diff(v, k)
        self.fn = self._eval

    def _eval(self, *args):
        args = [np.asarray(a, dtype=float) for a in args]
        alpha = self.deriv
        acc = 0.0
        for beta in _multi_range(alpha):
            c = 1
            dp = self.base
            for v, b, a in zip(self.variables, beta, alpha):
                c *= comb(a, b)
                if b:
                    dp = dp.diff(v, b)
            if dp.is_zero():
                continue
            term = c * _poly_numeric(dp, self.variables, args)
            for x, b, a in zip(args, beta, alpha):
                term = term * _window_deriv(x, self.power, a - b)
            acc = acc + term
        if np.ndim(acc) == 0 and args and np.ndim(args[0]) > 0:
            acc = np.full(np.shape(np.broadcast_arrays(*args)[0]), float(acc))
        return acc

    def derivative(self, index: Sequence[int]) -> "WindowedPolyTestFn":
        total = tuple(a + b for a, b in zip(self.deriv, index))
        return WindowedPolyTestFn(self.base, self.variables, self.power, self.support, self.name, total)

    def as_poly(self, args: Sequence[str] | None = None) -> Poly:
        return PolyTestFn(self.poly, self.variables).as_poly(args)


def _multi_range(alpha):
    if not alpha:
        yield ()
        return
    for b in range(alpha[0] + 1):
        for rest in _multi_range(alpha[1:]):
            yield (b,) + rest


def _poly_numeric(p: Poly, variables, args):
    acc = 0.0
    for m, c in p.terms.items():
        t = float(c)
        md = dict(m)
        for v, a in zip(variables, args):
            e = md.get(v, 0)
            if e:
                t = t * a ** e
        acc = acc + t
    return acc


def random_poly(rng: np.random.Generator, variables: Sequence[str], degree: int, denom: int = 8) -> Poly:
    """Random polynomial of total degree <= ``degree`` with small rational coefficients."""
    terms = {}
    exps = _exponents(len(variables), degree)
    for e in exps:
        num = int(rng.integers(-denom, denom + 1))
        if num:
            terms[tuple((v, k) for v, k in zip(variables, e) if k)] = Fraction(num, denom)
    if not terms:
        terms[()] = Fraction(1)
    return Poly(terms)


def _exponents(nvars: int, degree: int):
    if nvars == 0:
        yield ()
        return
    for k in range(degree + 1):
        for rest in _exponents(nvars - 1, degree - k):
            yield (k,) + rest


def random_testfn(rng: np.random.Generator, variables: Sequence[str], degree: int = 4,
                  window_power: int = 0) -> PolyTestFn:
    p = random_poly(rng, variables, degree)
    support = [(0.0, 1.0)] * len(variables)
    if window_power:
        return WindowedPolyTestFn(p, variables, window_power, support)
    return PolyTestFn(p, variables, support=support)
