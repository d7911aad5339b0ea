"""Affine forms and sparse multivariate polynomials over Q.

Variables are plain strings; the fixed total order on variables is the
lexicographic order of their names.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Mapping

Mono = tuple  # tuple of (var, exponent) pairs, sorted by var


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Affine:
    """``const + sum coeffs[v] * v`` with rational coefficients."""

    __slots__ = ("const", "coeffs", "_hash")

    def __init__(self, const=0, coeffs: Mapping[str, object] | None = None):
        self.const = _frac(const)
        items = {} if coeffs is None else {v: _frac(c) for v, c in coeffs.items()}
        self.coeffs = tuple(sorted((v, c) for v, c in items.items() if c != 0))
        self._hash = hash((self.const, self.coeffs))

    @classmethod
    def var(cls, name: str, coeff=1) -> "Affine":
        return cls(0, {name: coeff})

    @classmethod
    def const_(cls, c) -> "Affine":
        return cls(c)

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, v: str) -> Fraction:
        for name, c in self.coeffs:
            if name == v:
                return c
        return Fraction(0)

    def has(self, v: str) -> bool:
        return any(name == v for name, _ in self.coeffs)

    def is_const(self) -> bool:
        return not self.coeffs

    def lead(self) -> str | None:
        return self.coeffs[0][0] if self.coeffs else None

    def lead_coeff(self) -> Fraction:
        return self.coeffs[0][1] if self.coeffs else Fraction(0)

    def __add__(self, other):
        other = _aff(other)
        d = dict(self.coeffs)
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return Affine(self.const + other.const, d)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.const, {v: -c for v, c in self.coeffs})

    def __sub__(self, other):
        return self + (-_aff(other))

    def __rsub__(self, other):
        return _aff(other) - self

    def scale(self, s) -> "Affine":
        s = _frac(s)
        return Affine(self.const * s, {v: c * s for v, c in self.coeffs})

    def without(self, v: str) -> "Affine":
        return Affine(self.const, {n: c for n, c in self.coeffs if n != v})

    def solve_for(self, v: str) -> "Affine":
        """Root in ``v`` of ``self == 0`` as an affine form in the other vars."""
        a = self.coeff(v)
        if a == 0:
            raise ValueError(f"{v} does not occur in {self}")
        return self.without(v).scale(-1 / a)

    def subs(self, v: str, repl: "Affine") -> "Affine":
        a = self.coeff(v)
        if a == 0:
            return self
        return self.without(v) + _aff(repl).scale(a)

    def subs_many(self, env: Mapping[str, "Affine"]) -> "Affine":
        out = self
        for v, r in env.items():
            out = out.subs(v, r)
        return out

    def evaluate(self, env: Mapping[str, object]):
        acc = float(self.const)
        for v, c in self.coeffs:
            acc = acc + float(c) * env[v]
        return acc

    def to_poly(self) -> "Poly":
        d = {(): self.const} if self.const else {}
        for v, c in self.coeffs:
            d[((v, 1),)] = c
        return Poly(d)

    def key(self):
        return (self.coeffs, self.const)

    def __eq__(self, other):
        if not isinstance(other, Affine):
            if isinstance(other, (int, Fraction)):
                return self.is_const() and self.const == other
            return NotImplemented
        return self.const == other.const and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Affine({format_affine(self)!r})"

    def __str__(self):
        return format_affine(self)


def _aff(x) -> Affine:
    if isinstance(x, Affine):
        return x
    return Affine(x)


def _fmt_rat(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_affine(a: Affine) -> str:
    parts: list[tuple[str, str]] = []
    for v, c in a.coeffs:
        mag = abs(c)
        body = v if mag == 1 else f"{_fmt_rat(mag)}*{v}"
        parts.append(("-" if c < 0 else "+", body))
    if a.const != 0 or not parts:
        parts.append(("-" if a.const < 0 else "+", _fmt_rat(abs(a.const))))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f"{sign}{body}"
    return out


class Poly:
    """Sparse polynomial: dict from monomial to rational coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, object] | None = None):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = _frac(c)
                if c != 0:
                    m = _canon_mono(m)
                    self.terms[m] = self.terms.get(m, Fraction(0)) + c
            self.terms = {m: c for m, c in self.terms.items() if c != 0}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, v: str) -> "Poly":
        return cls({((v, 1),): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    @property
    def vars(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def __add__(self, other):
        other = _poly(other)
        d = dict(self.terms)
        for m, c in other.terms.items():
            d[m] = d.get(m, 0) + c
        return Poly(d)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_poly(other))

    def __rsub__(self, other):
        return _poly(other) - self

    def __mul__(self, other):
        other = _poly(other)
        d: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                d[m] = d.get(m, 0) + c1 * c2
        return Poly(d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = _poly(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def diff(self, v: str, order: int = 1) -> "Poly":
        out = self
        for _ in range(order):
            d = {}
            for m, c in out.terms.items():
                e = dict(m).get(v, 0)
                if e:
                    nm = dict(m)
                    nm[v] = e - 1
                    d[tuple(sorted(nm.items()))] = d.get(tuple(sorted(nm.items())), 0) + c * e
            out = Poly(d)
        return out

    def degree(self, v: str) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def subs(self, v: str, repl) -> "Poly":
        """Substitute ``v`` by a Poly/Affine/number."""
        if isinstance(repl, Affine):
            repl = repl.to_poly()
        repl = _poly(repl)
        if v not in self.vars:
            return self
        powers = {0: Poly.const(1)}
        acc: dict = {}
        for m, c in self.terms.items():
            md = dict(m)
            e = md.pop(v, 0)
            if e not in powers:
                powers[e] = repl ** e
            rest = tuple(sorted(md.items()))
            for pm, pc in powers[e].terms.items():
                k = _mono_mul(rest, pm)
                acc[k] = acc.get(k, 0) + c * pc
        return Poly(acc)

    def coeffs_in(self, v: str) -> dict[int, "Poly"]:
        """Coefficients as polynomials in the remaining variables."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            md = dict(m)
            e = md.pop(v, 0)
            out.setdefault(e, {})[tuple(sorted(md.items()))] = c
        return {e: Poly(d) for e, d in out.items()}

    def divide_linear(self, v: str, root: "Poly") -> "Poly | None":
        """Exact quotient by ``(v - root)`` or None when not divisible."""
        cs = self.coeffs_in(v)
        n = max(cs)
        if n == 0:
            return None
        q: dict[int, Poly] = {}
        carry = Poly()
        for e in range(n, 0, -1):
            carry = cs.get(e, Poly()) + carry * root if e != n else cs[n]
            q[e - 1] = carry
        rem = cs.get(0, Poly()) + carry * root
        if not rem.is_zero():
            return None
        out = Poly()
        for e, c in q.items():
            out = out + c * Poly({((v, e),): 1} if e else {(): 1})
        return out

    def evaluate(self, env: Mapping[str, object]):
        acc = 0.0
        for m, c in self.terms.items():
            t = float(c)
            for v, e in m:
                t = t * env[v] ** e
            acc = acc + t
        return acc

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        return "Poly(" + " + ".join(f"{c}*{format_mono(m)}" for m, c in sorted(self.terms.items())) + ")"


def _poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, Affine):
        return x.to_poly()
    return Poly.const(x)


def _canon_mono(m) -> Mono:
    d: dict[str, int] = {}
    for v, e in m:
        if e:
            d[v] = d.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    return _canon_mono(a + b)


def format_mono(m: Mono) -> str:
    if not m:
        return "1"
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def binomial(n: int, k: int) -> int:
    return comb(n, k)
