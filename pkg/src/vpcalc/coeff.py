"""Exact coefficients in Q[pi^2].

Every closed-form constant produced by the reduction formulas is a rational
polynomial in pi^2, so a coefficient is stored as a sparse map
``k -> r`` meaning ``sum r * pi^(2k)``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


class PiCoeff:
    """Immutable element of Q[pi^2]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for k, r in items:
            if k < 0:
                raise ValueError("negative power of pi^2")
            acc[k] = acc.get(k, Fraction(0)) + Fraction(r)
        self._terms = tuple(sorted((k, r) for k, r in acc.items() if r != 0))
        self._hash = hash(self._terms)

    # constructors
    @classmethod
    def rational(cls, r: Number) -> "PiCoeff":
        return cls({0: r})

    @classmethod
    def pi2(cls, power: int = 1, r: Number = 1) -> "PiCoeff":
        return cls({power: r})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(k == 0 for k, _ in self._terms)

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms[0][1] if self._terms else Fraction(0)

    def monomials(self) -> list["PiCoeff"]:
        return [PiCoeff({k: r}) for k, r in self._terms]

    # ring operations
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return PiCoeff(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self):
        return PiCoeff([(k, -r) for k, r in self._terms])

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, Fraction] = {}
        for k1, r1 in self._terms:
            for k2, r2 in other._terms:
                out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + r1 * r2
        return PiCoeff(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        return self._hash

    def __float__(self):
        return coeff_to_float(self)

    def __repr__(self):
        return f"PiCoeff({format_coeff(self)!r})"

    def __str__(self):
        return format_coeff(self)


def _coerce(x):
    if isinstance(x, PiCoeff):
        return x
    if isinstance(x, (int, Fraction)):
        return PiCoeff.rational(x)
    return NotImplemented


ZERO = PiCoeff()
ONE = PiCoeff.rational(1)
PI2 = PiCoeff.pi2()


def coeff_add(a: PiCoeff, b: PiCoeff) -> PiCoeff:
    return a + b


def coeff_mul(a: PiCoeff, b: PiCoeff) -> PiCoeff:
    return a * b


def coeff_to_float(a: PiCoeff) -> float:
    # Horner in pi^2 keeps the rounding to a few ulps
    if a.is_zero():
        return 0.0
    p2 = math.pi ** 2
    top = a._terms[-1][0]
    d = a.terms
    acc = 0.0
    for k in range(top, -1, -1):
        acc = acc * p2 + float(d.get(k, 0))
    return acc


def format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_coeff(a: PiCoeff) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for k, r in a._terms:
        if k == 0:
            body = format_rational(abs(r))
        elif abs(r) == 1:
            body = f"pi^{2 * k}"
        else:
            body = f"{format_rational(abs(r))}*pi^{2 * k}"
        parts.append(("-" if r < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_MONO = re.compile(
    r"^(?:(?P<num>\d+)(?:/(?P<den>\d+))?(?:\*pi\^(?P<p1>\d+))?|pi\^(?P<p2>\d+))$"
)


def parse_coeff(text: str) -> PiCoeff:
    """Inverse of :func:`format_coeff`."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    chunks = re.findall(r"[+-]?[^+-]+", s)
    if "".join(chunks) != s:
        raise ValueError(f"malformed coefficient {text!r}")
    total = ZERO
    for chunk in chunks:
        sign = -1 if chunk.startswith("-") else 1
        body = chunk.lstrip("+-")
        m = _MONO.match(body)
        if not m:
            raise ValueError(f"malformed coefficient term {chunk!r}")
        power = m.group("p1") or m.group("p2")
        if power is not None and int(power) % 2:
            raise ValueError("only even powers of pi are representable")
        k = int(power) // 2 if power else 0
        r = Fraction(int(m.group("num")), int(m.group("den") or 1)) if m.group("num") else Fraction(1)
        total = total + PiCoeff({k: sign * r})
    return total
