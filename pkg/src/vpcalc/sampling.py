"""Seeded random coefficients, polynomials and expressions.

Used by the property checks in :mod:`vpcalc.scenarios` and by the test
suite; everything is driven by a ``numpy.random.Generator`` so runs are
reproducible from a seed.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Affine, Poly
from .coeff import PiCoeff
from .expr import Delta, DistExpr, DistTerm, Log, Mono, Pole, Theta

VARIABLES = ("x", "y", "z1", "z2")


def random_fraction(rng: np.random.Generator, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1)))


def random_coeff(rng: np.random.Generator, max_power: int = 2) -> PiCoeff:
    return PiCoeff({int(rng.integers(0, max_power + 1)): random_fraction(rng) for _ in range(rng.integers(0, 3))})


def random_poly(rng: np.random.Generator, variables: Sequence[str] = VARIABLES[:2], terms: int = 3,
                degree: int = 2) -> Poly:
    out = {}
    for _ in range(terms):
        mono = tuple((v, int(rng.integers(0, degree + 1))) for v in variables)
        out[tuple((v, e) for v, e in mono if e)] = random_fraction(rng)
    return Poly(out)


def random_affine(rng: np.random.Generator, variables: Sequence[str] = VARIABLES) -> Affine:
    """Affine form with at least one variable."""
    k = int(rng.integers(1, min(3, len(variables)) + 1))
    chosen = rng.choice(len(variables), size=k, replace=False)
    coeffs = {}
    for i in chosen:
        c = random_fraction(rng, 3, 2)
        coeffs[variables[int(i)]] = c if c else Fraction(1)
    return Affine(random_fraction(rng, 2, 2), coeffs)


def random_factor(rng: np.random.Generator, variables: Sequence[str] = VARIABLES):
    kind = rng.integers(0, 5)
    arg = random_affine(rng, variables)
    if kind == 0:
        return Pole(arg, int(rng.integers(1, 4)))
    if kind == 1:
        return Delta(arg, int(rng.integers(0, 3)))
    if kind == 2:
        return Log(arg)
    if kind == 3:
        return Theta(arg)
    v = variables[int(rng.integers(0, len(variables)))]
    return Mono(((v, int(rng.integers(1, 3))),))


def random_term(rng: np.random.Generator, max_factors: int = 3, variables: Sequence[str] = VARIABLES) -> DistTerm:
    c = random_coeff(rng)
    if c.is_zero():
        c = PiCoeff.rational(1)
    n = int(rng.integers(0, max_factors + 1))
    return DistTerm(c, tuple(random_factor(rng, variables) for _ in range(n)))


def random_expr(rng: np.random.Generator, max_terms: int = 3, max_factors: int = 3,
                variables: Sequence[str] = VARIABLES) -> DistExpr:
    n = int(rng.integers(1, max_terms + 1))
    return DistExpr([random_term(rng, max_factors, variables) for _ in range(n)])


def random_delta_chain(rng: np.random.Generator, length: int = 3, variables: Sequence[str] = VARIABLES) -> DistTerm:
    """Product of deltas (and an optional polynomial factor)."""
    factors = [Delta(random_affine(rng, variables), int(rng.integers(0, 2))) for _ in range(length)]
    if rng.integers(0, 2):
        v = variables[int(rng.integers(0, len(variables)))]
        factors.append(Mono(((v, int(rng.integers(1, 3))),)))
    return DistTerm(random_coeff(rng) or PiCoeff.rational(1), tuple(factors))
