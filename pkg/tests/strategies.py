"""Hypothesis strategies for coefficients, affine forms and expressions."""
from fractions import Fraction

from hypothesis import strategies as st

from vpcalc import Affine, Delta, DistExpr, DistTerm, Log, Mono, PiCoeff, Pole, Poly, Theta

VARS = ("x", "y", "z1", "z2")

fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))
nonzero_fractions = fractions.filter(lambda r: r != 0)

coeffs = st.dictionaries(st.integers(0, 3), fractions, max_size=3).map(PiCoeff)
nonzero_coeffs = coeffs.filter(lambda c: not c.is_zero())


@st.composite
def affines(draw, variables=VARS):
    names = draw(st.lists(st.sampled_from(variables), min_size=1, max_size=3, unique=True))
    return Affine(draw(fractions), {v: draw(nonzero_fractions) for v in names})


monos = st.lists(st.tuples(st.sampled_from(VARS), st.integers(0, 3)), max_size=3).map(
    lambda items: tuple(sorted({v: e for v, e in items if e}.items())))
polys = st.dictionaries(monos, fractions, max_size=4).map(Poly)

factors = st.one_of(
    st.builds(Pole, affines(), st.integers(1, 3)),
    st.builds(Delta, affines(), st.integers(0, 2)),
    st.builds(Log, affines()),
    st.builds(Theta, affines()),
    monos.filter(bool).map(Mono),
)

terms = st.builds(DistTerm, nonzero_coeffs, st.lists(factors, max_size=3).map(tuple))
exprs = st.lists(terms, min_size=1, max_size=3).map(DistExpr)


@st.composite
def delta_chains(draw):
    ds = draw(st.lists(st.builds(Delta, affines(), st.integers(0, 1)), min_size=2, max_size=3))
    extra = draw(st.lists(monos.filter(bool).map(Mono), max_size=1))
    return DistTerm(draw(nonzero_coeffs), tuple(ds + extra))
