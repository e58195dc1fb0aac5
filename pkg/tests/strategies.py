from fractions import Fraction

from hypothesis import strategies as st

from crjet.series import GaussianRational, TruncatedSeries

VARS = ("x", "y")

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)
gaussian = st.builds(GaussianRational, small, small)
nonzero_gaussian = gaussian.filter(bool)
monomial = st.tuples(*[st.integers(0, 3) for _ in VARS])


def polys(variables=VARS, max_terms=5, constant=True):
    terms = st.dictionaries(st.tuples(*[st.integers(0, 3) for _ in variables]), gaussian, max_size=max_terms)
    if not constant:
        terms = terms.map(lambda d: {e: c for e, c in d.items() if any(e)})
    return terms.map(lambda d: TruncatedSeries(variables, d))


def series(variables=VARS, max_terms=5, constant=True):
    """Exact polynomials or truncated series with trunc in 2..6."""
    trunc = st.one_of(st.none(), st.integers(2, 6))
    return st.builds(
        lambda p, t: p if t is None else p.truncate(t), polys(variables, max_terms, constant), trunc
    )


def as_fraction(x):
    return Fraction(x)
