"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from realchrom.grading import Monomial


@st.composite
def monomials(draw, max_index=4, max_r=4, max_s=20, max_a=12, v0=True):
    lo = 0 if v0 else 1
    idx = draw(st.lists(st.integers(lo, max_index), unique=True, max_size=3))
    vexp = tuple(sorted((i, draw(st.integers(1, max_r))) for i in idx))
    return Monomial(vexp, draw(st.integers(-max_s, max_s)), draw(st.integers(-max_a, max_a)))
