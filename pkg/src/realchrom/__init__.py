"""Coefficient rings of Real Johnson-Wilson type theories and the spectral sequences computing them."""

__version__ = "0.1.0"

from .grading import Bidegree, Monomial, dimension, parse  # noqa: E402
from .rings import Generator, GroupSummary, NotInTheory, TheoryId, group_at, normal_form, twist_slice  # noqa: E402

__all__ = ["Bidegree", "Monomial", "dimension", "parse", "Generator", "GroupSummary", "NotInTheory",
           "TheoryId", "group_at", "normal_form", "twist_slice"]
