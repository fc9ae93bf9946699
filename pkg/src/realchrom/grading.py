"""RO(Z/2) bidegrees and formal monomials v_R s^j a^t.

A bidegree ``(k, l)`` stands for ``k + l*alpha`` where alpha is the sign
representation.  Generator dimensions:

    v_i   (2^i - 1)(1 + alpha)   -> (2^i - 1, 2^i - 1)
    s     -1 + alpha             -> (-1, 1)        (sigma)
    a     -alpha                 -> (0, -1)

Monomials print in a fixed text grammar, e.g. ``v0 v1^3 s^-4 a^2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "Bidegree",
    "Monomial",
    "MonomialParseError",
    "UNIT",
    "dimension",
    "milnor_weight",
    "parse",
    "parse_bidegree",
    "v_dim",
]


class MonomialParseError(ValueError):
    """Malformed monomial or bidegree text; ``offset`` is the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True, slots=True)
class Bidegree:
    k: int
    l: int

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.k + other.k, self.l + other.l)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.k - other.k, self.l - other.l)

    def __neg__(self) -> "Bidegree":
        return Bidegree(-self.k, -self.l)

    def __iter__(self):
        yield self.k
        yield self.l

    @property
    def twist(self) -> int:
        return self.l

    def __str__(self) -> str:
        return f"{self.k}+{self.l}A"


ZERO_DEGREE = Bidegree(0, 0)
SHIFT = Bidegree(-1, 0)  # every differential and connecting map moves by this

_BIDEGREE_RE = re.compile(r"(-?\d+)\+(-?\d+)A")


def parse_bidegree(text: str) -> Bidegree:
    m = _BIDEGREE_RE.fullmatch(text)
    if m is None:
        raise MonomialParseError(f"bad bidegree {text!r}", 0)
    return Bidegree(int(m.group(1)), int(m.group(2)))


def v_dim(i: int) -> int:
    """Half the BP_* degree of v_i, i.e. 2^i - 1."""
    return (1 << i) - 1


@dataclass(frozen=True, slots=True)
class Monomial:
    """Formal word ``prod v_i^{r_i} * s^sexp * a^aexp``.

    ``vexp`` is a sorted tuple of ``(i, r_i)`` pairs with every ``r_i >= 1``.
    """

    vexp: tuple[tuple[int, int], ...] = ()
    sexp: int = 0
    aexp: int = 0

    def __post_init__(self):
        prev = -1
        for i, r in self.vexp:
            if i <= prev or r < 1:
                raise ValueError(f"non-canonical vexp {self.vexp!r}")
            prev = i

    @classmethod
    def make(cls, v: Mapping[int, int] | Iterable[tuple[int, int]] = (), s: int = 0, a: int = 0) -> "Monomial":
        items = v.items() if isinstance(v, Mapping) else v
        acc: dict[int, int] = {}
        for i, r in items:
            if i < 0:
                raise ValueError("v index must be >= 0")
            acc[i] = acc.get(i, 0) + r
        return cls(tuple(sorted((i, r) for i, r in acc.items() if r)), s, a)

    # ordering is lexicographic on (vexp, sexp, aexp)
    def key(self):
        return (self.vexp, self.sexp, self.aexp)

    def __lt__(self, other: "Monomial") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "Monomial") -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: "Monomial") -> bool:
        return self.key() > other.key()

    def __ge__(self, other: "Monomial") -> bool:
        return self.key() >= other.key()

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial.make(self.vexp + other.vexp, self.sexp + other.sexp, self.aexp + other.aexp)

    @property
    def vdict(self) -> dict[int, int]:
        return dict(self.vexp)

    def r(self, i: int) -> int:
        for j, r in self.vexp:
            if j == i:
                return r
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.vexp)

    @property
    def min_index(self) -> int | None:
        return self.vexp[0][0] if self.vexp else None

    @property
    def is_v_free(self) -> bool:
        return not self.vexp

    @property
    def half_weight(self) -> int:
        """sum r_i (2^i - 1); v_0 contributes nothing."""
        return sum(r * v_dim(i) for i, r in self.vexp)

    def with_v(self, i: int, delta: int) -> "Monomial":
        return Monomial.make(self.vexp + ((i, delta),), self.sexp, self.aexp)

    def drop_v0(self) -> "Monomial":
        return Monomial(tuple(p for p in self.vexp if p[0] != 0), self.sexp, self.aexp)

    def dimension(self) -> Bidegree:
        return dimension(self)

    def __str__(self) -> str:
        parts = []
        for i, r in self.vexp:
            parts.append(f"v{i}" if r == 1 else f"v{i}^{r}")
        if self.sexp:
            parts.append(f"s^{self.sexp}")
        if self.aexp:
            parts.append("a" if self.aexp == 1 else f"a^{self.aexp}")
        return " ".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"Monomial({str(self)!r})"


UNIT = Monomial()


def dimension(m: Monomial) -> Bidegree:
    d = m.half_weight
    return Bidegree(d - m.sexp, d + m.sexp - m.aexp)


def milnor_weight(m: Monomial) -> int:
    """Degree of the v-part in nonequivariant BP_*: sum r_i * 2(2^i - 1)."""
    return 2 * m.half_weight


_TOKEN_RE = re.compile(r"v(\d+)(?:\^(-?\d+))?|s\^(-?\d+)|a(?:\^(-?\d+))?")


def parse(text: str) -> Monomial:
    """Parse the monomial grammar; repeated factors multiply."""
    if text == "1":
        return UNIT
    if not text:
        raise MonomialParseError("empty monomial", 0)
    v: dict[int, int] = {}
    s = a = 0
    pos = 0
    for tok in text.split(" "):
        if not tok:
            raise MonomialParseError("empty token (double space?)", pos)
        m = _TOKEN_RE.fullmatch(tok)
        if m is None:
            raise MonomialParseError(f"bad token {tok!r}", pos)
        if m.group(1) is not None:
            e = _exponent(m.group(2), pos)
            if e < 0:
                raise MonomialParseError("negative v exponent", pos)
            i = int(m.group(1))
            v[i] = v.get(i, 0) + e
        elif m.group(3) is not None:
            s += _exponent(m.group(3), pos)
        else:
            a += _exponent(m.group(4), pos)
        pos += len(tok.encode()) + 1
    return Monomial.make(v, s, a)


def _exponent(text: str | None, pos: int) -> int:
    if text is None:
        return 1
    e = int(text)
    if e == 0:
        raise MonomialParseError("zero exponent", pos)
    return e
