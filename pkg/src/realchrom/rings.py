"""Closed-form additive models of the six coefficient theories.

Every theory is described by an explicit basis of monomials.  Scalars are
2-local integers and every structure constant is a power of two, so a
coefficient is tracked as its 2-adic valuation (``v_0 = 2``).

Theories (``n >= 0`` is the height):

* ``BPR``        -- Z_(2)[v_k s^{l 2^{k+1}}, a] / ~
* ``BPRn``       -- first summand with v-support in {0..n}, plus Z/2[s^{-2^{n+1}}, a]
* ``Tate``       -- Z/2[s^{+-2^{n+1}}, a^{+-1}]
* ``BorelCoh``   -- first summand plus Z/2[s^{+-2^{n+1}}, a]; at t = 0 the free
                    class s^{2^{n+1}m} absorbs v_0 s^{2^{n+1}m} = 2 s^{2^{n+1}m}
* ``BorelHom``   -- fibre of BorelCoh -> Tate: the v-ideal of the first summand
                    plus the desuspended cokernel S^-1 s^{2^{n+1}m} a^{-t}, t >= 1
* ``Geometric``  -- Z/2[s^{-2^{n+1}}, a^{+-1}]

The "first summand" basis is: ``a^t`` (t >= 0), and ``v_0^e v_R s^s a^t`` with
``R`` over indices >= 1, where for ``m = min(R)``: ``e = 0`` needs
``2^{m+1} | s`` and ``0 <= t <= 2^{m+1} - 2``; ``e = 1`` needs ``s`` even but
not divisible by ``2^{m+1}`` and ``t = 0``.  With ``R`` empty, ``v_0 s^s``
for even ``s != 0``.  Classes with ``t = 0`` are free, the rest have order 2.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from .grading import UNIT, Bidegree, Monomial, dimension, v_dim

__all__ = [
    "KINDS",
    "Generator",
    "GroupSummary",
    "NotInTheory",
    "Reduction",
    "TheoryId",
    "basis_window",
    "collision_bidegrees",
    "corollary_diff",
    "corollary_view",
    "group_at",
    "in_theory",
    "normal_form",
    "rewrite_steps",
    "second_summand_classes",
    "table_records",
    "twist_slice",
]

KINDS = ("BPR", "BPRn", "Tate", "BorelCoh", "BorelHom", "Geometric")
CLI_NAMES = {k.lower(): k for k in KINDS}
MODES = ("theorem", "corollary", "literal")

FREE = "free"
TWO = "two"


class NotInTheory(ValueError):
    pass


@dataclass(frozen=True)
class TheoryId:
    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown theory {self.kind!r}")
        if self.kind == "BPR":
            if self.n is not None:
                raise ValueError("BPR takes no height")
        elif self.n is None or self.n < 0:
            raise ValueError(f"{self.kind} needs a height n >= 0")

    @classmethod
    def parse(cls, name: str, n: int | None = None) -> "TheoryId":
        kind = CLI_NAMES.get(name.lower())
        if kind is None:
            raise ValueError(f"unknown theory {name!r}")
        return cls(kind, None if kind == "BPR" else n)

    @property
    def cli_name(self) -> str:
        return self.kind.lower()

    @property
    def period(self) -> int:
        """2^{n+1}: the sigma-period of the v-free families."""
        return 1 << (self.n + 1)

    def __str__(self) -> str:
        return self.kind if self.n is None else f"{self.kind}({self.n})"


@dataclass(frozen=True, order=False)
class Generator:
    """A cyclic summand: ``monomial`` of order ``free`` or ``two``.

    ``desusp = 1`` marks a class S^-1 x living in dimension(x) + (-1, 0).
    """

    monomial: Monomial
    order: str
    desusp: int = 0

    @property
    def degree(self) -> Bidegree:
        d = dimension(self.monomial)
        return Bidegree(d.k - self.desusp, d.l)

    def key(self):
        return (self.desusp, self.monomial.key())

    def __lt__(self, other: "Generator") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return ("S^-1 " * self.desusp) + str(self.monomial)


@dataclass(frozen=True)
class GroupSummary:
    free_rank: int
    z2_count: int
    generators: tuple[Generator, ...] = ()

    @classmethod
    def of(cls, gens) -> "GroupSummary":
        gens = tuple(sorted(gens))
        if len({g.key() for g in gens}) != len(gens):
            raise ValueError(f"duplicate generators {gens}")
        return cls(sum(g.order == FREE for g in gens), sum(g.order == TWO for g in gens), gens)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    @property
    def shape(self) -> tuple[int, int]:
        return (self.free_rank, self.z2_count)

    def group_text(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z(2)" if self.free_rank == 1 else f"Z(2)^{self.free_rank}")
        if self.z2_count:
            parts.append("Z/2" if self.z2_count == 1 else f"(Z/2)^{self.z2_count}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        return f"{self.group_text()} {{{', '.join(str(g) for g in self.generators)}}}"


@dataclass(frozen=True)
class Reduction:
    """``2^valuation * basis``, or zero when ``basis`` is None."""

    valuation: int | None
    basis: Monomial | None

    @property
    def is_zero(self) -> bool:
        return self.basis is None


ZERO = Reduction(None, None)


# ---------------------------------------------------------------- membership

def _first_ok(m: Monomial, nmax: int | None) -> bool:
    if m.aexp < 0:
        return False
    if nmax is not None and m.vexp and m.vexp[-1][0] > nmax:
        return False
    if not m.vexp:
        return m.sexp == 0
    return m.sexp % (2 << m.vexp[0][0]) == 0


def _second_ok(m: Monomial, th: TheoryId) -> bool:
    """v-free monomials of the Z/2 families (pure a-powers excluded)."""
    if m.vexp or th.kind in ("BPR", "BorelHom"):
        return False
    p = th.period
    if th.kind == "BPRn":
        return m.sexp < 0 and m.sexp % p == 0 and m.aexp >= 0
    if th.kind == "BorelCoh":
        return m.sexp != 0 and m.sexp % p == 0 and m.aexp >= 0
    if th.kind == "Tate":
        return m.sexp % p == 0
    if th.kind == "Geometric":
        return m.sexp <= 0 and m.sexp % p == 0
    return False


def in_theory(m: Monomial, th: TheoryId) -> bool:
    """Whether ``m`` is a product of the theory's monomial generators."""
    if th.kind in ("Tate", "Geometric"):
        return _second_ok(m, th)
    if th.kind == "BorelHom":
        return bool(m.vexp) and _first_ok(m, th.n)
    return _first_ok(m, th.n) or _second_ok(m, th)


def _strippable(m: Monomial, th: TheoryId) -> bool:
    """Can one v_0 be traded for a factor 2 while staying in the theory?"""
    if m.r(0) < 1:
        return False
    rest = m.with_v(0, -1)
    if th.kind == "BorelCoh" and _second_ok(rest, th):
        return True
    if th.kind == "BorelHom":
        return bool(rest.vexp) and _first_ok(rest, th.n)
    return _first_ok(rest, th.n)


def _annihilated(m: Monomial) -> bool:
    mi = m.min_index
    return mi is not None and m.aexp >= (2 << mi) - 1


def order_of(m: Monomial, th: TheoryId) -> str:
    """Order tag of a basis monomial."""
    if th.kind in ("Tate", "Geometric") or (th.kind == "BPRn" and m.is_v_free and m.sexp):
        return TWO
    return FREE if m.aexp == 0 else TWO


def normal_form(m: Monomial, th: TheoryId) -> Reduction:
    if not in_theory(m, th):
        raise NotInTheory(f"{m} is not in {th}")
    val = 0
    while _strippable(m, th):
        m = m.with_v(0, -1)
        val += 1
    if _annihilated(m):
        return ZERO
    if val and m.aexp >= 1:
        return ZERO
    return Reduction(val, m)


def rewrite_steps(state: tuple[int, Monomial] | None, th: TheoryId):
    """All single rewrites of ``2^val * m``; ``None`` is the zero state."""
    if state is None:
        return []
    val, m = state
    out = []
    if _strippable(m, th):
        out.append(("v0", (val + 1, m.with_v(0, -1))))
    if _annihilated(m):
        out.append(("ann", None))
    if val and m.aexp >= 1:
        out.append(("2a", None))
    return out


def rewrite_random(m: Monomial, th: TheoryId, rng: random.Random) -> Reduction:
    """Reduce by applying randomly chosen applicable rules until none apply."""
    if not in_theory(m, th):
        raise NotInTheory(f"{m} is not in {th}")
    state: tuple[int, Monomial] | None = (0, m)
    while True:
        steps = rewrite_steps(state, th)
        if not steps:
            break
        state = rng.choice(steps)[1]
    return ZERO if state is None else Reduction(*state)


# ---------------------------------------------------------------- enumeration

def _multisets(indices: list[int], budget: int, start: int = 0) -> Iterator[tuple[tuple[int, int], ...]]:
    """All v-words over ``indices[start:]`` with half-weight <= budget."""
    yield ()
    for pos in range(start, len(indices)):
        i = indices[pos]
        w = v_dim(i)
        if w > budget:
            break
        r = 1
        while r * w <= budget:
            for rest in _multisets(indices, budget - r * w, pos + 1):
                yield ((i, r),) + rest
            r += 1


def _multiples_in(lo: int, hi: int, step: int) -> range:
    first = -(-lo // step) * step
    return range(first, hi + 1, step)


@dataclass
class _Window:
    kmin: int
    kmax: int
    lmin: int
    lmax: int

    def __contains__(self, b) -> bool:
        k, l = b
        return self.kmin <= k <= self.kmax and self.lmin <= l <= self.lmax

    @property
    def empty(self) -> bool:
        return self.kmin > self.kmax or self.lmin > self.lmax


def _first_summand(win: _Window, nmax: int | None, *, units: bool = True, ideal: bool = False,
                   collision_n: int | None = None, stats: dict | None = None):
    """Yield (monomial, order) for first-summand basis classes in ``win``."""
    if units:
        for t in range(max(0, -win.lmax), -win.lmin + 1):
            if 0 in range(win.kmin, win.kmax + 1):
                yield Monomial((), 0, t), (FREE if t == 0 else TWO)
    if ideal and (0, 0) in win:
        yield Monomial(((0, 1),)), FREE
    # v_0 s^s with R empty: dimension (-s, s)
    for s in range(max(-win.kmax, win.lmin), min(-win.kmin, win.lmax) + 1):
        if s and s % 2 == 0:
            if collision_n is not None and s % (2 << collision_n) == 0:
                yield Monomial((), s, 0), FREE
            else:
                yield Monomial(((0, 1),), s, 0), FREE
    W = win.kmax + win.lmax
    if W < 0:
        return
    kabs = max(abs(win.kmin), abs(win.kmax))
    half = W // 2
    top_rest = 1
    while v_dim(top_rest + 1) <= half:
        top_rest += 1
    top_min = 1
    while v_dim(top_min + 1) <= half + kabs:
        top_min += 1
    if nmax is not None:
        top_rest = min(top_rest, nmax)
        top_min = min(top_min, nmax)
    visited = 0
    for m in range(1, top_min + 1):
        rest_idx = list(range(m, top_rest + 1))
        step = 2 << m
        for rest in _multisets(rest_idx, half):
            visited += 1
            vexp = Monomial.make(((m, 1),) + rest).vexp
            D = v_dim(m) + sum(r * v_dim(i) for i, r in rest)
            for t in range(0, step - 1):
                lo = max(D - win.kmax, win.lmin - D + t)
                hi = min(D - win.kmin, win.lmax - D + t)
                if lo > hi:
                    continue
                for s in _multiples_in(lo, hi, step):
                    yield Monomial(vexp, s, t), (FREE if t == 0 else TWO)
                if t == 0:
                    v0 = ((0, 1),) + vexp
                    for s in _multiples_in(lo, hi, 2):
                        if s % step:
                            yield Monomial(v0, s, 0), FREE
    if stats is not None:
        stats["visited"] = stats.get("visited", 0) + visited


def _v_free_family(win: _Window, period: int, smin: int | None, smax: int | None, tmin: int | None,
                   tmax: int | None, *, skip_zero_s: bool = False):
    """s^{j} a^t with j a multiple of ``period``; dimension (-j, j - t)."""
    lo = max(-win.kmax, smin if smin is not None else -win.kmax)
    hi = min(-win.kmin, smax if smax is not None else -win.kmin)
    for j in _multiples_in(lo, hi, period):
        if skip_zero_s and j == 0:
            continue
        t_lo = j - win.lmax
        t_hi = j - win.lmin
        if tmin is not None:
            t_lo = max(t_lo, tmin)
        if tmax is not None:
            t_hi = min(t_hi, tmax)
        for t in range(t_lo, t_hi + 1):
            yield Monomial((), j, t)


def _basis_iter(th: TheoryId, win: _Window, mode: str = "theorem", stats: dict | None = None):
    """Yield Generator objects of the theory inside ``win``."""
    if win.empty:
        return
    kind = th.kind
    if kind == "BPR":
        for m, o in _first_summand(win, None, stats=stats):
            yield Generator(m, o)
        return
    p = th.period
    n = th.n
    if kind == "BPRn":
        for m, o in _first_summand(win, n, stats=stats):
            yield Generator(m, o)
        if mode == "corollary":
            for k, g in _corollary_extras(n, win):
                yield g
        else:
            for m in _v_free_family(win, p, None, -p, 0, None):
                yield Generator(m, TWO)
    elif kind == "Tate":
        for m in _v_free_family(win, p, None, None, None, None):
            yield Generator(m, TWO)
    elif kind == "Geometric":
        for m in _v_free_family(win, p, None, 0, None, None):
            yield Generator(m, TWO)
    elif kind == "BorelCoh":
        if mode == "literal":
            for m, o in _first_summand(win, n, stats=stats):
                yield Generator(m, o)
            for m in _v_free_family(win, p, None, None, 0, None, skip_zero_s=True):
                yield Generator(m, TWO)
        else:
            for m, o in _first_summand(win, n, collision_n=n, stats=stats):
                yield Generator(m, o)
            for m in _v_free_family(win, p, None, None, 1, None, skip_zero_s=True):
                yield Generator(m, TWO)
    elif kind == "BorelHom":
        for m, o in _first_summand(win, n, units=False, ideal=True, stats=stats):
            yield Generator(m, o)
        # S^-1 x for x = s^j a^t, t <= -1, sits at dimension(x) - (1, 0)
        shifted = _Window(win.kmin + 1, win.kmax + 1, win.lmin, win.lmax)
        for m in _v_free_family(shifted, p, None, None, None, -1):
            yield Generator(m, TWO, desusp=1)


def basis_window(th: TheoryId, kmin: int, kmax: int, lmin: int, lmax: int, mode: str = "theorem",
                 stats: dict | None = None) -> dict[Bidegree, list[Generator]]:
    out: dict[Bidegree, list[Generator]] = defaultdict(list)
    for g in _basis_iter(th, _Window(kmin, kmax, lmin, lmax), mode, stats):
        out[g.degree].append(g)
    return out


def group_at(th: TheoryId, b: Bidegree, mode: str = "theorem", stats: dict | None = None) -> GroupSummary:
    b = Bidegree(*b)
    gens = basis_window(th, b.k, b.k, b.l, b.l, mode, stats).get(b, [])
    return GroupSummary.of(gens)


def groups_window(th: TheoryId, kmin: int, kmax: int, lmin: int, lmax: int,
                  mode: str = "theorem") -> dict[Bidegree, GroupSummary]:
    """Group at every bidegree of the window (trivial ones included)."""
    found = basis_window(th, kmin, kmax, lmin, lmax, mode)
    return {
        Bidegree(k, l): GroupSummary.of(found.get(Bidegree(k, l), ()))
        for l in range(lmin, lmax + 1)
        for k in range(kmin, kmax + 1)
    }


def twist_slice(th: TheoryId, l: int, kmin: int, kmax: int, mode: str = "theorem") -> list[tuple[int, GroupSummary]]:
    if kmin > kmax:
        raise ValueError("kmin > kmax")
    found = basis_window(th, kmin, kmax, l, l, mode)
    return [(k, GroupSummary.of(found.get(Bidegree(k, l), ()))) for k in range(kmin, kmax + 1)]


def collision_bidegrees(th: TheoryId, kmin: int, kmax: int, lmin: int, lmax: int) -> list[Bidegree]:
    """Bidegrees where a free first-summand class meets an order-2 v-free class."""
    win = _Window(kmin, kmax, lmin, lmax)
    p = th.period if th.n is not None else 0
    if th.kind == "BPRn":
        cand = (Bidegree(p * m, -p * m) for m in range(1, kmax // p + 1) if p * m >= kmin)
    elif th.kind == "BorelCoh":
        cand = (Bidegree(-j, j) for j in _multiples_in(-kmax, -kmin, p) if j)
    else:
        return []
    return sorted((b for b in cand if b in win), key=lambda b: (b.l, b.k))


# ---------------------------------------------------------------- per-twist (Milnor word) view

def _corollary_extras(n: int, win: _Window):
    """The extra classes placed literally: dimension k 2^{n+1} for 0 > k 2^{n+1} >= l.

    Labelled by s^{-k 2^{n+1}} a^{k 2^{n+1} - l}, whose own dimension does not
    have twist l; the label is kept only to name the class.
    """
    p = 2 << n
    for l in range(win.lmin, win.lmax + 1):
        for j in range(-1, -(-l // p) - 1, -1):
            K = j * p
            if win.kmin <= K <= win.kmax:
                yield K, _CorollaryGenerator(Monomial((), -K, K - l), TWO, 0, Bidegree(K, l))


@dataclass(frozen=True, order=False)
class _CorollaryGenerator(Generator):
    placed: Bidegree = field(default=Bidegree(0, 0))

    @property
    def degree(self) -> Bidegree:
        return self.placed


def second_summand_classes(n: int, l: int, mode: str = "theorem") -> list[tuple[int, Generator]]:
    """Extra (second-summand) classes of BPRn in twist ``l``, as (k, generator)."""
    p = 2 << n
    if mode == "corollary":
        return [(k, g) for k, g in _corollary_extras(n, _Window(-10**9, 10**9, l, l))]
    out = []
    if l < 0:
        for mu in range(1, -l // p + 1):
            t = -l - p * mu
            out.append((p * mu, Generator(Monomial((), -p * mu, t), TWO)))
    return out


def corollary_diff(n: int, l: int) -> dict:
    thm = second_summand_classes(n, l, "theorem")
    cor = second_summand_classes(n, l, "corollary")
    tk = sorted(k for k, _ in thm)
    ck = sorted(k for k, _ in cor)
    return {
        "n": n,
        "l": l,
        "theorem_count": len(tk),
        "corollary_count": len(ck),
        "theorem_dims": tk,
        "corollary_dims": ck,
        "sign_flip": sorted(-k for k in ck) == tk,
    }


def corollary_view(n: int, l: int, kmin: int, kmax: int) -> list[tuple[Monomial, int, str, Monomial | None]]:
    """Per-word description of twist ``l`` of BPRn's first summand.

    For each Milnor word v_R (r_0 in {0, 1}, other indices in 1..n) the only
    candidate class has a-exponent t = D - l mod 2^{min(R)+1} with D = |v_R|/2,
    and sits in dimension |v_R| - l - t.  It is dead when t = 2^{min(R)+1} - 1.
    Returns (word, k, tag, class monomial or None) sorted by (k, word).
    """
    rows = []
    if l <= 0 and kmin <= 0 <= kmax:
        rows.append((UNIT, 0, FREE if l == 0 else TWO, Monomial((), 0, -l)))
    budget = max(0, (kmax + l + (2 << n)) // 2)
    idx = list(range(1, n + 1))
    for rest in _multisets(idx, budget):
        for e0 in (0, 1):
            if not rest and not e0:
                continue
            vexp = (((0, 1),) if e0 else ()) + rest
            word = Monomial(vexp)
            D = word.half_weight
            mi = word.min_index
            mod = 2 << mi
            t = (D - l) % mod
            k = 2 * D - l - t
            if not kmin <= k <= kmax:
                continue
            s = l - D + t
            if t == mod - 1:
                rows.append((word, k, "dead", None))
                continue
            if e0 and (s == 0 if not rest else s % (2 << rest[0][0]) == 0):
                continue  # v_0 v_R s^s = 2 v_R s^s: not a new generator
            rows.append((word, k, FREE if t == 0 else TWO, Monomial(vexp, s, t)))
    rows.sort(key=lambda r: (r[1], r[0].key()))
    return rows


# ---------------------------------------------------------------- export

def table_records(th: TheoryId, kmin: int, kmax: int, lmin: int, lmax: int, mode: str = "theorem") -> list[dict]:
    """Group-table rows in stable order: ascending l, then ascending k."""
    groups = groups_window(th, kmin, kmax, lmin, lmax, mode)
    rows = []
    for b in sorted(groups, key=lambda b: (b.l, b.k)):
        g = groups[b]
        rows.append({
            "theory": th.cli_name,
            "n": th.n,
            "k": b.k,
            "l": b.l,
            "freeRank": g.free_rank,
            "z2Count": g.z2_count,
            "generators": sorted(str(x) for x in g.generators),
        })
    return rows
