"""The two cofibre rows relating BorelHom, BPRn, Geometric, BorelCoh and Tate.

    top:     BorelHom --f--> BPRn     --g--> Geometric --d--> S BorelHom
    bottom:  BorelHom --f--> BorelCoh --g--> Tate      --d--> S BorelHom

``f`` is the identity on the v-ideal (``v_0`` goes to ``2``) and kills the
desuspended classes; ``g`` keeps v-free monomials and kills everything with a
v-factor; ``d`` sends ``x`` with negative a-exponent to ``S^-1 x`` and moves
bidegree by (-1, 0).  Exactness is checked on presented groups with Smith
normal form, three spots per bidegree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .grading import SHIFT, Bidegree
from .rings import (
    FREE,
    TWO,
    Generator,
    GroupSummary,
    TheoryId,
    basis_window,
    collision_bidegrees,
    groups_window,
    in_theory,
    normal_form,
    order_of,
)
from .smith import AbelianGroup, presented_homology

ROWS = ("top", "bottom")


@dataclass(frozen=True)
class MonomialMap:
    name: str
    source: TheoryId
    target: TheoryId
    shift: Bidegree
    rule: Callable[[Generator], tuple[Generator, int] | None]

    def __call__(self, g: Generator) -> tuple[Generator, int] | None:
        out = self.rule(g)
        if out is not None:
            assert out[0].degree == g.degree + self.shift, (self.name, g, out)
        return out


def fibre_inclusion(n: int, target: str) -> MonomialMap:
    """BorelHom -> BPRn or BorelCoh."""
    tgt = TheoryId(target, n)

    def rule(g: Generator):
        if g.desusp:
            return None
        red = normal_form(g.monomial, tgt)
        if red.is_zero:
            return None
        return Generator(red.basis, order_of(red.basis, tgt)), red.valuation

    return MonomialMap(f"BorelHom->{target}", TheoryId("BorelHom", n), tgt, Bidegree(0, 0), rule)


def localization(n: int, source: str) -> MonomialMap:
    """BPRn -> Geometric or BorelCoh -> Tate: keep v-free monomials."""
    src = TheoryId(source, n)
    tgt = TheoryId("Geometric" if source == "BPRn" else "Tate", n)

    def rule(g: Generator):
        m = g.monomial
        if not m.is_v_free:
            return None
        assert in_theory(m, tgt), m
        return Generator(m, TWO), 0

    return MonomialMap(f"{source}->{tgt.kind}", src, tgt, Bidegree(0, 0), rule)


def borel_to_tate(n: int) -> MonomialMap:
    return localization(n, "BorelCoh")


def connecting(n: int, source: str) -> MonomialMap:
    """Geometric or Tate -> S BorelHom: negative a-powers go to their desuspension."""
    src = TheoryId(source, n)

    def rule(g: Generator):
        if g.monomial.aexp >= 0:
            return None
        return Generator(g.monomial, TWO, desusp=1), 0

    return MonomialMap(f"{source}->BorelHom", src, TheoryId("BorelHom", n), SHIFT, rule)


def geometric_connecting(n: int) -> MonomialMap:
    return connecting(n, "Geometric")


def row_theories(row: str, n: int) -> tuple[TheoryId, TheoryId, TheoryId]:
    mid = "BPRn" if row == "top" else "BorelCoh"
    right = "Geometric" if row == "top" else "Tate"
    return TheoryId("BorelHom", n), TheoryId(mid, n), TheoryId(right, n)


def row_maps(row: str, n: int) -> tuple[MonomialMap, MonomialMap, MonomialMap]:
    mid = "BPRn" if row == "top" else "BorelCoh"
    right = "Geometric" if row == "top" else "Tate"
    return fibre_inclusion(n, mid), localization(n, mid), connecting(n, right)


def _orders(gens) -> list[int]:
    return [0 if g.order == FREE else 2 for g in gens]


def map_matrix(mp: MonomialMap, src: list[Generator], tgt: list[Generator]) -> list[list[int]]:
    """Matrix (rows: target generators) of ``mp``; checks it is well defined."""
    pos = {g.key(): i for i, g in enumerate(tgt)}
    M = [[0] * len(src) for _ in tgt]
    for c, g in enumerate(src):
        out = mp(g)
        if out is None:
            continue
        y, v = out
        if y.key() not in pos:
            raise AssertionError(f"{mp.name}: image {y} of {g} is not a basis class")
        y = tgt[pos[y.key()]]
        if g.order == TWO and y.order == FREE:
            raise AssertionError(f"{mp.name}: torsion {g} maps to free {y}")
        M[pos[y.key()]][c] = 1 << v
    return M


def _compose_zero(A, B, orders_out) -> bool:
    """B @ A vanishes in the target presented by ``orders_out``."""
    for i, row in enumerate(B):
        for j in range(len(A[0]) if A else 0):
            x = sum(row[k] * A[k][j] for k in range(len(A)))
            o = orders_out[i]
            if (x if o == 0 else x % o):
                return False
    return True


def spot_homology(mp_in: MonomialMap, mp_out: MonomialMap, gin, gmid, gout) -> AbelianGroup | str:
    """Homology at the middle of gin -> gmid -> gout, or a string if not a complex."""
    if not gmid:
        return AbelianGroup(0, ())
    A = map_matrix(mp_in, gin, gmid)
    B = map_matrix(mp_out, gmid, gout)
    if gin and gout and not _compose_zero(A, B, _orders(gout)):
        return "composite nonzero"
    return presented_homology(A, B, _orders(gmid), _orders(gout), len(gin))


@dataclass
class ExactnessReport:
    row: str
    n: int
    records: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[dict]:
        return [r for r in self.records if r["status"] == "violation"]

    def with_status(self, status: str) -> list[Bidegree]:
        return [Bidegree(r["k"], r["l"]) for r in self.records if r["status"] == status]


def audit_row(row: str, n: int, K: int, L: int | None = None) -> ExactnessReport:
    """Exactness of the row at every bidegree with |k| <= K, |l| <= L."""
    if row not in ROWS:
        raise ValueError(f"row must be one of {ROWS}")
    L = K if L is None else L
    thA, thB, thC = row_theories(row, n)
    f, g, d = row_maps(row, n)
    span = (-K - 1, K + 1, -L, L)
    A = basis_window(thA, *span)
    B = basis_window(thB, *span)
    C = basis_window(thC, *span)
    collisions = set(collision_bidegrees(thB, -K, K, -L, L))
    report = ExactnessReport(row, n)
    for l in range(-L, L + 1):
        for k in range(-K, K + 1):
            b = Bidegree(k, l)
            up, down = b - SHIFT, b + SHIFT
            a_b, b_b, c_b = A.get(b, []), B.get(b, []), C.get(b, [])
            spots = {
                "A": spot_homology(d, f, C.get(up, []), a_b, b_b),
                "B": spot_homology(f, g, a_b, b_b, c_b),
                "C": spot_homology(g, d, b_b, c_b, A.get(down, [])),
            }
            bad = {p: str(h) for p, h in spots.items() if isinstance(h, str) or not h.is_trivial}
            if bad:
                status = "violation"
            elif b in collisions and len(b_b) > 1:
                status = "exact-up-to-extension"
            else:
                status = "exact"
            report.records.append({
                "k": k,
                "l": l,
                "A": str(GroupSummary.of(a_b)),
                "B": str(GroupSummary.of(b_b)),
                "C": str(GroupSummary.of(c_b)),
                "status": status,
                "witness": bad,
            })
    return report


def negative_cone(n: int, K: int, L: int | None = None) -> list[Bidegree]:
    """(-2^{n+1} mu - 1, 2^{n+1} mu + tau) for mu, tau >= 1 inside the window.

    At these bidegrees the top row forces a Z/2 in BPRn that its closed form
    does not contain.
    """
    L = K if L is None else L
    p = 2 << n
    out = []
    mu = 1
    while p * mu + 1 <= K:
        for tau in range(1, L - p * mu + 1):
            out.append(Bidegree(-p * mu - 1, p * mu + tau))
        mu += 1
    return sorted(out, key=lambda b: (b.l, b.k))


def completeness_gap(n: int, K: int, L: int | None = None) -> list[tuple[Bidegree, GroupSummary, GroupSummary]]:
    """Bidegrees where BPRn and BorelCoh differ, with both groups."""
    L = K if L is None else L
    left = groups_window(TheoryId("BPRn", n), -K, K, -L, L)
    right = groups_window(TheoryId("BorelCoh", n), -K, K, -L, L)
    out = []
    for b in sorted(left, key=lambda b: (b.l, b.k)):
        if left[b] != right[b]:
            out.append((b, left[b], right[b]))
    return out


# ---------------------------------------------------------------- independent check at n = 0

def bredon_hz(k: int, l: int) -> AbelianGroup:
    """pi_{k + l alpha} of the Eilenberg-MacLane spectrum of the constant Mackey functor Z.

    For l >= 0 this is reduced Bredon cohomology of S^{l sigma} in degree -k;
    for l < 0 it is reduced Bredon homology of S^{|l| sigma} in degree k.  The
    cell structure has one fixed 0-cell and one free cell in each dimension
    1..|l|.  Cochains: Z -1-> Z -0-> Z -2-> Z -0-> ...; chains:
    Z <-2- Z <-0- Z <-2- Z <-0- ...
    """
    m = abs(l)
    if l >= 0:
        deg = -k
        # d^i : C^i -> C^{i+1}
        def dmap(i):
            if i < 0 or i >= m:
                return None
            return 1 if i == 0 else (0 if i % 2 else 2)
        if deg < 0 or deg > m:
            return AbelianGroup(0, ())
        d_in, d_out = dmap(deg - 1), dmap(deg)
    else:
        deg = k
        # del_i : C_i -> C_{i-1}
        def dmap(i):
            if i < 1 or i > m:
                return None
            return 2 if i % 2 else 0
        if deg < 0 or deg > m:
            return AbelianGroup(0, ())
        d_in, d_out = dmap(deg + 1), dmap(deg)
    A = [[d_in]] if d_in is not None else []
    Bm = [[d_out]] if d_out is not None else []
    return presented_homology(A, Bm, [0], [0] if d_out is not None else [], 1 if d_in is not None else 0)
