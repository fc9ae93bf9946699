import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from realchrom.grading import Bidegree, Monomial, dimension, parse
from realchrom.rings import (
    FREE,
    TWO,
    GroupSummary,
    NotInTheory,
    TheoryId,
    basis_window,
    collision_bidegrees,
    corollary_diff,
    corollary_view,
    group_at,
    groups_window,
    in_theory,
    normal_form,
    rewrite_random,
    rewrite_steps,
    second_summand_classes,
    table_records,
    twist_slice,
)

from strategies import monomials

BPR = TheoryId("BPR")


def bprn(n):
    return TheoryId("BPRn", n)


def gens(g: GroupSummary):
    return [(str(x), x.order) for x in g.generators]


# ---------------------------------------------------------------- brute-force oracle

def oracle_first_summand(b, nmax, dmax=16, vmax=4):
    """Box search over v_0^e v_R s^s a^t straight from the presentation.

    A word is in the ring iff s is a multiple of 2^{min+1} (min over the whole
    support, v_0 included); it is an additive generator iff it is not twice a
    ring element; it is zero iff a^{2^{min+1}-1} divides it (min taken with v_0).
    """
    k, l = b
    out = []
    top = vmax if nmax is None else min(vmax, nmax)
    for e0 in (0, 1, 2):
        ranges = [range(dmax // (2 ** (i + 1) - 1) + 1) for i in range(top)]
        for rs in itertools.product(*ranges):
            vexp = (((0, e0),) if e0 else ()) + tuple((i + 1, r) for i, r in enumerate(rs) if r)
            D = sum(r * (2 ** (i + 1) - 1) for i, r in enumerate(rs))
            if D > dmax:
                continue
            s = D - k
            t = D + s - l
            if t < 0:
                continue
            m = Monomial(vexp, s, t)
            if not vexp:
                if s == 0:
                    out.append((str(m), FREE if t == 0 else TWO))
                continue
            mi = vexp[0][0]
            if s % (2 << mi):
                continue
            if t >= (2 << mi) - 1:
                continue
            # twice something in the ring?
            if e0:
                rest = m.with_v(0, -1)
                if not rest.vexp:
                    if s == 0:
                        continue
                elif s % (2 << rest.vexp[0][0]) == 0:
                    continue
            if e0 and t:
                continue  # 2 a = 0
            out.append((str(m), FREE if t == 0 else TWO))
    return sorted(set(out))


@pytest.mark.parametrize("n", [None, 1, 2])
def test_first_summand_matches_box_oracle(n):
    th = BPR if n is None else bprn(n)
    for k in range(-7, 8):
        for l in range(-7, 8):
            b = Bidegree(k, l)
            got = [g for g in group_at(th, b).generators
                   if not (g.monomial.is_v_free and g.monomial.sexp)]
            want = oracle_first_summand(b, n)
            assert sorted((str(g), g.order) for g in got) == want, b


# ---------------------------------------------------------------- worked examples

def test_group_examples():
    assert gens(group_at(bprn(1), Bidegree(0, 0))) == [("1", FREE)]
    assert gens(group_at(TheoryId("Tate", 0), Bidegree(-2, 2))) == [("s^2", TWO)]
    assert gens(group_at(BPR, Bidegree(5, -3))) == [("v1 s^-4", FREE)]
    assert group_at(TheoryId("Tate", 1), Bidegree(1, 0)).is_trivial
    assert gens(group_at(TheoryId("Geometric", 1), Bidegree(8, -3))) == [("s^-8 a^-5", TWO)]
    g = group_at(bprn(1), Bidegree(4, -4))
    assert g.shape == (1, 1)
    assert gens(g) == [("s^-4", TWO), ("v0 s^-4", FREE)]


def test_group_text():
    assert str(group_at(bprn(1), Bidegree(1, 0))) == "Z/2 {v1 a}"
    assert str(group_at(TheoryId("Tate", 0), Bidegree(0, 0))) == "Z/2 {1}"
    assert str(group_at(bprn(1), Bidegree(3, 0))) == "0"
    assert GroupSummary(2, 3).group_text() == "Z(2)^2 + (Z/2)^3"


def test_borelcoh_collision_rule():
    g = group_at(TheoryId("BorelCoh", 0), Bidegree(-2, 2))
    assert gens(g) == [("s^2", FREE)]
    lit = group_at(TheoryId("BorelCoh", 0), Bidegree(-2, 2), mode="literal")
    assert gens(lit) == [("s^2", TWO), ("v0 s^2", FREE)]
    assert gens(group_at(TheoryId("BorelCoh", 1), Bidegree(-4, 3))) == [("s^4 a", TWO)]


def test_borelhom_inventory():
    th = TheoryId("BorelHom", 1)
    assert gens(group_at(th, Bidegree(0, 0))) == [("v0", FREE)]
    assert group_at(th, Bidegree(0, -1)).is_trivial  # no pure a-powers
    g = group_at(th, Bidegree(-1, 3))
    assert [str(x) for x in g.generators] == ["v0 v1 s^2", "S^-1 a^-3"]
    assert all(x.degree == Bidegree(-1, 3) for x in g.generators)
    assert [str(x) for x in group_at(th, Bidegree(-5, 5)).generators] == ["S^-1 s^4 a^-1"]


def test_normal_form_examples():
    r = normal_form(parse("v0"), BPR)
    assert (r.valuation, r.basis) == (1, parse("1"))
    assert normal_form(parse("v1 a^3"), BPR).is_zero
    r = normal_form(parse("v2 s^8") * parse("v1 s^-4"), BPR)
    assert (r.valuation, str(r.basis)) == (0, "v1 v2 s^4")
    r = normal_form(parse("v0^2 v1^2 s^-2"), BPR)
    assert (r.valuation, str(r.basis)) == (1, "v0 v1^2 s^-2")
    assert normal_form(parse("v0 a"), BPR).is_zero
    assert normal_form(parse("v0 v1 s^2 a"), BPR).is_zero
    r = normal_form(parse("v0 s^4"), TheoryId("BorelCoh", 1))
    assert (r.valuation, str(r.basis)) == (1, "s^4")
    r = normal_form(parse("v0 s^-4"), bprn(1))
    assert (r.valuation, str(r.basis)) == (0, "v0 s^-4")


@pytest.mark.parametrize("text, th", [
    ("v2", bprn(1)),
    ("s^2", BPR),
    ("v1 s^2", BPR),
    ("v0 s^3", BPR),
    ("v1 a^-1", BPR),
    ("v1", TheoryId("Tate", 1)),
    ("s^2", TheoryId("Tate", 1)),
    ("s^4", TheoryId("Geometric", 1)),
    ("a", TheoryId("BorelHom", 1)),
])
def test_not_in_theory(text, th):
    with pytest.raises(NotInTheory):
        normal_form(parse(text), th)


# ---------------------------------------------------------------- confluence

THEORIES = [BPR, bprn(0), bprn(1), bprn(2), TheoryId("BorelCoh", 0), TheoryId("BorelCoh", 1),
            TheoryId("BorelHom", 1), TheoryId("Tate", 1), TheoryId("Geometric", 1)]


def terminal_states(m, th):
    seen, out, stack = set(), set(), [(0, m)]
    while stack:
        st_ = stack.pop()
        steps = rewrite_steps(st_, th)
        if not steps:
            out.add(st_)
        for _, nxt in steps:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return out


def _members(rng, count, th):
    out = []
    while len(out) < count:
        n = th.n if th.n is not None else 4
        idx = rng.sample(range(0, n + 1), rng.randint(0, min(3, n + 1)))
        vexp = tuple(sorted((i, rng.randint(1, 4)) for i in idx))
        m = Monomial(vexp, 2 * rng.randint(-12, 12), rng.randint(-3, 8))
        if in_theory(m, th):
            out.append(m)
    return out


@pytest.mark.parametrize("th", THEORIES, ids=str)
def test_confluence_all_orders(th):
    rng = random.Random(7)
    for m in _members(rng, 300, th):
        nf = normal_form(m, th)
        ends = terminal_states(m, th)
        want = None if nf.is_zero else (nf.valuation, nf.basis)
        assert ends == {want}, m


def test_confluence_random_orders():
    rng = random.Random(11)
    for th in (BPR, bprn(2), TheoryId("BorelCoh", 1)):
        for m in _members(rng, 10_000 // 3 + 1, th):
            nf = normal_form(m, th)
            for _ in range(100):
                assert rewrite_random(m, th, rng) == nf


@given(monomials(max_index=3))
def test_normal_form_is_basis(m):
    th = TheoryId("BPR")
    if not in_theory(m, th):
        return
    r = normal_form(m, th)
    if r.is_zero:
        return
    assert r.basis.r(0) <= 1
    assert dimension(r.basis) == dimension(m)
    assert r.valuation == m.r(0) - r.basis.r(0)
    assert r.basis in {g.monomial for g in group_at(th, dimension(m)).generators}


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_multiplicativity(k1, l1, k2, l2):
    for x in group_at(BPR, Bidegree(k1, l1)).generators:
        for y in group_at(BPR, Bidegree(k2, l2)).generators:
            p = x.monomial * y.monomial
            if not in_theory(p, BPR):
                continue
            r = normal_form(p, BPR)
            mi = p.min_index
            fires = mi is not None and p.aexp >= (2 << mi) - 1
            if r.is_zero:
                assert fires or (p.r(0) and p.aexp)
            else:
                assert r.valuation == p.r(0) - r.basis.r(0)


# ---------------------------------------------------------------- laws

def test_termination_and_exact_dimension():
    for th in (BPR, bprn(3), TheoryId("BorelCoh", 2), TheoryId("BorelHom", 2)):
        for b in [Bidegree(k, l) for k in range(-12, 13, 3) for l in range(-12, 13, 4)]:
            stats = {}
            g = group_at(th, b, stats=stats)
            assert stats.get("visited", 0) < 10_000
            assert all(x.degree == b for x in g.generators)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_tate_divisibility(n):
    G = groups_window(TheoryId("Tate", n), -20, 20, -20, 20)
    for b, g in G.items():
        assert (not g.is_trivial) == (b.k % (2 << n) == 0)
        assert g.free_rank == 0 and g.z2_count <= 1


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_geometric_support(n):
    G = groups_window(TheoryId("Geometric", n), -20, 20, -20, 20)
    for b, g in G.items():
        assert (not g.is_trivial) == (b.k >= 0 and b.k % (2 << n) == 0)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_restriction_to_bpr(n):
    K = 40
    left = basis_window(bprn(n), -K, K, -K, K)
    right = basis_window(BPR, -K, K, -K, K)
    first = {(b, str(g), g.order) for b, gs in left.items() for g in gs
             if not (g.monomial.is_v_free and g.monomial.sexp)}
    restricted = {(b, str(g), g.order) for b, gs in right.items() for g in gs
                  if all(i <= n for i in g.monomial.support)}
    assert first == restricted


def test_ko_pattern():
    want = ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0"] * 2 + ["Z"]
    got = []
    for _, g in twist_slice(bprn(1), 0, 0, 16):
        got.append({(0, 0): "0", (1, 0): "Z", (0, 1): "Z/2"}[g.shape])
    assert got == want


@pytest.mark.parametrize("n", [0, 1, 2])
def test_corollary_count(n):
    p = 2 << n
    for l in range(-1, -33, -1):
        d = corollary_diff(n, l)
        assert d["theorem_count"] == d["corollary_count"] == -l // p
        assert d["sign_flip"]
        if d["theorem_count"]:
            assert d["theorem_dims"] != d["corollary_dims"]


def test_twist_minus_four_extra():
    assert len(second_summand_classes(1, -4)) == 1
    assert [k for k, _ in second_summand_classes(1, -4, "corollary")] == [-4]


def test_corollary_mode_group():
    g = group_at(bprn(1), Bidegree(-4, -4), mode="corollary")
    assert g.z2_count == 1
    assert group_at(bprn(1), Bidegree(4, -4), mode="corollary").shape == (1, 0)


def test_corollary_view_examples():
    rows = {(str(w), k): (tag, m) for w, k, tag, m in corollary_view(1, 0, -20, 20)}
    assert rows[("v1", 1)][0] == TWO and str(rows[("v1", 1)][1]) == "v1 a"
    assert rows[("v1^3", 3)][0] == "dead"
    rows5 = {(str(w), k): (tag, m) for w, k, tag, m in corollary_view(1, 5, -20, 20)}
    assert rows5[("v1", -3)][0] == FREE and str(rows5[("v1", -3)][1]) == "v1 s^4"


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("l", [-9, -4, -1, 0, 3, 5, 12])
def test_corollary_view_matches_slice(n, l):
    K = 24
    live = sorted((k, str(m), tag) for _, k, tag, m in corollary_view(n, l, -K, K) if tag != "dead")
    sl = []
    for k, g in twist_slice(bprn(n), l, -K, K):
        for x in g.generators:
            if x.monomial.is_v_free and x.monomial.sexp:
                continue  # second summand, reported separately
            sl.append((k, str(x), x.order))
    assert live == sorted(sl)


def test_collision_sets():
    assert collision_bidegrees(bprn(1), -10, 10, -10, 10) == [Bidegree(8, -8), Bidegree(4, -4)]
    assert collision_bidegrees(TheoryId("BorelCoh", 0), -4, 4, -4, 4) == [
        Bidegree(4, -4), Bidegree(2, -2), Bidegree(-2, 2), Bidegree(-4, 4)]
    assert collision_bidegrees(TheoryId("Tate", 1), -10, 10, -10, 10) == []


def test_table_records_order_and_schema():
    rows = table_records(bprn(1), -2, 2, -1, 1)
    assert [(r["l"], r["k"]) for r in rows] == sorted((r["l"], r["k"]) for r in rows)
    assert set(rows[0]) == {"theory", "n", "k", "l", "freeRank", "z2Count", "generators"}
    assert len(rows) == 15


def test_theory_id_validation():
    with pytest.raises(ValueError):
        TheoryId("BPRn")
    with pytest.raises(ValueError):
        TheoryId("BPR", 1)
    with pytest.raises(ValueError):
        TheoryId("Tate", -1)
    assert TheoryId.parse("borelcoh", 2) == TheoryId("BorelCoh", 2)
