import numpy as np
import pytest

from realchrom.engine import (
    EngineConfig,
    ResourceError,
    a_powers_only,
    build_e1,
    build_tate_e1,
    compare,
    compare_to_closed_form,
    formal_pairing,
    run_to_einfty,
    stage_homology_snf,
    stage_matrices,
    stage_of,
    stage_pairs,
    turn_page,
    twist_lines_independent,
)
from realchrom.grading import Bidegree, dimension, parse
from realchrom.rings import TheoryId, collision_bidegrees

SMALL = EngineConfig(6, L=5, kpad=4, depth=6, dpad=4)


def differential(pw, s, text):
    """Image of the cell labelled ``text`` under stage s, as (label, valuation)."""
    m = parse(text)
    b = dimension(m)
    for l, ln in pw.lines.items():
        if l != b.l:
            continue
        xs, ys, d = stage_pairs(pw, l, s)
        nk = pw.nk
        for x, y, dd in zip(xs, ys, d):
            wi, ki = divmod(int(x), nk)
            if str(pw.label(wi, pw.kmin + ki, l)) == text:
                wj, kj = divmod(int(y), nk)
                return str(pw.label(wj, pw.kmin + kj, l)), int(dd)
    return None


def test_stage_of():
    assert [stage_of(p) for p in range(1, 9)] == [0, None, 1, None, None, None, 2, None]


def test_examples_of_differentials():
    pw = build_tate_e1(1, SMALL)
    assert differential(pw, 0, "s^-1") == ("a", 1)  # d_1(s^-1) = 2 a
    assert differential(pw, 1, "s^-2") == ("v1 a^3", 0)
    assert differential(pw, 1, "v1 s^2 a") == ("v1^2 s^4 a^4", 0)
    assert differential(pw, 1, "v1 s^4") is None  # valuation 2 is not stage 1


def test_e1_shape():
    pw = build_tate_e1(0, EngineConfig(4))
    assert pw.words == [()]
    pw = build_tate_e1(1, EngineConfig(8))
    cells = {str(p.label) for p in pw.pieces(Bidegree(-1, 2))}
    assert "v1 s^2 a" in cells
    for ln in pw.lines.values():
        assert not ln["e"].any() and ln["alive"].all()


def test_borel_e1_nonnegative():
    pw = build_e1("borel", 1, SMALL)
    for l in pw.lines:
        for k in range(-6, 7):
            assert all(p.filtration >= 0 for p in pw.pieces(Bidegree(k, l)))


def test_resource_error():
    with pytest.raises(ResourceError, match="offending bound"):
        build_e1("tate", 3, EngineConfig(40, budget=1000))


@pytest.mark.parametrize("kind", ["tate", "borel"])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_fast_path_matches_snf(kind, n):
    pages = []
    run_to_einfty(kind, n, SMALL, keep=pages)
    for pw in pages:
        s = stage_of(pw.page)
        if s is None:
            continue
        assert turn_page(pw).groups() == stage_homology_snf(pw, s)


@pytest.mark.parametrize("kind", ["tate", "borel"])
@pytest.mark.parametrize("n", [1, 2])
def test_d_squared_zero(kind, n):
    pages = []
    run_to_einfty(kind, n, SMALL, keep=pages)
    for pw in pages:
        s = stage_of(pw.page)
        if s is None:
            continue
        for l in pw.lines:
            for k in range(pw.kmin + 1, pw.kmax + 1):
                _, B, _, _, _ = stage_matrices(pw, l, s, k)
                _, B2, _, oo, _ = stage_matrices(pw, l, s, k - 1)
                if not B or not B2 or not B[0]:
                    continue
                for i, row in enumerate(B2):
                    for j in range(len(B[0])):
                        x = sum(row[t] * B[t][j] for t in range(len(B)))
                        assert (x if oo[i] == 0 else x % oo[i]) == 0


def test_shift_and_filtration():
    pw = build_tate_e1(2, SMALL)
    for s in range(3):
        for l in pw.lines:
            xs, ys, _ = stage_pairs(pw, l, s)
            nk = pw.nk
            for x, y in zip(xs[:200], ys[:200]):
                wi, ki = divmod(int(x), nk)
                wj, kj = divmod(int(y), nk)
                src = pw.label(wi, pw.kmin + ki, l)
                tgt = pw.label(wj, pw.kmin + kj, l)
                assert dimension(tgt) - dimension(src) == Bidegree(-1, 0)
                assert tgt.aexp - src.aexp == (2 << s) - 1


@pytest.mark.parametrize("kind", ["tate", "borel"])
@pytest.mark.parametrize("n", [1, 2])
def test_padding_independence(kind, n):
    base = EngineConfig(8, L=8)
    wide = EngineConfig(8, L=8, kpad=(4 << n) + 6, dpad=(2 << n) + 5)
    a = run_to_einfty(kind, n, base)
    b = run_to_einfty(kind, n, wide)
    for l in range(-8, 9):
        for k in range(-8, 9):
            assert a.pieces(Bidegree(k, l)) == b.pieces(Bidegree(k, l))


def test_twist_lines_independent():
    assert twist_lines_independent("tate", 2, EngineConfig(6, L=6), [-3, 0, 2, 5])
    assert twist_lines_independent("borel", 1, EngineConfig(6, L=6), [-4, 1])


@pytest.mark.parametrize("n", [0, 1, 2])
def test_tate_einfty(n):
    pw = run_to_einfty("tate", n, EngineConfig(12))
    rep = compare_to_closed_form(pw, TheoryId("Tate", n))
    assert not rep.disagreements
    for l in range(-12, 13):
        for k in range(-12, 13):
            for p in pw.pieces(Bidegree(k, l)):
                assert p.e == 1 and p.label.is_v_free and p.label.sexp % (2 << n) == 0


@pytest.mark.parametrize("n", [0, 1, 2])
def test_borel_einfty(n):
    pw = run_to_einfty("borel", n, EngineConfig(12))
    th = TheoryId("BorelCoh", n)
    rep = compare_to_closed_form(pw, th)
    assert not rep.disagreements
    got = sorted(rep.literal_differs, key=lambda b: (b.l, b.k))
    assert got == collision_bidegrees(th, -12, 12, -12, 12)


def test_borel_collision_cell():
    pw = run_to_einfty("borel", 0, EngineConfig(4))
    pieces = pw.pieces(Bidegree(-2, 2))
    assert [(p.filtration, p.e, str(p.label)) for p in pieces] == [(0, 0, "s^2")]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_geometric(n):
    run = run_to_einfty("geometric", n, EngineConfig(16))
    rep = compare_to_closed_form(run, TheoryId("Geometric", n))
    assert not rep.disagreements
    assert run.trust_k >= 16
    assert [s["step"] for s in run.steps] == list(range(1, n + 1))


def test_geometric_single_step_rule():
    run = run_to_einfty("geometric", 1, EngineConfig(8))
    # s^-2 supports d_1 to v_1 a^3, s^-4 survives
    assert not run.pieces(Bidegree(2, -2))
    assert [str(p.label) for p in run.pieces(Bidegree(4, -4))] == ["s^-4"]


def test_degenerates_after_stage_n():
    pw = run_to_einfty("tate", 1, SMALL)
    assert pw.page == 4
    for l in pw.lines:
        assert len(stage_pairs(pw, l, 2)[0]) == 0


def test_bpr_tate_small():
    pw = run_to_einfty("tate", 3, EngineConfig(8))  # 2^4 > 8 hides s^{16m}
    rep = compare(pw, a_powers_only)
    assert not rep.disagreements


def test_formal_pairing():
    assert formal_pairing(window=14, max_index=3) == []


def test_dump_records():
    pw = run_to_einfty("tate", 1, EngineConfig(4))
    rows = pw.dump()
    assert rows and set(rows[0]) == {"page", "k", "l", "filtration", "order", "monomial"}
    assert all(r["k"] % 4 == 0 for r in rows)
    assert np.all([r["order"] == "two" for r in rows])
