"""Windowed computation of the Tate, Borel and geometric spectral sequences.

E_1 cells are monomials ``v_R s^j a^t`` (R over v_1..v_n) with 2-local
coefficients.  Stage ``s`` (page ``2^{s+1} - 1``) has the differential

    v_R s^j a^t  ->  v_s * v_R s^{j + 2^s} a^{t + 2^{s+1} - 1}

on cells where ``j != 0`` has 2-adic valuation exactly ``s`` and every index
of R is ``>= s``; ``v_0`` acts as the scalar 2 and ``v_s = 0`` for ``s > n``.
Each rule instance is a 1x1 map between two cells, so homology is computed
cell by cell, tracking a cell as ``2^c * monomial`` of order ``2^e``
(``e = 0`` means free).

Differentials preserve the twist ``l``, so each twist line is an independent
grid indexed by (v-word, k).  Tate and Borel E_1 terms are infinite in each
bidegree (``v_i s^{2^i - 1} a^{2^{i+1} - 2}`` has dimension 0), so the grid is
cut at half-weight ``depth + dpad`` and only cells with half-weight
``<= depth`` are reported.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .grading import Bidegree, Monomial, v_dim
from .rings import FREE, TheoryId, basis_window
from .smith import AbelianGroup, presented_homology

KINDS = ("tate", "borel", "geometric")


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    """Inner window |k| <= K, |l| <= L.  Unset paddings default from n."""

    K: int
    L: int | None = None
    kpad: int | None = None
    depth: int | None = None
    dpad: int | None = None
    budget: int = 60_000_000

    def resolved(self, n: int) -> "EngineConfig":
        return EngineConfig(
            K=self.K,
            L=self.K if self.L is None else self.L,
            kpad=(4 << n) if self.kpad is None else self.kpad,
            depth=self.K if self.depth is None else self.depth,
            dpad=(2 << n) if self.dpad is None else self.dpad,
            budget=self.budget,
        )


@dataclass(frozen=True)
class Piece:
    """One cyclic piece of E_infinity: order 2^e (e = 0 free) at filtration t."""

    filtration: int
    e: int
    label: Monomial

    def key(self):
        return (self.filtration, self.e, self.label.key())

    @property
    def order_text(self) -> str:
        return "free" if self.e == 0 else ("two" if self.e == 1 else f"2^{self.e}")


def v_words(n: int, dmax: int) -> list[tuple[int, ...]]:
    """Exponent vectors (r_1..r_n) with sum r_i (2^i - 1) <= dmax."""
    out = []

    def rec(i, budget, acc):
        if i > n:
            out.append(tuple(acc))
            return
        w = v_dim(i)
        for r in range(budget // w + 1):
            acc.append(r)
            rec(i + 1, budget - r * w, acc)
            acc.pop()

    rec(1, dmax, [])
    return out


def _val2(x: np.ndarray) -> np.ndarray:
    """2-adic valuation, -1 where x == 0."""
    low = x & -x
    out = np.full(x.shape, -1, dtype=np.int16)
    nz = low != 0
    out[nz] = np.log2(low[nz]).astype(np.int16)
    return out


@dataclass
class PageWindow:
    kind: str
    n: int
    cfg: EngineConfig
    page: int
    words: list[tuple[int, ...]]
    D: np.ndarray  # half-weight per word
    minidx: np.ndarray  # min v-index per word (large for the empty word)
    plus: dict[int, np.ndarray]  # stage s -> word index of R + e_s, or -1
    kmin: int
    kmax: int
    lines: dict[int, dict[str, np.ndarray]]  # l -> {"c", "e", "alive"}
    jval: np.ndarray  # 2-adic valuation of j on the (word, k) grid
    history: list[int] = field(default_factory=list)  # stages applied

    @property
    def nk(self) -> int:
        return self.kmax - self.kmin + 1

    @property
    def inner(self) -> tuple[int, int, int, int]:
        return (-self.cfg.K, self.cfg.K, -self.cfg.L, self.cfg.L)

    @property
    def trust_depth(self) -> int:
        return self.cfg.depth

    def cell_count(self) -> int:
        return int(sum(ln["alive"].sum() for ln in self.lines.values()))

    def label(self, wi: int, k: int, l: int, c: int = 0) -> Monomial:
        D = int(self.D[wi])
        vexp = tuple((i + 1, r) for i, r in enumerate(self.words[wi]) if r)
        if c:
            vexp = ((0, c),) + vexp
        j = D - k
        return Monomial(vexp, j, 2 * D - k - l)

    def cells_at(self, b: Bidegree, trusted: bool = True) -> list[tuple[Piece, int]]:
        """Alive cells at ``b`` as (piece, half-weight)."""
        k, l = b
        ln = self.lines.get(l)
        if ln is None or not self.kmin <= k <= self.kmax:
            return []
        ki = k - self.kmin
        col = np.nonzero(ln["alive"][:, ki])[0]
        out = []
        for wi in col:
            D = int(self.D[wi])
            if trusted and D > self.trust_depth:
                continue
            c = int(ln["c"][wi, ki])
            out.append((Piece(2 * D - k - l, int(ln["e"][wi, ki]), self.label(wi, k, l, c)), D))
        return out

    def pieces(self, b: Bidegree) -> list[Piece]:
        return sorted((p for p, _ in self.cells_at(b)), key=Piece.key)

    def groups(self) -> dict[Bidegree, AbelianGroup]:
        """Group of every bidegree of the padded grid, from the cells."""
        out = {}
        for l, ln in self.lines.items():
            for ki in range(self.nk):
                m = ln["alive"][:, ki]
                es = ln["e"][m, ki]
                out[Bidegree(self.kmin + ki, l)] = AbelianGroup(
                    int((es == 0).sum()), tuple(sorted(1 << int(e) for e in es if e)))
        return out

    def dump(self, inner_only: bool = True) -> list[dict]:
        kmin, kmax, lmin, lmax = self.inner if inner_only else (self.kmin, self.kmax, min(self.lines), max(self.lines))
        rows = []
        for l in sorted(self.lines):
            if not lmin <= l <= lmax:
                continue
            for k in range(kmin, kmax + 1):
                for p, _ in sorted(self.cells_at(Bidegree(k, l)), key=lambda x: x[0].key()):
                    rows.append({"page": self.page, "k": k, "l": l, "filtration": p.filtration,
                                 "order": p.order_text, "monomial": str(p.label)})
        return rows


def build_e1(kind: str, n: int, cfg: EngineConfig, lines: Iterable[int] | None = None) -> PageWindow:
    """E_1 page of the Tate (all t) or Borel (t >= 0) spectral sequence for BP<n>."""
    if kind not in ("tate", "borel"):
        raise ValueError(f"no grid E_1 for {kind!r}")
    if cfg.K < 1 or (cfg.L is not None and cfg.L < 1):
        raise ValueError("window bounds must be positive")
    cfg = cfg.resolved(n)
    dmax = cfg.depth + cfg.dpad
    kmin, kmax = -cfg.K - cfg.kpad, cfg.K + cfg.kpad
    lines = list(range(-cfg.L, cfg.L + 1)) if lines is None else sorted(set(lines))
    nwords = _count_words(n, dmax)
    nk = kmax - kmin + 1
    est = nwords * nk * len(lines)
    if est > cfg.budget:
        bound = "depth" if nwords > nk else "K"
        raise ResourceError(
            f"window too large: {est} cells > budget {cfg.budget} "
            f"(offending bound {bound}: K={cfg.K}, depth={cfg.depth}+{cfg.dpad}, n={n})")
    words = v_words(n, dmax)
    index = {w: i for i, w in enumerate(words)}
    W = np.array(words, dtype=np.int64).reshape(len(words), n)
    D = (W * np.array([v_dim(i) for i in range(1, n + 1)], dtype=np.int64)).sum(axis=1)
    big = 1 << 30
    minidx = np.array([next((i + 1 for i, r in enumerate(w) if r), big) for w in words], dtype=np.int64)
    plus = {0: np.arange(len(words))}
    for s in range(1, n + 1):
        arr = np.full(len(words), -1, dtype=np.int64)
        for i, w in enumerate(words):
            w2 = list(w)
            w2[s - 1] += 1
            arr[i] = index.get(tuple(w2), -1)
        plus[s] = arr
    ks = np.arange(kmin, kmax + 1, dtype=np.int64)
    J = D[:, None] - ks[None, :]
    jval = _val2(J)
    state = {}
    for l in lines:
        alive = np.ones((len(words), nk), dtype=bool)
        if kind == "borel":
            alive &= (2 * D[:, None] - ks[None, :] - l) >= 0
        state[l] = {
            "c": np.zeros((len(words), nk), dtype=np.int16),
            "e": np.zeros((len(words), nk), dtype=np.int16),
            "alive": alive,
        }
    return PageWindow(kind, n, cfg, 1, words, D, minidx, plus, kmin, kmax, state, jval)


def build_tate_e1(n: int, cfg: EngineConfig, lines: Iterable[int] | None = None) -> PageWindow:
    return build_e1("tate", n, cfg, lines)


def _count_words(n: int, dmax: int) -> int:
    counts = [1] + [0] * dmax  # number of words of exact half-weight d
    for i in range(1, n + 1):
        w = v_dim(i)
        for d in range(w, dmax + 1):
            counts[d] += counts[d - w]
    return sum(counts)


def stage_of(page: int) -> int | None:
    """Stage s with page = 2^{s+1} - 1, else None."""
    p = page + 1
    return p.bit_length() - 2 if p & (p - 1) == 0 and p >= 2 else None


def stage_pairs(pw: PageWindow, l: int, s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rule instances of stage s on line l: flat source/target indices and valuations."""
    ln = pw.lines[l]
    alive = ln["alive"]
    if s > pw.n:
        return (np.empty(0, np.int64),) * 3
    src = alive & (pw.jval == s) & (pw.minidx >= s)[:, None]
    wi, ki = np.nonzero(src)
    tw = pw.plus[s][wi]
    ok = (tw >= 0) & (ki >= 1)
    wi, ki, tw = wi[ok], ki[ok], tw[ok]
    tk = ki - 1
    ok = alive[tw, tk]
    wi, ki, tw, tk = wi[ok], ki[ok], tw[ok], tk[ok]
    nk = pw.nk
    xs = wi * nk + ki
    ys = tw * nk + tk
    rho = 1 if s == 0 else 0
    c = ln["c"].reshape(-1)
    d = c[xs].astype(np.int64) + rho - c[ys]
    if (d < 0).any():
        raise AssertionError("negative differential valuation")
    if src.reshape(-1)[ys].any():
        raise AssertionError("a cell is both source and target of one stage")
    if len(np.unique(ys)) != len(ys):
        raise AssertionError("rule instances do not form a matching")
    # bidegree shift (-1, 0) and filtration shift +r on every instance
    r = (2 << s) - 1
    t_src = 2 * pw.D[wi] - (pw.kmin + ki) - l
    t_tgt = 2 * pw.D[tw] - (pw.kmin + tk) - l
    assert (t_tgt - t_src == r).all()
    return xs, ys, d


def _apply(pw: PageWindow, l: int, s: int) -> int:
    """Apply stage s on line l in place; returns the number of nonzero maps."""
    xs, ys, d = stage_pairs(pw, l, s)
    ln = pw.lines[l]
    c = ln["c"].reshape(-1)
    e = ln["e"].reshape(-1)
    alive = ln["alive"].reshape(-1)
    ex = e[xs].astype(np.int64)
    ey = e[ys].astype(np.int64)
    free_y = ey == 0
    if (free_y & (ex > 0)).any():
        raise AssertionError("torsion source maps to a free target")
    # free target: source dies, target becomes Z/2^d
    fx, fy, fd = xs[free_y], ys[free_y], d[free_y]
    alive[fx] = False
    e[fy] = fd
    alive[fy[fd == 0]] = False
    # torsion target hit by 2^d with d < e_y
    m = ~free_y & (d < ey)
    tx, ty, td, drop = xs[m], ys[m], d[m], (ey - d)[m]
    c[tx] += drop.astype(np.int16)
    tors = e[tx] > 0
    e[tx[tors]] -= drop[tors].astype(np.int16)
    alive[tx[tors & (e[tx] <= 0)]] = False
    e[ty] = td
    alive[ty[td == 0]] = False
    return int(free_y.sum() + m.sum())


def turn_page(pw: PageWindow) -> PageWindow:
    out = copy.copy(pw)
    out.lines = {l: {k: v.copy() for k, v in ln.items()} for l, ln in pw.lines.items()}
    out.history = list(pw.history)
    s = stage_of(pw.page)
    if s is not None:
        for l in out.lines:
            _apply(out, l, s)
        out.history.append(s)
    out.page = pw.page + 1
    return out


def run_to_einfty(kind: str, n: int, cfg: EngineConfig, lines: Iterable[int] | None = None,
                  keep: list | None = None):
    """Turn pages through stage n; ``keep`` collects every intermediate page."""
    if kind == "geometric":
        return run_geometric(n, cfg)
    pw = build_e1(kind, n, cfg, lines)
    last = (2 << n) - 1
    while pw.page <= last:
        if keep is not None:
            keep.append(pw)
        pw = turn_page(pw)
    # pages above 2^{n+1} - 1 carry no differentials
    for l in pw.lines:
        xs, _, _ = stage_pairs(pw, l, n + 1)
        assert len(xs) == 0
    return pw


# ---------------------------------------------------------------- SNF reference path

def stage_matrices(pw: PageWindow, l: int, s: int, k: int):
    """Presented complex around (k, l) for stage s.

    Returns (A, B, orders_mid, orders_out, n_in): A maps the cells at k + 1 into
    those at k, B maps the cells at k into those at k - 1.  Orders are 2^e with
    0 marking a free cell.
    """
    xs, ys, d = stage_pairs(pw, l, s)
    ln = pw.lines[l]
    nk = pw.nk
    alive = ln["alive"]
    e = ln["e"]

    def col(kk):
        if not pw.kmin <= kk <= pw.kmax:
            return []
        ki = kk - pw.kmin
        return [int(w) * nk + ki for w in np.nonzero(alive[:, ki])[0]]

    def orders(cells):
        return [0 if e.reshape(-1)[x] == 0 else 1 << int(e.reshape(-1)[x]) for x in cells]

    cin, cmid, cout = col(k + 1), col(k), col(k - 1)
    pos_mid = {x: i for i, x in enumerate(cmid)}
    pos_out = {x: i for i, x in enumerate(cout)}
    A = [[0] * len(cin) for _ in cmid]
    B = [[0] * len(cmid) for _ in cout]
    pos_in = {x: i for i, x in enumerate(cin)}
    for x, y, dd in zip(xs.tolist(), ys.tolist(), d.tolist()):
        if x in pos_in and y in pos_mid:
            A[pos_mid[y]][pos_in[x]] = 1 << dd
        if x in pos_mid and y in pos_out:
            B[pos_out[y]][pos_mid[x]] = 1 << dd
    return A, B, orders(cmid), orders(cout), len(cin)


def stage_homology_snf(pw: PageWindow, s: int) -> dict[Bidegree, AbelianGroup]:
    """Homology of stage s computed by Smith normal form, bidegree by bidegree."""
    out = {}
    for l in pw.lines:
        for k in range(pw.kmin, pw.kmax + 1):
            A, B, om, oo, n_in = stage_matrices(pw, l, s, k)
            out[Bidegree(k, l)] = presented_homology(A, B, om, oo, n_in)
    return out


# ---------------------------------------------------------------- geometric induction

@dataclass
class GeometricRun:
    """Cells of the geometric induction, one representative per a-orbit.

    ``a`` is invertible and every differential commutes with it, so a cell is
    keyed by its v-word and s-exponent alone; the a-exponent follows from the
    twist of the bidegree being queried.
    """

    n: int
    cfg: EngineConfig
    cells: dict[tuple[tuple[int, ...], int], int]  # (v-exponents r_1..r_n, j) -> k
    trust_k: int
    steps: list[dict] = field(default_factory=list)

    @property
    def inner(self) -> tuple[int, int, int, int]:
        return (-self.cfg.K, self.cfg.K, -self.cfg.L, self.cfg.L)

    def pieces(self, b: Bidegree) -> list[Piece]:
        k, l = b
        if k > self.trust_k:
            raise ValueError(f"k={k} is outside the trusted range <= {self.trust_k}")
        out = []
        for (w, j), kk in self.cells.items():
            if kk != k:
                continue
            D = sum(r * v_dim(i + 1) for i, r in enumerate(w))
            vexp = tuple((i + 1, r) for i, r in enumerate(w) if r)
            t = D + j - l
            out.append(Piece(t, 1, Monomial(vexp, j, t)))
        return sorted(out, key=Piece.key)


def run_geometric(n: int, cfg: EngineConfig) -> GeometricRun:
    """Induct from Z/2[s^-2, a^+-1] adjoining v_1, ..., v_n one at a time."""
    cfg = cfg.resolved(n)
    if cfg.kpad < n:
        raise ValueError("k padding must be at least n")
    kmax = cfg.K + cfg.kpad
    zero = (0,) * n
    cells = {(zero, -2 * m): 2 * m for m in range(kmax // 2 + 1)}
    trust = kmax
    run = GeometricRun(n, cfg, cells, trust)
    for i in range(1, n + 1):
        w = v_dim(i)
        e1: dict[tuple[tuple[int, ...], int], int] = {}
        for (vec, j), k in cells.items():
            r = 0
            while k + r * w <= kmax:
                v2 = list(vec)
                v2[i - 1] += r
                e1[(tuple(v2), j)] = k + r * w
                r += 1
        step = 1 << i
        dead = set()
        pairs = 0
        for (vec, j), k in e1.items():
            if j == 0 or (j & -j) != step:
                continue
            if any(r for r in vec[: i - 1]):  # some index below i
                continue
            v2 = list(vec)
            v2[i - 1] += 1
            tgt = (tuple(v2), j + step)
            if tgt in e1:
                assert e1[tgt] == k - 1
                assert tgt not in dead
                dead.add((vec, j))
                dead.add(tgt)
                pairs += 1
        cells = {key: k for key, k in e1.items() if key not in dead}
        trust -= 1
        run.steps.append({"step": i, "e1": len(e1), "pairs": pairs, "survivors": len(cells)})
    run.cells = cells
    run.trust_k = trust
    return run


# ---------------------------------------------------------------- comparison

def _closed_pieces(gens, depth: int | None) -> list[Piece]:
    out = []
    for g in gens:
        m = g.monomial
        if depth is not None and m.half_weight > depth:
            continue
        out.append(Piece(m.aexp, 0 if g.order == FREE else 1, m))
    return sorted(out, key=Piece.key)


def _extension_ambiguous(pieces: list[Piece]) -> bool:
    """A torsion piece at a lower filtration than some other piece."""
    return any(p.e > 0 and any(q.filtration > p.filtration for q in pieces) for p in pieces)


@dataclass
class ComparisonReport:
    records: list[dict]
    literal_differs: list[Bidegree] = field(default_factory=list)

    @property
    def disagreements(self) -> list[dict]:
        return [r for r in self.records if r["status"] == "disagree"]

    def count(self, status: str) -> int:
        return sum(r["status"] == status for r in self.records)


def compare(pw, expected: Callable[[Bidegree], list[Piece]],
            literal: Callable[[Bidegree], list[Piece]] | None = None) -> ComparisonReport:
    kmin, kmax, lmin, lmax = pw.inner
    records = []
    literal_differs = []
    for l in range(lmin, lmax + 1):
        for k in range(kmin, kmax + 1):
            b = Bidegree(k, l)
            got = pw.pieces(b)
            want = expected(b)
            if [p.key() for p in got] != [p.key() for p in want]:
                status = "disagree"
                detail = f"engine {[str(p.label) for p in got]} closed form {[str(p.label) for p in want]}"
            elif _extension_ambiguous(got):
                status, detail = "extension-ambiguous", ", ".join(str(p.label) for p in got)
            else:
                status, detail = "agree", ", ".join(str(p.label) for p in got)
            records.append({"k": k, "l": l, "status": status, "detail": detail})
            if literal is not None and [p.key() for p in literal(b)] != [p.key() for p in got]:
                literal_differs.append(b)
    return ComparisonReport(records, literal_differs)


def _window_pieces(th: TheoryId, pw, mode: str, depth: int | None):
    kmin, kmax, lmin, lmax = pw.inner
    found = basis_window(th, kmin, kmax, lmin, lmax, mode)
    return lambda b: _closed_pieces(found.get(b, ()), depth)


def compare_to_closed_form(pw, theory: TheoryId) -> ComparisonReport:
    """Associated graded of E_infinity against the closed form, per inner bidegree."""
    depth = getattr(pw, "trust_depth", None)
    expected = _window_pieces(theory, pw, "theorem", depth)
    literal = None
    if theory.kind == "BorelCoh":
        literal = _window_pieces(theory, pw, "literal", depth)
    return compare(pw, expected, literal)


def a_powers_only(b: Bidegree) -> list[Piece]:
    """Expected BPR Tate E_infinity: a^t at (0, -t) for every integer t."""
    if b.k != 0:
        return []
    return [Piece(-b.l, 1, Monomial((), 0, -b.l))]


def bpr_height(K: int) -> int:
    """Height n whose Tate E_infinity agrees with BPR's inside |k| <= K.

    BP<n> adds the classes s^{2^{n+1} m} at k = -2^{n+1} m, so 2^{n+1} > K
    hides them from the window.
    """
    return max(K.bit_length() - 1, 0)


def run_bpr_tate(cfg: EngineConfig) -> PageWindow:
    return run_to_einfty("tate", bpr_height(cfg.K), cfg)


def twist_lines_independent(kind: str, n: int, cfg: EngineConfig, lines: list[int]) -> bool:
    """E_infinity from one joint run equals the runs of each line on its own."""
    joint = run_to_einfty(kind, n, cfg, lines)
    for l in lines:
        alone = run_to_einfty(kind, n, cfg, [l])
        for key in ("c", "e", "alive"):
            if not np.array_equal(joint.lines[l][key], alone.lines[l][key]):
                return False
    return True


def formal_pairing(window: int, max_index: int) -> list[tuple[Monomial, int]]:
    """Monomials v_0^{r_0} v_R s^j a^t (v_0 kept formal) not covered exactly once.

    Returns the offenders with their incidence count; pure a-powers are exempt.
    """
    bad = []
    idx = list(range(0, max_index + 1))
    for rs in itertools.product(*(range(0, window // max(v_dim(i), 1) + 1) if i else range(0, 4) for i in idx)):
        if sum(r * v_dim(i) for i, r in zip(idx, rs)) > window:
            continue
        for j in range(-window, window + 1):
            vexp = tuple((i, r) for i, r in zip(idx, rs) if r)
            m = Monomial(vexp, j, 0)
            if not vexp and j == 0:
                continue
            cnt = _incidence(m)
            if cnt != 1:
                bad.append((m, cnt))
    return bad


def _incidence(m: Monomial) -> int:
    """How many rule instances (v_0 formal, any height) have m as source or target."""
    cnt = 0
    mi = m.min_index
    j = m.sexp
    if j != 0:
        s = (j & -j).bit_length() - 1
        if mi is None or s <= mi:
            cnt += 1
    for s in m.support:
        src = m.with_v(s, -1)
        j0 = j - (1 << s)
        if j0 == 0 or (j0 & -j0) != (1 << s):
            continue
        smin = src.min_index
        if smin is None or s <= smin:
            cnt += 1
    return cnt
