"""Named verification suites shared by the CLI and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import ROWS, audit_row, completeness_gap, row_theories
from .engine import EngineConfig, a_powers_only, compare, compare_to_closed_form, run_bpr_tate, run_to_einfty
from .grading import Bidegree
from .rings import TheoryId, collision_bidegrees, corollary_diff, twist_slice

SUITES = ("tate-closed-form", "borel-closed-form", "geometric", "bpr-tate", "les", "ko",
          "corollary-diff", "gap")

# 2-local homotopy of connective real K-theory in degrees 0..16
KO_PATTERN = ("Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0") * 2 + ("Z",)


@dataclass
class SuiteResult:
    suite: str
    ok: bool
    lines: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def render(self) -> str:
        out = list(self.lines)
        if self.failures:
            out.append(f"FAILED at {len(self.failures)} place(s); first 20:")
            out.extend("  " + f for f in self.failures[:20])
        out.append(f"{self.suite}: {'ok' if self.ok else 'FAIL'}")
        return "\n".join(out) + "\n"


def default_window(suite: str, n: int) -> int:
    return {"gap": 4 << n, "corollary-diff": 32, "bpr-tate": 24, "ko": 16}.get(suite, 40)


def _sorted(bs):
    return sorted(bs, key=lambda b: (b.l, b.k))


def tate_closed_form(n: int, K: int, L: int | None = None) -> SuiteResult:
    pw = run_to_einfty("tate", n, EngineConfig(K, L))
    rep = compare_to_closed_form(pw, TheoryId("Tate", n))
    bad = [f"{r['k']}+{r['l']}A: {r['detail']}" for r in rep.disagreements]
    lines = [f"Tate({n}) window {K}: {len(rep.records)} bidegrees, {rep.count('agree')} agree, "
             f"{len(bad)} disagree (half-weight <= {pw.trust_depth})"]
    return SuiteResult("tate-closed-form", not bad, lines, bad)


def borel_closed_form(n: int, K: int, L: int | None = None) -> SuiteResult:
    pw = run_to_einfty("borel", n, EngineConfig(K, L))
    th = TheoryId("BorelCoh", n)
    rep = compare_to_closed_form(pw, th)
    Lr = pw.cfg.L
    collisions = collision_bidegrees(th, -K, K, -Lr, Lr)
    literal = _sorted(rep.literal_differs)
    bad = [f"{r['k']}+{r['l']}A: {r['detail']}" for r in rep.disagreements]
    if literal != collisions:
        bad.append(f"literal-reading differences {[str(b) for b in literal]} != collision set")
    lines = [
        f"BorelCoh({n}) window {K}: {rep.count('agree')} agree, "
        f"{rep.count('extension-ambiguous')} extension-ambiguous, {len(rep.disagreements)} disagree",
        f"literal two-summand reading differs at {len(literal)} collision bidegree(s):",
    ]
    lines += [f"  {b}" for b in literal]
    return SuiteResult("borel-closed-form", not bad, lines, bad)


def geometric(n: int, K: int, L: int | None = None) -> SuiteResult:
    run = run_to_einfty("geometric", n, EngineConfig(K, L))
    rep = compare_to_closed_form(run, TheoryId("Geometric", n))
    bad = [f"{r['k']}+{r['l']}A: {r['detail']}" for r in rep.disagreements]
    lines = [f"Geometric({n}) window {K}: {rep.count('agree')} agree, {len(bad)} disagree"]
    lines += [f"  step {s['step']}: E_1 {s['e1']} cells, {s['pairs']} pairs, {s['survivors']} survive"
              for s in run.steps]
    return SuiteResult("geometric", not bad, lines, bad)


def bpr_tate(K: int) -> SuiteResult:
    pw = run_bpr_tate(EngineConfig(K))
    rep = compare(pw, a_powers_only)
    bad = [f"{r['k']}+{r['l']}A: {r['detail']}" for r in rep.disagreements]
    lines = [f"BPR Tate (through v_{pw.n}) window {K}: E_infinity is a-powers only: {not bad}"]
    return SuiteResult("bpr-tate", not bad, lines, bad)


def les(n: int, K: int, L: int | None = None) -> SuiteResult:
    lines, bad = [], []
    ext_all = []
    for row in ROWS:
        rep = audit_row(row, n, K, L)
        ext = rep.with_status("exact-up-to-extension")
        ext_all += ext
        lines.append(f"{row} row n={n} window {K}: {len(rep.with_status('exact'))} exact, "
                     f"{len(ext)} exact-up-to-extension, {len(rep.violations)} violation(s)")
        for r in rep.violations:
            bad.append(f"{row} {r['k']}+{r['l']}A: A={r['A']} B={r['B']} C={r['C']} homology {r['witness']}")
    Lr = K if L is None else L
    expected = collision_bidegrees(row_theories("top", n)[1], -K, K, -Lr, Lr)
    if _sorted(ext_all) != expected:
        bad.append(f"extension set {[str(b) for b in _sorted(ext_all)]} != collision set {[str(b) for b in expected]}")
    return SuiteResult("les", not bad, lines, bad)


def ko() -> SuiteResult:
    got = twist_slice(TheoryId("BPRn", 1), 0, 0, 16)
    lines, bad = [], []
    for (k, g), want in zip(got, KO_PATTERN):
        text = _short(g)
        mark = "ok" if text == want else "MISMATCH"
        lines.append(f"{k:>2}  {text:<4} ko: {want:<4} {mark}  {g}")
        if text != want:
            bad.append(f"k={k}: {g} vs {want}")
    return SuiteResult("ko", not bad, lines, bad)


def _short(g) -> str:
    if g.is_trivial:
        return "0"
    if g.shape == (1, 0):
        return "Z"
    if g.shape == (0, 1):
        return "Z/2"
    return g.group_text()


def corollary(n: int, depth: int = 32) -> SuiteResult:
    p = 2 << n
    lines, bad = [f"BPRn({n}) second-summand classes, theorem vs corollary placement"], []
    for l in range(-1, -depth - 1, -1):
        d = corollary_diff(n, l)
        want = -l // p
        if d["theorem_count"] != want or d["corollary_count"] != want or not d["sign_flip"]:
            bad.append(f"l={l}: {d}")
        if d["theorem_count"]:
            lines.append(f"l={l}: count {d['theorem_count']}  theorem k={d['theorem_dims']}  "
                         f"corollary k={d['corollary_dims']}")
    return SuiteResult("corollary-diff", not bad, lines, bad)


def gap(n: int, K: int, L: int | None = None) -> SuiteResult:
    entries = completeness_gap(n, K, L)
    p = 2 << n
    lines = [f"completeness gap n={n} window {K}: {len(entries)} bidegree(s)"]
    lines += [f"  {b}: BPRn {x}  |  BorelCoh {y}" for b, x, y in entries]
    bad = []
    if not entries:
        bad.append("gap is empty")
    if p <= K and Bidegree(-p, p) not in {b for b, _, _ in entries}:
        bad.append(f"missing the s^{p} bidegree {Bidegree(-p, p)}")
    return SuiteResult("gap", not bad, lines, bad)


def run_suite(name: str, n: int | None, K: int | None, L: int | None = None) -> SuiteResult:
    n = 1 if n is None else n
    K = default_window(name, n) if K is None else K
    if name == "tate-closed-form":
        return tate_closed_form(n, K, L)
    if name == "borel-closed-form":
        return borel_closed_form(n, K, L)
    if name == "geometric":
        return geometric(n, K, L)
    if name == "bpr-tate":
        return bpr_tate(K)
    if name == "les":
        return les(n, K, L)
    if name == "ko":
        return ko()
    if name == "corollary-diff":
        return corollary(n, K)
    if name == "gap":
        return gap(n, K, L)
    raise ValueError(f"unknown suite {name!r}")
