"""Locate the exactness failures of the top row of the Tate diagram.

For each height n, audit the row BorelHom -> BPRn -> Geometric -> BorelHom
over a window and compare the failing bidegrees with the negative cone
(-p*mu - 1, p*mu + tau), mu, tau >= 1, p = 2^(n+1).  At n = 0 also compare
BPRn(0) against an independent Bredon computation of HZ coefficients.

    python3 scripts/negative_cone_check.py --window 24
"""

import argparse

from realchrom.diagram import audit_row, bredon_hz, negative_cone
from realchrom.grading import Bidegree
from realchrom.rings import TheoryId, collision_bidegrees, groups_window


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--window", type=int, default=24)
    ap.add_argument("--nmax", type=int, default=3)
    args = ap.parse_args()
    K = args.window
    for n in range(args.nmax + 1):
        rep = audit_row("top", n, K)
        bad = sorted((Bidegree(r["k"], r["l"]) for r in rep.violations), key=lambda b: (b.l, b.k))
        cone = negative_cone(n, K)
        print(f"n={n}: {len(bad)} violations, negative cone has {len(cone)} cells, equal: {bad == cone}")
        for r in rep.violations[:3]:
            print(f"   {r['k']}+{r['l']}A  A={r['A']}  B={r['B']}  C={r['C']}")

    th = TheoryId("BPRn", 0)
    W = min(K, 12)
    closed = groups_window(th, -W, W, -W, W)
    collisions = set(collision_bidegrees(th, -W, W, -W, W))
    cone = set(negative_cone(0, W))
    diff = [b for b, g in closed.items()
            if (bredon_hz(b.k, b.l).free_rank, len(bredon_hz(b.k, b.l).torsion)) != g.shape]
    print(f"HZ Bredon oracle, window {W}: {len(diff)} differing bidegrees; "
          f"{len(set(diff) & cone)} in the negative cone, {len(set(diff) & collisions)} at collisions")
    for b in sorted(set(diff) & cone, key=lambda b: (b.l, b.k))[:4]:
        print(f"   {b}: oracle {bredon_hz(b.k, b.l)}, closed form {closed[b]}")


if __name__ == "__main__":
    main()
