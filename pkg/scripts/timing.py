"""Wall-clock timings of the engine runs behind the acceptance criteria."""

import argparse
import time

from realchrom.diagram import audit_row
from realchrom.engine import EngineConfig, run_bpr_tate, run_to_einfty


def timed(label, fn):
    t = time.perf_counter()
    fn()
    print(f"{label:<28} {time.perf_counter() - t:7.2f}s")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--window", type=int, default=40)
    args = ap.parse_args()
    K = args.window
    for n in range(4):
        timed(f"tate n={n}", lambda: run_to_einfty("tate", n, EngineConfig(K)))
        timed(f"borel n={n}", lambda: run_to_einfty("borel", n, EngineConfig(K)))
        timed(f"geometric n={n}", lambda: run_to_einfty("geometric", n, EngineConfig(K)))
        timed(f"audit top n={n}", lambda: audit_row("top", n, K))
    timed("bpr tate window 24", lambda: run_bpr_tate(EngineConfig(24)))


if __name__ == "__main__":
    main()
