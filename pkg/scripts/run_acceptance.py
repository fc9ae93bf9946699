"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import re
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "tests/test_acceptance.py"],
                          cwd=ROOT, capture_output=True, text=True)
    lines = [x for x in proc.stdout.splitlines() if re.match(r"ACCEPTANCE \d", x)]
    for x in lines:
        print(x)
    failed = sum(" FAIL" in x for x in lines)
    print(f"{len(lines) - failed}/{len(lines)} criteria pass")
    return proc.returncode


if __name__ == "__main__":
    raise SystemExit(main())
