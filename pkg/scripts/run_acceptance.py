"""Run the acceptance battery and print one PASS/FAIL line per criterion."""
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    proc = subprocess.run(cmd + sys.argv[1:], capture_output=True, text=True)
    lines = [l for l in proc.stdout.splitlines() if l.startswith(("PASS criterion", "FAIL criterion"))]
    print("\n".join(lines))
    if not lines:
        print(proc.stdout[-2000:], proc.stderr[-2000:], sep="\n")
    sys.exit(proc.returncode)
