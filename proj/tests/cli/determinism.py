"""Runs the command-line tool twice per config and compares results.json
byte for byte."""

import subprocess
import sys
import tempfile
from pathlib import Path

RUNS = [
    ("estimate", "matrix_iid_uniform.json"),
    ("separate", "ode_piecewise.json"),
    ("orbit", "matrix_markov.json"),
    ("example-torus", "torus_example.json"),
]


def main() -> int:
    binary, configs = sys.argv[1], Path(sys.argv[2])
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for cmd, cfg in RUNS:
            outputs = []
            for r in range(2):
                out = Path(tmp) / f"{cmd}-{r}"
                subprocess.run([binary, cmd, "--config", str(configs / cfg), "--out", str(out)],
                               check=False, capture_output=True)
                outputs.append((out / "results.json").read_bytes())
            same = outputs[0] == outputs[1] and len(outputs[0]) > 0
            failures += not same
            print(f"{cmd} {cfg}: {'identical' if same else 'DIFFERENT'} ({len(outputs[0])} bytes)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
