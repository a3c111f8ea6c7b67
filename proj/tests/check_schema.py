"""Runs the CLI on a small model and validates the result document against the schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    with tempfile.TemporaryDirectory() as tmp:
        model = Path(tmp) / "erlang.ctmdp"
        subprocess.run([cli, "generate", "erlang", "--k", "50", "--r", "10", "--out", str(model)], check=True, capture_output=True)
        runs = [
            ["--epsilon", "0.02", "--seed", "3", "--emit-scheduler", str(Path(tmp) / "s.json")],
            ["--epsilon", "0.02", "--full", "--solver-epsilon", "0.005"],
            ["--epsilon", "0.001", "--max-iterations", "1", "--nsim", "1"],
        ]
        for extra in runs:
            proc = subprocess.run([cli, "solve", "--model", str(model), "--time-bound", "2", *extra], capture_output=True, text=True)
            if proc.returncode not in (0, 2):
                print(proc.stderr)
                return 1
            document = json.loads(proc.stdout)
            jsonschema.validate(document, schema)
            assert document["lower"] <= document["upper"]
            assert document["converged"] == (document["upper"] - document["lower"] < document["epsilon"])
            assert document["converged"] == (proc.returncode == 0)
    print("result documents match the schema")
    return 0


if __name__ == "__main__":
    sys.exit(main())
