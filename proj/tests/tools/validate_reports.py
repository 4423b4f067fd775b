"""Runs the CLI on a few inputs and validates every JSON report against the schema."""
import json
import os
import subprocess
import sys

import jsonschema


def main():
    cli, schema_path, workdir = sys.argv[1:4]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    spec = os.path.join(workdir, "schema_check_chain.json")
    with open(spec, "w") as f:
        json.dump({"format_version": 1, "name": "three", "states": ["a", "b", "c"],
                   "weights": [["a", "b", 1], ["b", "c", "1/2"], ["c", "c", 1]]}, f)

    runs = [
        ["info", "--family", "aldous", "--n", "3"],
        ["info", spec],
        ["certify", spec],
        ["certify", "--family", "two_state", "--param", "p=0.5", "--param", "q=0.5", "--tolerance", "-1"],
        ["certify", "--family", "aldous", "--n", "4", "--mode", "candidates", "--functions", "10"],
        ["sweep", "--family", "aldous", "--schedule", "5,6", "--k-target", "z"],
        ["sweep", "--family", "complete", "--schedule", "4,4"],
    ]
    failures = 0
    for args in runs:
        proc = subprocess.run([cli] + args, capture_output=True, text=True)
        if proc.returncode not in (0, 1):
            print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        doc = json.loads(proc.stdout)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"FAIL {' '.join(args)}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {' '.join(args)}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
