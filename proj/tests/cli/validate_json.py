#!/usr/bin/env python3
"""Runs each --json subcommand and validates its output against the shipped schema."""
import json
import subprocess
import sys

import jsonschema

COMMANDS = [
    ["solve", "-k", "2", "-l", "5"],
    ["solve", "-k", "2", "-l", "3"],
    ["solve", "-k", "1", "-l", "3"],
    ["classify", "-k", "3", "-l", "2"],
    ["critical", "-k", "2"],
    ["critical", "-k", "6", "--epsilon", "0.5"],
    ["oracle", "-k", "2", "-l", "5", "-n", "3", "--mode", "periodic", "--samples", "100", "--seed", "4"],
    ["oracle", "-k", "3", "-l", "2", "-n", "2", "--root", "full", "--mode", "perturbed"],
    ["weak", "-k", "6", "-l", "10", "--set", "I4"],
    ["weak", "-k", "3", "-i", "2", "-l", "3", "--set", "I3"],
]


def main():
    binary, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in COMMANDS:
        proc = subprocess.run([binary, *args, "--json"], capture_output=True, text=True)
        label = " ".join(args)
        if proc.returncode != 0:
            print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(json.loads(proc.stdout)), key=lambda e: list(e.path))
        if errors:
            print(f"FAIL {label}: {errors[0].message}")
            failures += 1
        else:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
