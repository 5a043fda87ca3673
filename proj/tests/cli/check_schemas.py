"""Runs the CLI and validates every JSON output against docs/schemas."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = root / "docs" / "schemas"
data = root / "tests" / "data"

resources = []
for path in schemas.glob("*.schema.json"):
    doc = json.loads(path.read_text())
    resources.append((path.name, Resource.from_contents(doc)))
registry = Registry().with_resources(resources)


def validate(schema_name, args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True, check=False)
    if proc.returncode != 0:
        sys.exit(f"{args}: exit {proc.returncode}\n{proc.stderr}")
    doc = json.loads(proc.stdout)
    schema = json.loads((schemas / schema_name).read_text())
    validator = jsonschema.Draft202012Validator(schema, registry=registry)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        for e in errors[:5]:
            print(f"{schema_name} {list(e.path)}: {e.message}")
        sys.exit(f"{args}: schema violations")
    print(f"ok {schema_name} {' '.join(args)}")


validate("report.schema.json", ["analyze", "--pattern", str(data / "ex1.pat")])
validate("report.schema.json", ["analyze", "--pattern", str(data / "ex2.pat"), "--pmax", "8"])
validate("report.schema.json", ["analyze", "--pattern", str(data / "n3k4.pat"), "--format", "json"])
validate("oracle.schema.json", ["oracle", "--pattern", str(data / "ex1.pat"), "--period", "4"])
validate("oracle.schema.json", ["oracle", "--pattern", str(data / "ex1.pat"), "--period", "3"])
validate("survey.schema.json", ["survey", "--n", "3", "--k", "5"])
validate("survey.schema.json", ["survey", "--n", "3", "--k", "6", "--pmax", "6",
                                "--filter", "theorem1-inapplicable"])
validate("enumerate.schema.json", ["enumerate", "--n", "3", "--k", "5", "--format", "json"])
validate("enumerate.schema.json", ["enumerate", "--n", "4", "--k", "7", "--sample", "5",
                                   "--seed", "3", "--format", "json"])
validate("orders.schema.json", ["orders", "--relation", "baldwin", "--t", "2", "--m", "4",
                                "--k", "6", "--format", "json"])
validate("orders.schema.json", ["orders", "--relation", "shark", "--segment", "12", "--format", "json"])
validate("verify.schema.json", ["verify-paper", "--json"])
