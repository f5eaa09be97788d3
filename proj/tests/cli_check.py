"""Exit codes and report schema of the qhlab command line tool."""
import json
import subprocess
import sys

import jsonschema

exe, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as fh:
    validator = jsonschema.Draft202012Validator(json.load(fh))
failures = []


def run(args, code):
    proc = subprocess.run([exe, *args], capture_output=True, text=True, timeout=300)
    if proc.returncode != code:
        failures.append(f"{' '.join(args)}: exit {proc.returncode}, wanted {code}\n{proc.stderr}")
    return proc


run(["invariant-dims", "--n", "3"], 0)
run(["invariant-dims", "--n", "9"], 2)
run(["classify-bracket", "--spec", "0,0,0,0,0"], 0)
run(["classify-bracket", "--spec", "1,0,1,1,0"], 1)
run(["classify-bracket", "--spec", "1,2"], 2)
run(["no-such-command"], 2)
run(["model-report", "--spec", "H9:n=3"], 2)
run(["model-report", "--spec", "H2:n=3", "--grid", "1,0"], 2)
run(["reproduce", "table3", "--n", "3"], 0)

for spec in ["H1-:n=3", "H3:beta=2:n=3", "H5:beta=1:n=3", "QHH:n=3", "TwistedTheta:n=3", "FlatMax:n=3"]:
    proc = run(["model-report", "--spec", spec, "--grid", "1,1;2,1", "--format", "json"], 0)
    try:
        doc = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        failures.append(f"{spec}: output is not JSON ({exc})")
        continue
    for err in validator.iter_errors(doc):
        failures.append(f"{spec}: {'/'.join(map(str, err.absolute_path))}: {err.message}")

for f in failures:
    print("FAIL", f)
print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
