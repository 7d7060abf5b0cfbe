#!/usr/bin/env python3
"""End-to-end checks of the command-line tool: exit codes, output files, JSON records."""

import csv
import json
import os
import subprocess
import sys
import tempfile

try:
    import jsonschema
except ImportError:  # schema validation is skipped without the package
    jsonschema = None

CLI, ROOT = sys.argv[1], sys.argv[2]
CONFIGS = os.path.join(ROOT, "configs")
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    p = subprocess.run([CLI, *args], capture_output=True, text=True)
    return p.returncode, p.stdout + p.stderr


def cfg(name):
    return os.path.join(CONFIGS, name + ".cfg")


def load_records(path):
    with open(path) as fh:
        return json.load(fh)


with tempfile.TemporaryDirectory() as tmp:
    rc, out = run("validate", "--config", cfg("kpp_homogeneous"))
    check(rc == 0, "validate accepts the homogeneous KPP medium")

    rc, out = run("validate", "--config", cfg("bad_advection"))
    check(rc == 1, "validate rejects a non-periodic advection field")
    check("FAIL advection_mean_zero" in out, "the failed hypothesis is named")

    rc, out = run("validate", "--config", os.path.join(tmp, "missing.cfg"))
    check(rc == 2, "a missing config file exits 2")

    rc, out = run("speed")
    check(rc == 2, "a missing --config exits 2")

    schema = None
    with open(os.path.join(ROOT, "schema", "speed_record.schema.json")) as fh:
        schema = json.load(fh)

    def schema_ok(records):
        if jsonschema is None:
            return True
        try:
            for r in records:
                jsonschema.validate(r, schema)
        except jsonschema.ValidationError as e:
            print("     " + e.message)
            return False
        return True

    kpp_out = os.path.join(tmp, "kpp")
    rc, out = run("speed", "--config", cfg("kpp_homogeneous"), "--routes", "eigenvalue,upper_bound,lower_bound",
                  "--out", kpp_out)
    check(rc == 0, "speed on the homogeneous KPP medium exits 0")
    doc = load_records(os.path.join(kpp_out, "speed.json"))
    by_route = {r["route"]: r for r in doc["records"]}
    check(abs(by_route["eigenvalue"]["value"] - 2.0) < 1e-6, "eigenvalue route gives c* = 2")
    check(by_route["lower_bound"]["status"].startswith("refused: "), "max-min route is refused for KPP")
    check(schema_ok(doc["records"]), "KPP records match the schema")

    comb_out = os.path.join(tmp, "comb")
    rc, out = run("speed", "--config", cfg("combustion_homogeneous"), "--routes", "lower_bound,upper_bound",
                  "--out", comb_out)
    check(rc == 0, "speed on the homogeneous combustion medium exits 0")
    doc = load_records(os.path.join(comb_out, "speed.json"))
    by_route = {r["route"]: r for r in doc["records"]}
    lo, up = by_route["lower_bound"]["value"], by_route["upper_bound"]["value"]
    check(lo <= up, "lower bound does not exceed upper bound")
    check(abs(up - lo) < 1e-3 * 0.4953702, "planar-profile bounds pinch the planar speed")
    check(doc["consistency"]["consistent"], "combustion report is consistent")
    check(schema_ok(doc["records"]), "combustion records match the schema")

    rc, out = run("sweep", "--config", cfg("kpp_homogeneous"), "--key", "no.such.key", "--values", "1",
                  "--out", os.path.join(tmp, "bad"))
    check(rc == 2, "sweep over an unknown key exits 2")

    empty_out = os.path.join(tmp, "empty")
    rc, out = run("sweep", "--config", cfg("kpp_homogeneous"), "--key", "reaction.scale", "--values", "",
                  "--routes", "eigenvalue", "--out", empty_out)
    with open(os.path.join(empty_out, "sweep.csv")) as fh:
        lines = fh.read().splitlines()
    check(rc == 0 and lines == ["value,eigenvalue,eigenvalue_uncertainty"], "empty sweep writes the header only")

    sweep_out = os.path.join(tmp, "theta")
    rc, out = run("sweep", "--config", cfg("kpp_homogeneous"), "--key", "reaction.cutoff", "--values",
                  "0.4,0.2,0.1", "--routes", "simulation", "--out", sweep_out)
    check(rc == 0, "cut-off sweep exits 0")
    with open(os.path.join(sweep_out, "sweep_simulation.csv")) as fh:
        speeds = [float(r["speed"]) for r in csv.DictReader(fh)]
    check(len(speeds) == 3 and speeds[0] < speeds[1] < speeds[2], "speeds grow as the cut-off decreases")

    sim_out = os.path.join(tmp, "sim")
    rc, out = run("simulate", "--config", cfg("kpp_homogeneous"), "--out", sim_out)
    check(rc == 0, "simulate exits 0")
    with open(os.path.join(sim_out, "timeseries.csv")) as fh:
        header = fh.readline().strip()
    check(header == "t,X_mass,X_level,min_u,max_u", "time-series header")

    prof_out = os.path.join(tmp, "prof")
    rc, out = run("profile", "--config", cfg("combustion_homogeneous"), "--out", prof_out)
    check(rc == 0, "profile exits 0")
    with open(os.path.join(prof_out, "profile.json")) as fh:
        check(abs(json.load(fh)["c0"] - 0.4953702) < 1e-5, "profile speed matches the shooting value")

    rc, out = run("profile", "--config", cfg("kpp_homogeneous"), "--out", os.path.join(tmp, "kprof"))
    check(rc != 0, "profile refuses a KPP source")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
