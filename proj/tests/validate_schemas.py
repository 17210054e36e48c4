#!/usr/bin/env python3
# Copyright 2026 The SASCI Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Runs every JSON/CSV-emitting subcommand on the micro dataset and checks
the output against the shipped schemas."""

import csv
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def load_schemas(schema_dir):
    schemas = {}
    registry = Registry()
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        schemas[path.name] = doc
        resource = Resource.from_contents(doc)
        registry = registry.with_resources([(doc["$id"], resource), (path.name, resource)])
    return schemas, registry


class Checker:
    def __init__(self, schema_dir):
        self.schemas, self.registry = load_schemas(schema_dir)
        self.tables = json.loads((schema_dir / "csv_tables.json").read_text())
        self.failures = 0

    def json(self, label, schema_name, doc):
        validator = jsonschema.Draft202012Validator(self.schemas[schema_name], registry=self.registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            self.failures += 1
            for e in errors[:5]:
                print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
        else:
            print(f"ok   {label}")

    def csv(self, label, table_name, text):
        table = self.tables[table_name]
        rows = list(csv.reader(text.splitlines()))
        problems = []
        if not rows or rows[0] != table["columns"]:
            problems.append(f"header {rows[0] if rows else None} != {table['columns']}")
        for n, row in enumerate(rows[1:], start=2):
            if len(row) != len(table["columns"]):
                problems.append(f"line {n}: {len(row)} fields")
                continue
            for value, kind in zip(row, table["types"]):
                optional = kind.endswith("?")
                kind = kind.rstrip("?")
                if value == "" and optional:
                    continue
                try:
                    if kind == "integer":
                        int(value)
                    elif kind == "number":
                        float(value)
                except ValueError:
                    problems.append(f"line {n}: '{value}' is not {kind}")
        if len(rows) < 2:
            problems.append("no data rows")
        if problems:
            self.failures += 1
            for p in problems[:5]:
                print(f"FAIL {label}: {p}")
        else:
            print(f"ok   {label}")


def run(binary, *args):
    proc = subprocess.run([binary, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"{' '.join(map(str, args))} exited {proc.returncode}:\n{proc.stderr}")
    return proc.stdout


def main():
    binary, schema_dir, micro = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    check = Checker(schema_dir)
    config = micro / "config.json"
    check.json("data/micro/config.json", "config.schema.json", json.loads(config.read_text()))
    check.json("data/micro/manifest.json", "manifest.schema.json", json.loads((micro / "manifest.json").read_text()))

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        run(binary, "run-adaptive", config, "-o", tmp / "a")
        run(binary, "run-traditional", config, "-o", tmp / "t")
        for mode in ("a", "t"):
            check.json(f"{mode}/report.json", "report.schema.json", json.loads((tmp / mode / "report.json").read_text()))
            check.csv(f"{mode}/report.csv", "report.csv", (tmp / mode / "report.csv").read_text())
        for sidecar in sorted((tmp / "a").glob("*/*.json")):
            check.json(str(sidecar.relative_to(tmp)), "tensor.schema.json", json.loads(sidecar.read_text()))

        check.csv("compare", "comparison.csv", run(binary, "compare", tmp / "t/report.json", tmp / "a/report.json"))

        bench = json.loads(run(binary, "bench", "--size", "32x32x4", "--iters", "20"))
        check.json("bench", "bench.schema.json", bench)

        run(binary, "ablate-d", config, "--values", "2,4", "--seeds", "2", "-o", tmp / "abl.csv")
        check.csv("ablate-d summary", "ablation.csv", (tmp / "abl.csv").read_text())
        check.csv("ablate-d seeds", "ablation_seeds.csv", (tmp / "abl.csv.seeds.csv").read_text())

        preview = json.loads(run(binary, "saliency-preview", tmp / "a/meas/t0001.f32", tmp / "a/masks/t0001.f32",
                                 "-o", tmp / "preview"))
        check.json("saliency-preview", "preview.schema.json", preview)

        run(binary, "make-synthetic", tmp / "syn", "--size", "32x32", "--frames", "8", "--grouping", "4",
            "--block", "8")
        check.json("make-synthetic manifest", "manifest.schema.json", json.loads((tmp / "syn/manifest.json").read_text()))

    if check.failures:
        print(f"{check.failures} schema check(s) failed")
        return 1
    print("all outputs match their schemas")
    return 0


if __name__ == "__main__":
    sys.exit(main())
