# Validates CLI artifacts against the shipped schemas.
import json
import pathlib
import sys

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

schemas = pathlib.Path(sys.argv[1])
work = pathlib.Path(sys.argv[2])
registry = Registry()
loaded = {}
for p in schemas.glob("*.schema.json"):
    s = json.loads(p.read_text())
    loaded[p.name] = s
    registry = registry.with_resource(p.name, Resource.from_contents(s))

pairs = [
    ("plan5.json", "plan.schema.json"),
    ("basis2.json", "basis.schema.json"),
    ("basis2.manifest.json", "manifest.schema.json"),
    ("transfer.json", "transfer.schema.json"),
]
bad = 0
for doc, schema in pairs:
    v = Draft202012Validator(loaded[schema], registry=registry)
    errors = list(v.iter_errors(json.loads((work / doc).read_text())))
    print(("ok   " if not errors else "FAIL ") + doc)
    for e in errors[:5]:
        print("     ", e.message)
    bad += bool(errors)
sys.exit(1 if bad else 0)
