"""Experiment scenarios stored as ``key = value`` text files."""

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import ArgumentError, LookupFailure
from ..samplers import Method
from ..targets import BUILTINS

_INT_KEYS = {"n", "burn_in", "thin", "bins", "ks_thin", "max_iter"}
_FLOAT_KEYS = {"x0", "a_scale", "width", "threshold"}
_STR_KEYS = {"name", "target", "reference"}


@dataclass
class ScenarioSpec:
    name: str
    target: str
    methods: list
    x0: float = 1.0
    n: int = 10000
    burn_in: int = 100
    thin: int = 1
    a_scale: float = 100.0
    width: float = 1.0
    bounds: tuple = None
    max_iter: int = 1000
    bins: int = 20
    ks_thin: int = 10
    threshold: float = None
    reference: str = None
    description: str = field(default="", repr=False)

    def validate(self):
        if not self.target.startswith("expr:") and self.target not in BUILTINS:
            raise ArgumentError(f"scenario {self.name}: unknown target {self.target!r}")
        if self.reference is not None and self.reference not in BUILTINS:
            raise ArgumentError(f"scenario {self.name}: unknown reference {self.reference!r}")
        if not self.methods:
            raise ArgumentError(f"scenario {self.name}: no methods")
        if Method.BOUNDED in self.methods and self.bounds is None:
            raise ArgumentError(f"scenario {self.name}: bounded method needs bounds")
        if self.n <= 0 or self.burn_in < 0 or self.thin < 1:
            raise ArgumentError(f"scenario {self.name}: bad n/burn_in/thin")
        return self


def parse_scenario(text, default_name="scenario"):
    values = {}
    comments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line.lstrip("# "))
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ArgumentError(f"line {lineno}: expected 'key = value'")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
                if not math.isfinite(values[key]):
                    raise ValueError(val)
            elif key in _STR_KEYS:
                values[key] = val
            elif key == "methods":
                values[key] = [Method(m.strip()) for m in val.split(",") if m.strip()]
            elif key == "bounds":
                lo, hi = (float(v) for v in val.split(","))
                values[key] = (lo, hi)
            else:
                raise ArgumentError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ArgumentError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    values.setdefault("name", default_name)
    for req in ("target", "methods"):
        if req not in values:
            raise ArgumentError(f"scenario is missing '{req}'")
    return ScenarioSpec(description=" ".join(comments), **values).validate()


def available():
    return sorted(
        p.name[:-4] for p in resources.files(__package__).iterdir() if p.name.endswith(".scn")
    )


def load(name):
    path = resources.files(__package__) / f"{name}.scn"
    if not path.is_file():
        raise LookupFailure(f"unknown scenario {name!r}; available: {', '.join(available())}")
    return parse_scenario(path.read_text(), name)


def load_file(path):
    path = Path(path)
    return parse_scenario(path.read_text(), path.stem)
