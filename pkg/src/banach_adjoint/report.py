"""Property reports shared by every checker."""

import json
from dataclasses import dataclass, field

import numpy as np


def jsonable(obj):
    """Recursively convert numpy containers and scalars to plain Python."""
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class Assertion:
    prop: str
    passed: bool
    defect: float
    witness: object = None


@dataclass
class Measurement:
    quantity: str
    value: float
    witness: object = None


@dataclass
class PropertyReport:
    """Outcome of one checker run.

    ``asserted`` entries decide pass/fail; ``measured`` entries are reported
    only. Each assertion keeps the worst defect seen and the input that
    produced it, so a failure can be replayed from its witness.
    """

    name: str
    seed: int | None = None
    trials: int = 0
    asserted: list = field(default_factory=list)
    measured: list = field(default_factory=list)

    @property
    def passed(self):
        return all(a.passed for a in self.asserted)

    def failures(self):
        return [a for a in self.asserted if not a.passed]

    def get(self, prop):
        for a in self.asserted:
            if a.prop == prop:
                return a
        for m in self.measured:
            if m.quantity == prop:
                return m
        raise KeyError(prop)

    def add_assertion(self, prop, defect, tol, witness=None):
        """Record `prop` as passing iff ``defect <= tol``."""
        defect = float(defect)
        ok = bool(np.isfinite(defect) and defect <= tol)
        self.asserted.append(Assertion(prop, ok, defect, witness))
        return ok

    def assert_worst(self, prop, defects, witnesses, tol):
        """Assert over many trials, keeping the worst trial as witness."""
        defects = np.asarray(defects, dtype=float)
        if defects.size == 0:
            return self.add_assertion(prop, 0.0, tol)
        bad = ~np.isfinite(defects)
        k = int(np.argmax(bad)) if bad.any() else int(np.argmax(defects))
        return self.add_assertion(prop, defects[k], tol, witnesses[k])

    def measure(self, quantity, value, witness=None):
        self.measured.append(Measurement(quantity, float(value), witness))

    def to_dict(self):
        return jsonable({
            "name": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "asserted": [
                {"prop": a.prop, "pass": a.passed, "defect": a.defect,
                 "witness": a.witness}
                for a in self.asserted
            ],
            "measured": [
                {"quantity": m.quantity, "value": m.value, "witness": m.witness}
                for m in self.measured
            ],
        })

    @classmethod
    def from_dict(cls, d):
        rep = cls(d["name"], d.get("seed"), d.get("trials", 0))
        rep.asserted = [Assertion(a["prop"], a["pass"], float(a["defect"]),
                                  a.get("witness"))
                        for a in d.get("asserted", [])]
        rep.measured = [Measurement(m["quantity"], float(m["value"]),
                                    m.get("witness"))
                        for m in d.get("measured", [])]
        return rep

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    def summary(self):
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for a in self.asserted:
            lines.append(f"  [{'ok' if a.passed else 'FAIL'}] {a.prop}: "
                         f"defect={a.defect:.3e}")
        for m in self.measured:
            lines.append(f"  [measured] {m.quantity} = {m.value:.6g}")
        return "\n".join(lines)
