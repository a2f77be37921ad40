"""Seeded ensemble runs of the theorem checkers.

Usage::

    banach-adjoint verify --config run.json [--seed N] [--out FILE] [--format json|csv]

Exit status is 0 when every asserted property held, 1 when at least one
failed (witnesses are in the output), 2 when the config is invalid.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._random import case_seed, make_rng
from .adjoint import (Operator, check_h2_bound, check_lax, check_orthogonality,
                      check_vonneumann, h2_symmetric_operator, random_operator)
from .approx import (CSV_HEADER, check_metric, check_polar,
                     check_yosida_identities, semigroup_experiment,
                     yosida_general)
from .basis import check_basis, markushevich
from .report import jsonable
from .rigging import (BanachNorm, Rigging, RiggingError, check_embedding,
                      identity_rigging, random_diagonal_rigging, wiener_rigging)

COMMANDS = ("verify", "yosida", "metric", "basis", "h2bound")
FAMILIES = ("identity", "random-diagonal", "wiener-like", "explicit")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


def _parse_p(p):
    if isinstance(p, str) and p.lower() in ("inf", "infinity"):
        return math.inf
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ConfigError(f"bad exponent {p!r}") from None
    if not p >= 1:
        raise ConfigError(f"exponent must be >= 1, got {p}")
    return p


@dataclass
class ExperimentConfig:
    command: str
    dims: list = field(default_factory=lambda: [4])
    p_values: list = field(default_factory=lambda: [2.0])
    ensemble: int = 1
    seed: int = 0
    rigging_family: str = "identity"
    lambdas: list = field(default_factory=lambda: [2.0 ** k for k in range(1, 11)])
    ts: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    output: dict = field(default_factory=lambda: {"path": None, "format": "json"})
    rigging: dict | None = None
    operator: list | None = None
    n_x: int = 100
    jobs: int = 1

    @classmethod
    def from_dict(cls, d, command=None):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        if command is not None:
            if d.get("command", command) != command:
                raise ConfigError(f"config command {d['command']!r} does not "
                                  f"match {command!r}")
            d["command"] = command
        if "p" in d and "p_values" not in d:
            d["p_values"] = d.pop("p")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in d:
            raise ConfigError("missing command")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.rigging_family not in FAMILIES:
            raise ConfigError(f"unknown rigging family {self.rigging_family!r}")
        if not isinstance(self.ensemble, int) or self.ensemble < 1:
            raise ConfigError("ensemble must be a positive integer")
        if not self.dims or not all(isinstance(n, int) and n >= 1 for n in self.dims):
            raise ConfigError("dims must be a nonempty list of positive integers")
        if not self.p_values:
            raise ConfigError("p_values must be nonempty")
        self.p_values = [_parse_p(p) for p in self.p_values]
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not isinstance(self.n_x, int) or self.n_x < 1:
            raise ConfigError("n_x must be a positive integer")
        if self.command == "yosida":
            if not self.lambdas or not self.ts:
                raise ConfigError("yosida needs nonempty lambdas and ts")
            lam = [float(v) for v in self.lambdas]
            if any(v <= 0 for v in lam) or any(b <= a for a, b in zip(lam, lam[1:])):
                raise ConfigError("lambdas must be positive and increasing")
            if any(float(t) < 0 for t in self.ts):
                raise ConfigError("ts must be nonnegative")
        if self.rigging_family == "explicit":
            if self.rigging is None:
                raise ConfigError("explicit family needs a 'rigging' object")
            try:
                r = Rigging.from_dict(self.rigging)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad rigging: {exc}") from None
            if self.dims != [r.n]:
                raise ConfigError(f"dims must be [{r.n}] for the explicit rigging")
        if self.rigging_family == "wiener-like" and self.p_values != [math.inf]:
            raise ConfigError("wiener-like uses the sup norm; set p_values to ['inf']")
        if self.operator is not None:
            M = np.asarray(self.operator, dtype=float)
            if M.ndim != 2 or any(M.shape != (n, n) for n in self.dims):
                raise ConfigError("operator shape must match every entry of dims")
        if self.output.get("format", "json") not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs must be a positive integer")

    def to_dict(self):
        return jsonable(asdict(self))

    def cases(self):
        idx = 0
        for n in self.dims:
            for p in self.p_values:
                for _ in range(self.ensemble):
                    yield idx, n, p
                    idx += 1


def _build_rigging(cfg, n, p, rng):
    fam = cfg.rigging_family
    if fam == "identity":
        return identity_rigging(n, p)
    if fam == "random-diagonal":
        return random_diagonal_rigging(n, BanachNorm.lp(p), rng)
    if fam == "wiener-like":
        return wiener_rigging(n)
    return Rigging.from_dict(cfg.rigging)


def _operator(cfg, r, rng):
    if cfg.operator is not None:
        return Operator(r, cfg.operator)
    return random_operator(r, rng)


def _unit_vectors(r, rng, k=4):
    X = rng.standard_normal((r.n, k))
    X = X / r.b_norm(X)
    return list(X.T)


def run_case(cfg, idx, n, p):
    """Run one ensemble member; everything is derived from its own seed."""
    seed = case_seed(cfg.seed, idx)
    rng = make_rng(seed)
    r = _build_rigging(cfg, n, p, rng)
    case = {"case": idx, "n": n, "p": p, "seed": seed}
    reports = []
    cmd = cfg.command
    if cmd == "verify":
        A = _operator(cfg, r, rng)
        reports.append(check_embedding(r, cfg.n_x, seed))
        reports.append(check_vonneumann(A, cfg.n_x, seed))
        reports.append(check_lax(h2_symmetric_operator(r, rng)))
        reports.append(check_orthogonality(r, 20, seed))
    elif cmd == "yosida":
        A = _operator(cfg, r, rng)
        lams = [float(v) for v in cfg.lambdas]
        table = semigroup_experiment(A, lams, cfg.ts, _unit_vectors(r, rng))
        reports.append(table.report)
        reports.append(check_polar(A, cfg.n_x, seed))
        reports.append(check_yosida_identities(A, lams))
        case["table"] = [list(row) for row in table.rows]
        case["approximators"] = [{"lambda": lam, "matrix": yosida_general(A, lam).M}
                                 for lam in lams]
    elif cmd == "metric":
        reports.append(check_metric(r, min(cfg.n_x, 50), seed))
    elif cmd == "basis":
        b = markushevich(r)
        reports.append(check_basis(b, 200, seed))
        case["basis"] = {"vectors": b.vectors.T, "functionals": b.functionals}
    elif cmd == "h2bound":
        reports.append(check_h2_bound(_operator(cfg, r, rng)))
    case["rigging"] = r.to_dict()
    case["reports"] = [rep.to_dict() for rep in reports]
    case["passed"] = all(rep.passed for rep in reports)
    return jsonable(case)


def _run_case_star(args):
    return run_case(*args)


def _aggregate(cases):
    n_assert = n_fail = 0
    max_defect = {}
    measured = {}
    failures = []
    for case in cases:
        for rep in case["reports"]:
            for a in rep["asserted"]:
                key = f"{rep['name']}.{a['prop']}"
                n_assert += 1
                d = a["defect"]
                d = float(d) if not isinstance(d, str) else float("inf")
                max_defect[key] = max(max_defect.get(key, -math.inf), d)
                if not a["pass"]:
                    n_fail += 1
                    failures.append({"case": case["case"], "report": rep["name"],
                                     "prop": a["prop"], "defect": a["defect"],
                                     "witness": a["witness"]})
            for m in rep["measured"]:
                key = f"{rep['name']}.{m['quantity']}"
                measured.setdefault(key, []).append(float(m["value"]))
    quant = {}
    for key, vals in measured.items():
        v = np.asarray(vals)
        quant[key] = {"min": v.min(), "q50": np.quantile(v, 0.5),
                      "q90": np.quantile(v, 0.9), "max": v.max()}
    return jsonable({
        "n_cases": len(cases),
        "n_asserted": n_assert,
        "n_failed": n_fail,
        "pass_rate": (n_assert - n_fail) / n_assert if n_assert else 1.0,
        "cases_passed": sum(1 for c in cases if c["passed"]),
        "max_defect": max_defect,
        "measured": quant,
        "failures": failures,
    })


def run(config):
    """Run every case of `config` and return the report bundle (a dict)."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    start = time.perf_counter()
    work = [(config, idx, n, p) for idx, n, p in config.cases()]
    if config.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            cases = list(pool.map(_run_case_star, work))
    else:
        cases = [run_case(*w) for w in work]
    return {
        "config": config.to_dict(),
        "cases": cases,
        "aggregate": _aggregate(cases),
        "wall_clock_s": time.perf_counter() - start,
    }


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, float)):
        return format(float(v), ".17g")
    return str(v)


def bundle_to_csv(bundle):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    if bundle["config"]["command"] == "yosida":
        w.writerow(CSV_HEADER)
        for case in bundle["cases"]:
            for row in case["table"]:
                w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    w.writerow(["case", "n", "p", "report", "kind", "name", "pass", "value"])
    for case in bundle["cases"]:
        head = [case["case"], case["n"], _fmt(case["p"])]
        for rep in case["reports"]:
            for a in rep["asserted"]:
                w.writerow(head + [rep["name"], "asserted", a["prop"],
                                   _fmt(a["pass"]), _fmt(a["defect"])])
            for m in rep["measured"]:
                w.writerow(head + [rep["name"], "measured", m["quantity"], "",
                                   _fmt(m["value"])])
    return buf.getvalue()


def bundle_to_json(bundle):
    return json.dumps(jsonable(bundle), indent=1) + "\n"


def emit(bundle, fmt="json", path=None):
    """Write `bundle` as JSON or CSV to `path` (stdout when None)."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    text = bundle_to_json(bundle) if fmt == "json" else bundle_to_csv(bundle)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def exit_code(bundle):
    return 0 if bundle["aggregate"]["n_failed"] == 0 else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="banach-adjoint", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="experiment config (JSON)")
    ap.add_argument("--seed", type=int, help="override the master seed")
    ap.add_argument("--out", help="output file (default: config output.path or stdout)")
    ap.add_argument("--format", choices=FORMATS, help="output format")
    ap.add_argument("--jobs", type=int, help="worker processes")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.jobs is not None:
            raw["jobs"] = args.jobs
        cfg = ExperimentConfig.from_dict(raw, command=args.command)
    except (OSError, json.JSONDecodeError, ConfigError, RiggingError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    out = cfg.output or {}
    fmt = args.format or out.get("format", "json")
    path = args.out or out.get("path")
    bundle = run(cfg)
    emit(bundle, fmt, path)
    agg = bundle["aggregate"]
    print(f"{cfg.command}: {agg['n_cases']} cases, {agg['n_asserted']} assertions, "
          f"{agg['n_failed']} failed", file=sys.stderr)
    return exit_code(bundle)


if __name__ == "__main__":
    sys.exit(main())
