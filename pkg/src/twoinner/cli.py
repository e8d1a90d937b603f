"""Command-line front end.

Subcommands ``verify``, ``bounds``, ``integral`` and ``sharpness`` each build
one JSON report ``{config, properties, verdict}``.  The report goes to
``--output`` (or stdout with ``--json``); a fixed-width table goes to stdout
otherwise.

Exit status: 0 when every checked property passes, 1 when one fails, 2 for
configuration, parse, instance or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .integral import (
    PROP_IDS,
    QuadratureGrid,
    WeightedTriple,
    premise_check,
    prop_bounds,
    two_inner_phi,
)
from .numeric import Field, InconsistencyError, InvalidInput, InvalidInstance, Tolerance
from .report import bound_entry, dumps, table
from .reverse import (
    INEQUALITY_IDS,
    SHARPNESS_CASES,
    PositivePair,
    ScalarPair,
    additive_reverse,
    condition_check,
    positive_reverse,
    probe_instance,
    quotient_reverse,
    triangle_reverse,
)
from .space import InnerSpace, TwoInnerEvaluator
from .sweeps import axiom_sweep, bound_sweep, identity_sweep

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
COMMANDS = ("verify", "bounds", "integral", "sharpness")
CSV_COLUMNS = ("node", "weight", "phi", "f", "g", "h")


class ConfigError(ValueError):
    pass


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    trials: int = 1000
    dims: tuple = (2, 3, 8)
    field: str = "both"
    tol: Tolerance = Tolerance()
    input_path: str | None = None
    output_path: str | None = None
    constant: float | None = None
    which: str | None = None
    m: float | None = None
    M: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.dims or any(d < 2 for d in self.dims):
            raise ConfigError(f"dims must all be >= 2, got {list(self.dims)}")
        if self.field not in ("real", "complex", "both"):
            raise ConfigError(f"field must be real, complex or both, got {self.field!r}")

    @property
    def fields(self) -> tuple[str, ...]:
        return ("real", "complex") if self.field == "both" else (self.field,)

    def as_dict(self) -> dict:
        d = {"command": self.command, "seed": self.seed, "trials": self.trials,
             "dims": list(self.dims), "field": self.field,
             "tol": {"abs": self.tol.abs, "rel": self.tol.rel}}
        for k in ("input_path", "constant", "which", "m", "M"):
            if getattr(self, k) is not None:
                d[k] = getattr(self, k)
        return d


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoinner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--dims", type=_dims, default=(2, 3, 8))
    common.add_argument("--field", default="both")
    common.add_argument("--tol-abs", type=float, default=1e-12)
    common.add_argument("--tol-rel", type=float, default=1e-9)
    common.add_argument("--input")
    common.add_argument("--output", help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    common.add_argument("--which", help="restrict to one inequality id or sharpness case")
    helps = {
        "verify": "run the axiom, identity and bound sweeps",
        "bounds": "evaluate reverse bounds on a JSON instance",
        "integral": "determinantal checks on a CSV sample table",
        "sharpness": "probe a candidate constant on the extremal instance",
    }
    subs = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    subs["sharpness"].add_argument("--constant", type=float, required=True)
    subs["integral"].add_argument("--m", type=float, required=True)
    subs["integral"].add_argument("--M", type=float, required=True)
    return parser


def config_from_args(args) -> RunConfig:
    try:
        tol = Tolerance(args.tol_abs, args.tol_rel)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(args.command, args.seed, args.trials, tuple(args.dims), args.field, tol,
                     args.input, args.output, getattr(args, "constant", None), args.which,
                     getattr(args, "m", None), getattr(args, "M", None))


def _verdict(properties) -> str:
    return "pass" if all(p["passed"] for p in properties) else "fail"


def _document(config: RunConfig, properties: list[dict], **extra) -> dict:
    doc = {"config": config.as_dict(), **extra, "properties": properties,
           "verdict": _verdict(properties)}
    return doc


# verify

def run_verify(config: RunConfig, evaluator=TwoInnerEvaluator) -> dict:
    tol = config.tol
    props = []
    axioms = axiom_sweep(config.seed, config.trials, config.dims, config.fields, tol, evaluator)
    for c in axioms.checks.values():
        props.append({"id": f"axiom:{c.name}", "residual": c.max_residual, "ratio": c.max_ratio,
                      "count": c.count, "passed": c.passed})
    identities = identity_sweep(config.seed, config.trials, config.dims, config.fields, tol, evaluator)
    for c in identities.values():
        props.append({"id": f"identity:{c.name}", "residual": c.max_residual, "ratio": c.max_ratio,
                      "count": c.count, "passed": c.passed})
    tallies = bound_sweep(config.seed, config.trials, config.dims, config.fields, tol,
                          evaluator=evaluator)
    for t in tallies.values():
        props.append({"id": f"bound:{t.inequality_id}", "evaluated": t.evaluated,
                      "accepted": t.accepted, "violations": t.violations,
                      "min_slack_ratio": t.min_ratio, "passed": t.passed})
    return _document(config, props)


# bounds

def _number(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or an [re, im] pair")


def _vector(data: dict, key: str, field: Field) -> np.ndarray:
    value = data.get(key)
    if not isinstance(value, list) or not value:
        raise ParseError(f"field {key!r}: expected a non-empty list")
    arr = np.array([_number(v, f"field {key!r}[{i}]") for i, v in enumerate(value)])
    if field is Field.REAL:
        if np.any(arr.imag != 0):
            raise ParseError(f"field {key!r}: complex entry in a real instance")
        arr = arr.real
    return arr


def load_instance(path: str) -> dict:
    """Parse an instance file into ``{field, weights, x, y, z, pair}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    try:
        field = Field.parse(data.get("field", "real"))
    except InvalidInput as exc:
        raise ParseError(f"field 'field': {exc}") from None
    vecs = {k: _vector(data, k, field) for k in ("x", "y", "z")}
    dims = {v.shape[0] for v in vecs.values()}
    if len(dims) != 1:
        raise ParseError("fields 'x', 'y', 'z' must have equal length")
    weights = None
    if "weights" in data and data["weights"] is not None:
        weights = _vector(data, "weights", Field.REAL)
        if weights.shape[0] != dims.pop():
            raise ParseError("field 'weights': length differs from the vectors")
    has_aA = "a" in data or "A" in data
    has_mM = "m" in data or "M" in data
    if has_aA == has_mM:
        raise ParseError("instance needs exactly one of the pairs (a, A) or (m, M)")
    keys = ("a", "A") if has_aA else ("m", "M")
    for k in keys:
        if k not in data:
            raise ParseError(f"field {k!r}: missing")
    lo, hi = (_number(data[k], f"field {k!r}") for k in keys)
    try:
        if has_aA:
            pair = ScalarPair(lo, hi)
            pair.check_field(field)
        else:
            if lo.imag or hi.imag:
                raise ParseError("fields 'm', 'M': must be real")
            pair = PositivePair(lo.real, hi.real)
    except InvalidInput as exc:
        raise ParseError(f"fields {keys}: {exc}") from None
    return {"field": field, "weights": weights, **vecs, "pair": pair}


def run_bounds(config: RunConfig, evaluator=TwoInnerEvaluator) -> dict:
    if config.input_path is None:
        raise ConfigError("bounds needs --input")
    inst = load_instance(config.input_path)
    tol = config.tol
    field = inst["field"]
    try:
        space = InnerSpace(inst["x"].shape[0], field, inst["weights"])
    except InvalidInput as exc:
        raise ParseError(f"field 'weights': {exc}") from None
    ev = evaluator(space, tol)
    x, y, z, pair = inst["x"], inst["y"], inst["z"], inst["pair"]
    sp = pair.as_scalar_pair() if isinstance(pair, PositivePair) else pair
    cond = condition_check(ev, x, y, z, sp, tol)
    reports = [additive_reverse(ev, x, y, z, sp, tol)]
    positive = isinstance(pair, PositivePair)
    if positive or (np.conj(sp.a) * sp.A).real > 0:
        reports += list(quotient_reverse(ev, x, y, z, sp, tol))
    if positive:
        reports += list(positive_reverse(ev, x, y, z, pair, tol))
        reports.append(triangle_reverse(ev, x, y, z, pair, tol))
    if config.which is not None:
        if config.which not in INEQUALITY_IDS:
            raise ConfigError(f"--which must be one of {INEQUALITY_IDS}")
        reports = [r for r in reports if r.inequality_id == config.which]
    order = {k: i for i, k in enumerate(INEQUALITY_IDS)}
    reports.sort(key=lambda r: order[r.inequality_id])
    condition = {"re_form": cond.re_form, "ball_form": cond.ball_form,
                 "equivalence_residual": cond.equivalence_residual, "holds": cond.holds}
    return _document(config, [bound_entry(r, tol) for r in reports], condition=condition)


# integral

def load_samples(path: str) -> tuple[QuadratureGrid, WeightedTriple]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty CSV")
    header = [c.strip() for c in rows[0]]
    if sorted(header) != sorted(CSV_COLUMNS):
        raise ParseError(f"{path}: header must name the columns {','.join(CSV_COLUMNS)}")
    body = rows[1:]
    if len(body) < 2:
        raise ParseError(f"{path}: need at least 2 data rows")
    cols = {k: [] for k in header}
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: line {lineno} has {len(row)} fields, expected {len(header)}")
        for k, cell in zip(header, row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: line {lineno}, column {k!r}: not a number") from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: line {lineno}, column {k!r}: not finite")
            cols[k].append(v)
    try:
        grid = QuadratureGrid(np.array(cols["node"]), np.array(cols["weight"]))
        triple = WeightedTriple(*(np.array(cols[k]) for k in ("f", "g", "h", "phi")))
    except InvalidInput as exc:
        raise ParseError(f"{path}: {exc}") from None
    return grid, triple


def run_integral(config: RunConfig) -> dict:
    if config.input_path is None:
        raise ConfigError("integral needs --input")
    try:
        pair = PositivePair(config.m, config.M)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from None
    grid, triple = load_samples(config.input_path)
    tol = config.tol
    det = two_inner_phi(triple, grid, tol)
    premise = premise_check(triple, pair, grid, tol)
    ids = PROP_IDS
    if config.which is not None:
        if config.which not in PROP_IDS:
            raise ConfigError(f"--which must be one of {PROP_IDS}")
        ids = (config.which,)
    props = [{"id": "determinant", "lhs": det.two_inner_double, "rhs": det.two_inner_det,
              "residual": det.cross_residual, "passed": det.residual_ok}]
    for which in ids:
        rep = prop_bounds(triple, pair, grid, which, tol, premise)
        entry = bound_entry(rep, tol)
        alt_rhs, alt_holds = entry.pop("alt_rhs", None), entry.pop("alt_holds", None)
        props.append(entry)
        if alt_rhs is not None:
            # the alternative constant is reported, not enforced
            props.append({"id": f"{which}:alt", "lhs": rep.lhs, "rhs": alt_rhs,
                          "slack": alt_rhs - rep.lhs, "hypothesis_ok": rep.hypothesis_ok,
                          "holds": alt_holds, "informational": True, "passed": True})
    sync = premise.synchronous
    premise_doc = {"synchronous": sync.synchronous,
                   "worst_pair": list(sync.worst_pair) if sync.worst_pair else None,
                   "worst_value": sync.worst_value, "band": sync.band,
                   "sign_value": premise.sign_value, "sign_ok": premise.sign_ok}
    determinant = {"moments": det.moments, "two_inner_double": det.two_inner_double,
                   "two_inner_det": det.two_inner_det, "cross_residual": det.cross_residual,
                   "scale": det.scale}
    return _document(config, props, determinant=determinant, premise=premise_doc)


# sharpness

def run_sharpness(config: RunConfig, evaluator=TwoInnerEvaluator) -> dict:
    cases = SHARPNESS_CASES if config.which is None else (config.which,)
    if any(c not in SHARPNESS_CASES for c in cases):
        raise ConfigError(f"--which must be one of {SHARPNESS_CASES}")
    try:
        C = float(config.constant)
        if not (C > 0 and math.isfinite(C)):
            raise InvalidInput
    except (TypeError, InvalidInput):
        raise ConfigError("--constant must be positive and finite") from None
    ev = evaluator(InnerSpace.unit(3), config.tol)
    props = []
    for case in cases:
        w = probe_instance(ev, C, case, config.tol)
        band = config.tol.bound(max(abs(w.lhs), abs(w.rhs)))
        witness = w.lhs > w.rhs + band
        props.append({"id": case, "constant": C, "lhs": w.lhs, "rhs": w.rhs,
                      "slack": w.rhs - w.lhs, "hypothesis_ok": True, "witness": witness,
                      "tight": abs(w.rhs - w.lhs) <= band, "passed": not witness})
    return _document(config, props)


COLUMNS = {
    "verify": ["id", "residual", "ratio", "count", "evaluated", "accepted", "violations", "passed"],
    "bounds": ["id", "lhs", "rhs", "slack", "hypothesis_ok", "tight", "residual", "passed"],
    "integral": ["id", "lhs", "rhs", "slack", "hypothesis_ok", "residual", "passed"],
    "sharpness": ["id", "constant", "lhs", "rhs", "slack", "witness", "passed"],
}


def render_table(doc: dict) -> str:
    cmd = doc["config"]["command"]
    rows = []
    for p in doc["properties"]:
        row = dict(p)
        if p.get("informational"):
            row["passed"] = "holds" if p["holds"] else "VIOLATED"
        elif cmd == "bounds" and p.get("tight"):
            row["tight"] = "tight"
        rows.append(row)
    lines = [table(rows, COLUMNS[cmd])]
    if "condition" in doc:
        c = doc["condition"]
        lines.insert(0, f"hypothesis holds: {'yes' if c['holds'] else 'no'} "
                        f"(re_form = {c['re_form']:.6g})")
    if "premise" in doc:
        p = doc["premise"]
        lines.insert(0, f"premise synchronous: {'yes' if p['synchronous'] else 'no'} "
                        f"(sign value = {p['sign_value']:.6g})")
    lines.append(f"verdict: {doc['verdict']}")
    return "\n".join(lines)


def run(config: RunConfig, evaluator=TwoInnerEvaluator) -> dict:
    if config.command == "verify":
        return run_verify(config, evaluator)
    if config.command == "bounds":
        return run_bounds(config, evaluator)
    if config.command == "integral":
        return run_integral(config)
    return run_sharpness(config, evaluator)


def main(argv=None, evaluator=TwoInnerEvaluator) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        config = config_from_args(args)
        doc = run(config, evaluator)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InvalidInstance as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = dumps(doc) + "\n"
    if config.output_path is not None:
        try:
            with open(config.output_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"io error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    print(text if args.json else render_table(doc), end="" if args.json else "\n")
    failed = [p["id"] for p in doc["properties"] if not p["passed"]]
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
