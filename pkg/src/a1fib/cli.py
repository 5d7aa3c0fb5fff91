"""Command line front end.

    a1fib [--field rational|radical] [--truncation N] [--format json|dot]
          [--out PATH] COMMAND INPUT

INPUT is a path, ``-`` for standard input, or inline JSON.  Exit codes:
0 ok, 2 invalid input, 3 computation error, 4 a radical extension is needed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Callable

import jsonschema

from . import __version__
from .amalgam import cyclic_amalgam, tree_from_json, word_from_json, word_to_json
from .dpd import DpdPresentation, classify_ml, danilov_gizatullin, is_toric, special_gizatullin
from .errors import ExtensionRequired, ToolkitError
from .fiber_tower import (
    BlowupSpec,
    build_tower,
    classify_star_components,
    extended_divisor,
    is_linear,
    is_rooted_chain,
)
from .formal_series import format_scalar, field_for, parse_scalar
from .puiseux import pui_of_center, pui_of_point
from .stabilizer import VERSION, aut_report, fiber_stabilizer
from .weighted_graphs import WeightedTree, ml_class, revert_with_log, standardize

EXIT_SCHEMA, EXIT_COMPUTE, EXIT_EXTENSION = 2, 3, 4

# -- schemas ----------------------------------------------------------------

SCALAR = {"type": ["string", "integer"]}
CHAIN = {"type": "array", "items": {"type": "integer"}, "minItems": 1}
ZIGZAGS = {"oneOf": [CHAIN, {"type": "array", "items": CHAIN, "minItems": 1}]}
BLOWUPS = {
    "type": "object",
    "properties": {
        "base_point": SCALAR,
        "blowups": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"on": {"type": "integer", "minimum": 0}, "at": SCALAR},
                "required": ["on", "at"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["blowups"],
}
POINT = {
    "type": "object",
    "properties": {"on": {"type": "integer", "minimum": 0}, "at": SCALAR},
    "required": ["on", "at"],
}
DIVISOR = {"type": "array", "items": {"type": "array", "items": SCALAR, "minItems": 2, "maxItems": 2}}
GRAPH = {
    "type": "object",
    "properties": {
        "vertices": {"type": "array", "items": {"type": "object", "required": ["id", "weight"]}},
        "edges": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
    },
    "required": ["vertices", "edges"],
}

INPUT_SCHEMAS: dict[str, dict] = {
    "zigzag-standardize": ZIGZAGS,
    "zigzag-revert": ZIGZAGS,
    "zigzag-ml": {"oneOf": [CHAIN, {"type": "array", "items": CHAIN, "minItems": 1}, GRAPH]},
    "fiber-build": BLOWUPS,
    "fiber-graph": {**BLOWUPS, "properties": {**BLOWUPS["properties"], "boundary": CHAIN}},
    "puiseux-point": {**BLOWUPS, "properties": {**BLOWUPS["properties"], "point": POINT}},
    "stab-fiber": BLOWUPS,
    "aut-report": {
        "oneOf": [
            BLOWUPS,
            {
                "type": "object",
                "properties": {"base": {"type": "string"}, "fibers": {"type": "array", "items": BLOWUPS, "minItems": 1}},
                "required": ["fibers"],
            },
        ]
    },
    "dpd-classify": {
        "oneOf": [
            {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["elliptic", "parabolic", "hyperbolic"]},
                    "curve": {"enum": ["P1", "A1", "rational", "nonrational"]},
                    "D": DIVISOR,
                    "Dplus": DIVISOR,
                    "Dminus": DIVISOR,
                },
                "required": ["kind"],
            },
            {
                "type": "object",
                "properties": {
                    "family": {"enum": ["danilov_gizatullin", "special_gizatullin"]},
                    "d": {"type": "integer"},
                    "r": {"type": "integer"},
                    "points": {"type": "array", "items": SCALAR},
                },
                "required": ["family", "d", "r"],
            },
        ]
    },
    "amalgam-nf": {
        "type": "object",
        "properties": {
            "cyclic": {
                "type": "object",
                "properties": {k: {"type": "integer", "minimum": 1} for k in "mnk"},
                "required": ["m", "n", "k"],
            },
            "groups": {"type": "object"},
            "edges": {"type": "array"},
            "base": {"type": "string"},
            "words": {"type": "array", "items": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}},
        },
        "required": ["words"],
        "oneOf": [{"required": ["cyclic"]}, {"required": ["groups", "edges"]}],
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"type": "string"},
        "command": {"enum": sorted(INPUT_SCHEMAS)},
        "result": {},
    },
    "required": ["version", "command", "result"],
}

AUT_RESULT_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"type": "string"},
        "fibers": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "N": {"type": "integer", "minimum": 0},
                    "h": {"type": "array", "items": {"type": "string"}},
                    "torus": {
                        "type": "object",
                        "properties": {
                            "rank": {"enum": [0, 1, 2]},
                            "torsion": {"type": "integer", "minimum": 1},
                            "relations": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                        },
                        "required": ["rank", "torsion", "relations"],
                    },
                },
                "required": ["N", "h", "torus"],
            },
        },
        "D0": {"type": "array"},
        "U_mu_generator": {"type": "array", "items": {"type": "string"}},
        "Upsilon": {"type": "object", "required": ["rank", "torsion"]},
        "flags": {"type": "object", "required": ["parabolic"]},
    },
    "required": ["version", "fibers", "D0", "U_mu_generator", "Upsilon", "flags"],
}

RESULT_SCHEMAS = {"aut-report": AUT_RESULT_SCHEMA}


# -- commands ---------------------------------------------------------------


def _chains(data) -> tuple[list[list[int]], bool]:
    if data and isinstance(data[0], list):
        return data, True
    return [data], False


def _shape(out: list, batch: bool):
    return out if batch else out[0]


def cmd_zigzag_standardize(data, opts):
    chains, batch = _chains(data)
    results = [standardize(c) for c in chains]
    return {
        "result": _shape([list(z.weights) for z, _ in results], batch),
        "standard": _shape([z.standard for z, _ in results], batch),
        "reversed_form": _shape([list(z.reversed_form) if z.reversed_form else None for z, _ in results], batch),
        "moves": _shape([[m.to_json() for m in log] for _, log in results], batch),
    }, None


def cmd_zigzag_revert(data, opts):
    chains, batch = _chains(data)
    results = [revert_with_log(c) for c in chains]
    return {
        "result": _shape([list(z.weights) for z, _ in results], batch),
        "moves": _shape([[m.to_json() for m in log] for _, log in results], batch),
    }, None


def cmd_zigzag_ml(data, opts):
    if isinstance(data, dict):
        return {"result": ml_class(WeightedTree.from_json(data), minimal=False)}, None
    chains, batch = _chains(data)
    return {"result": _shape([ml_class(c, minimal=False) for c in chains], batch)}, None


def _model(data, opts):
    return build_tower(BlowupSpec.from_json(data, opts.field), opts.field)


def cmd_fiber_build(data, opts):
    m = _model(data, opts)
    out = m.to_json()
    out.update(
        weights=list(m.weights),
        multiplicities=list(m.multiplicities),
        fiber_square=m.fiber_square(),
        rooted_chain=is_rooted_chain(m),
        linear=is_linear(m),
    )
    return {"result": out}, m.to_dot()


def cmd_fiber_graph(data, opts):
    m = _model(data, opts)
    if "boundary" not in data:
        return {"result": m.tree().to_json()}, m.to_dot()
    ext = extended_divisor(m, data["boundary"])
    out = ext.to_json()
    out["spine_weights"] = ext.spine_weights()
    out["components"] = classify_star_components(ext)
    return {"result": out}, ext.tree.to_dot(m.multiplicity_map())


def cmd_puiseux_point(data, opts):
    m = _model(data, opts)
    if "point" in data:
        p = data["point"]
        at = parse_scalar(p["at"], opts.field, allow_inf=True)
        spaces = [pui_of_point(m, p["on"], at, truncation=opts.truncation)]
    else:
        spaces = [pui_of_center(m, c.id, opts.truncation) for c in m.components if c.kind == "outer"]
    return {"result": [w.to_json() for w in spaces]}, None


def cmd_stab_fiber(data, opts):
    desc = fiber_stabilizer(_model(data, opts), opts.truncation)
    return {"result": desc.to_json()}, None


def cmd_aut_report(data, opts):
    specs = data["fibers"] if "fibers" in data else [data]
    models = [_model(s, opts) for s in specs]
    rep = aut_report(models, data.get("base", "A1"), opts.truncation)
    return {"result": rep.to_json()}, None


def cmd_dpd_classify(data, opts):
    if "family" in data:
        if data["family"] == "danilov_gizatullin":
            p = danilov_gizatullin(data["d"], data["r"])
        else:
            p = special_gizatullin(data["d"], data["r"], data.get("points", []))
    else:
        p = DpdPresentation.from_json(data, opts.field)
    out = {"presentation": p.to_json(), "ml": classify_ml(p)}
    out["toric"] = is_toric(p) if p.kind == "hyperbolic" else None
    return {"result": out}, None


def cmd_amalgam_nf(data, opts):
    if "cyclic" in data:
        c = data["cyclic"]
        tree = cyclic_amalgam(c["m"], c["n"], c["k"])
    else:
        tree = tree_from_json(data)
    forms = [tree.normal_form(word_from_json(w)) for w in data["words"]]
    product = tree.multiply(*forms)
    return {
        "result": [word_to_json(f) for f in forms],
        "lengths": [len(f) for f in forms],
        "product": word_to_json(product),
    }, None


COMMANDS: dict[str, Callable] = {
    "zigzag-standardize": cmd_zigzag_standardize,
    "zigzag-revert": cmd_zigzag_revert,
    "zigzag-ml": cmd_zigzag_ml,
    "fiber-build": cmd_fiber_build,
    "fiber-graph": cmd_fiber_graph,
    "puiseux-point": cmd_puiseux_point,
    "stab-fiber": cmd_stab_fiber,
    "aut-report": cmd_aut_report,
    "dpd-classify": cmd_dpd_classify,
    "amalgam-nf": cmd_amalgam_nf,
}


# -- driver -----------------------------------------------------------------


class InputError(Exception):
    pass


def _load(arg: str):
    if arg == "-":
        text = sys.stdin.read()
    elif os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not JSON and not a file: {exc}") from exc


def _default(obj):
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="a1fib", description="Invariants of A1-fibrations given by blowup towers.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", nargs="?", help="JSON file, '-' for stdin, or inline JSON")
    ap.add_argument("--field", choices=["rational", "radical"], default="rational")
    ap.add_argument("--truncation", type=int, default=None)
    ap.add_argument("--format", choices=["json", "dot"], default="json")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--print-schema", action="store_true", help="print the command's input schema and exit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def _fail(code: int, error: str, detail: Any) -> int:
    sys.stderr.write(dumps({"error": error, "detail": detail}))
    return code


def run(argv: list[str] | None = None) -> int:
    try:
        opts = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else 0
    if opts.print_schema:
        sys.stdout.write(dumps({"input": INPUT_SCHEMAS[opts.command], "report": REPORT_SCHEMA,
                                "result": RESULT_SCHEMAS.get(opts.command, {})}))
        return 0
    if opts.input is None:
        return _fail(EXIT_SCHEMA, "missing_input", opts.command)
    if opts.truncation is not None and opts.truncation < 1:
        return _fail(EXIT_SCHEMA, "bad_truncation", opts.truncation)
    try:
        data = _load(opts.input)
        jsonschema.validate(data, INPUT_SCHEMAS[opts.command])
    except InputError as exc:
        return _fail(EXIT_SCHEMA, "bad_json", str(exc))
    except jsonschema.ValidationError as exc:
        return _fail(EXIT_SCHEMA, "schema", exc.message)
    opts.field = field_for(opts.field)
    try:
        body, dot = COMMANDS[opts.command](data, opts)
    except ExtensionRequired as exc:
        return _fail(EXIT_EXTENSION, exc.code, exc.detail)
    except ToolkitError as exc:
        return _fail(EXIT_COMPUTE, exc.code, exc.detail)
    if opts.format == "dot":
        if dot is None:
            return _fail(EXIT_SCHEMA, "format_unsupported", f"{opts.command} has no DOT output")
        text = dot
    else:
        text = dumps({"version": VERSION, "command": opts.command, **body})
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
