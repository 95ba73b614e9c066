"""Command line interface over every verification pipeline.

Each subcommand prints one JSON report on stdout (sorted keys, so
output is byte-identical between runs except for the wall-time field)
and a one-line summary on stderr.  Exit status: 0 when every requested
check passes, 1 when a check fails, 2 on usage or precondition errors.
Exact rationals are rendered "num/den"; float-based geometric checks
carry an explicit tolerance field.  Checks always run sequentially in a
fixed order; --threads is accepted for interface stability.
"""

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from math import comb

from . import __version__
from .ainfty import (
    FiniteAInftyAlgebra,
    Inconsistent,
    check_stasheff,
    exterior_normalize,
    from_minimal_model,
    FiniteAbelianGroupData,
    hkr_dim,
    opposite,
    smash,
    supercommutativity_check,
)
from .lattice import LatticeClass, elements, from_elements, size
from .linalg import homology_ranks
from .minimal import (
    CohomologyBasisChoice,
    build_minimal_model,
    cohomology_dim,
    obstruction_class,
    permutation_table,
)
from .pants import (
    PearlLabel,
    PearlTreeLabeling,
    coamoeba_classify,
    gradient_f,
    morse_data,
    pearl_degree,
    validate_pearl_labels,
    zonotope_complex,
)
from .rnc import (
    cleared_polys,
    crossing_positivity,
    curve_eval,
    projectively_equal,
    solve_nodes,
)
from .weyl import MFConfig, OperatorElement, delta, differential, w_element

MODEL_SCHEMA = "koszulmf-model/1"


def _rat(x):
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def _subset(mask):
    return list(elements(mask))


def _parse_subset(token):
    token = token.strip()
    if token in ("-", ""):
        return 0
    return from_elements(int(p) for p in token.split(","))


def _parse_rationals(text):
    return tuple(Fraction(tok) for tok in text.split(","))


def _tables_payload(ops):
    tables = {}
    for k in sorted(ops):
        rows = [
            [_subset(out), [_subset(i) for i in ins], c.numerator, c.denominator]
            for (out, ins), c in ops[k].items()
            if c
        ]
        rows.sort()
        tables[str(k)] = rows
    return tables


def _model_payload(n, weights, aux, alg):
    gens = [
        {
            "subset": _subset(m),
            "zdeg": alg.zdeg[m],
            "qdeg": _rat(alg.qdeg[m]),
            "weight": list(alg.weight[m].rep),
        }
        for m in sorted(alg.basis)
    ]
    return {
        "schema": MODEL_SCHEMA,
        "n": n,
        "weights": [_rat(a) for a in weights],
        "aux": list(aux),
        "generators": gens,
        "tables": _tables_payload(alg.ops),
    }


def _load_model_file(path):
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc.get("results"), dict) and "model" in doc["results"]:
        doc = doc["results"]["model"]
    if doc.get("schema") != MODEL_SCHEMA:
        raise ValueError(f"{path}: not a {MODEL_SCHEMA} document")
    basis, zdeg, qdeg, wt = [], {}, {}, {}
    for g in doc["generators"]:
        m = from_elements(g["subset"])
        basis.append(m)
        zdeg[m] = int(g["zdeg"])
        qdeg[m] = Fraction(g["qdeg"])
        wt[m] = LatticeClass(g["weight"])
    ops = {}
    for key, rows in doc["tables"].items():
        table = {}
        for out, ins, num, den in rows:
            masks = tuple(from_elements(i) for i in ins)
            table[(from_elements(out), masks)] = Fraction(num, den)
        ops[int(key)] = table
    return doc, FiniteAInftyAlgebra(basis, zdeg, ops, wt, qdeg)


def _exterior_weight(mask, n2):
    return LatticeClass(tuple(-1 if mask >> i & 1 else 0 for i in range(n2)))


def _cmd_mf_check(args):
    cfg = MFConfig(args.n)
    n2 = cfg.nvars
    d = delta(cfg)
    delta_ok = d * d == w_element(cfg)

    rng = random.Random(20240825)
    d2_ok = True
    for _ in range(args.samples):
        par = rng.randrange(2)
        terms = {}
        for _ in range(rng.randint(1, 3)):
            while True:
                a = tuple(rng.randint(0, 2) for _ in range(n2))
                smask = rng.randrange(1 << n2)
                tmask = rng.randrange(1 << n2)
                if (size(smask) + size(tmask)) % 2 == par:
                    break
            terms[(a, smask, tmask)] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        x = OperatorElement(cfg, terms)
        if not differential(differential(x, cfg), cfg).is_zero():
            d2_ok = False

    pieces = []
    by_size = [0] * (n2 + 1)
    all_one = True
    for mask in range(1 << n2):
        w = _exterior_weight(mask, n2)
        q = Fraction(cfg.n * size(mask), n2)
        dim = cohomology_dim(w, q, cfg)
        pieces.append([_subset(mask), dim])
        by_size[size(mask)] += dim
        all_one = all_one and dim == 1
    expected = [comb(n2, r) for r in range(n2 + 1)]

    ok = delta_ok and d2_ok and all_one and by_size == expected
    return {
        "delta_squared_is_w": delta_ok,
        "differential_squared_zero": d2_ok,
        "samples": args.samples,
        "piece_dims": pieces,
        "dims_by_subset_size": by_size,
        "expected_by_subset_size": expected,
        "pass": ok,
    }, ok


def _cmd_minimal_model(args):
    weights = _parse_rationals(args.a_weights) if args.a_weights else None
    cfg = MFConfig(args.n, weights)
    choice = (
        CohomologyBasisChoice(tuple(int(s) for s in args.dbar_aux.split(",")))
        if args.dbar_aux
        else CohomologyBasisChoice.default(args.n)
    )
    n = args.n
    top = args.max_arity if args.max_arity is not None else n + 2
    if top < 2:
        raise ValueError("max arity must be at least 2")
    arities = [k for k in range(2, top + 1) if (k - 2) % n == 0]
    model = build_minimal_model(cfg, choice, arities=arities)
    alg = from_minimal_model(model)

    stasheff_to = 2 * n + 2
    violations = check_stasheff(alg, stasheff_to)
    graded = True
    try:
        alg.validate_graded()
    except ValueError as exc:
        graded = str(exc)
    supercomm = supercommutativity_check(alg)
    try:
        sigma = exterior_normalize(alg, n)
        normalization = {
            "sigma": [[_subset(m), c.numerator, c.denominator]
                      for m, c in sorted(sigma.items())]
        }
        normalized = True
    except (Inconsistent, ValueError) as exc:
        normalization = {"error": str(exc)}
        normalized = False

    obstruction = None
    unit = None
    perms = []
    if n + 2 in model.tables:
        value = obstruction_class(model)
        obstruction = _rat(value)
        unit = value in (1, -1)
        perms = sorted(
            [list(p), c.numerator, c.denominator]
            for p, c in permutation_table(model).items()
        )

    ok = (
        not violations
        and graded is True
        and supercomm
        and normalized
        and unit is not False
    )
    return {
        "model": _model_payload(n, cfg.a, choice.aux, alg),
        "checks": {
            "stasheff_max_arity": stasheff_to,
            "stasheff_violations": [
                [m, [_subset(x) for x in tup], _subset(out), _rat(total)]
                for m, tup, out, total in violations
            ],
            "graded": graded,
            "supercommutative": supercomm,
            "exterior_normalization": normalization,
            "obstruction_class": obstruction,
            "obstruction_is_unit": unit,
            "permutation_table": perms,
        },
        "pass": ok,
    }, ok


def _cmd_hkr(args):
    if args.n < 1:
        raise ValueError("need n >= 1")
    return {"dim": hkr_dim(args.n, args.r, args.t)}, True


def _cmd_zonotope(args):
    piece, cells = zonotope_complex(args.n)
    counts = [len(layer) for layer in cells]
    expected = [
        comb(args.n + 2, l) * (2 ** (args.n + 2 - l) - 2)
        for l in range(args.n + 1)
    ]
    euler = sum((-1) ** d * c for d, c in enumerate(counts))
    ranks = homology_ranks(piece)
    sphere = [1] + [0] * (args.n - 1) + [1]
    ok = (
        counts == expected
        and euler == 1 + (-1) ** args.n
        and ranks == sphere
    )
    return {
        "cell_counts": counts,
        "expected_counts": expected,
        "euler_characteristic": euler,
        "boundary_squares_to_zero": True,
        "homology_ranks": ranks,
        "sphere_ranks": sphere,
        "pass": ok,
    }, ok


def _cmd_coamoeba(args):
    theta = [float(tok) for tok in args.theta.split(",")]
    if not theta:
        raise ValueError("need at least one angle")
    label = coamoeba_classify(theta, tol=args.tolerance)
    return {
        "theta": theta,
        "classification": label,
        "tolerance": args.tolerance,
    }, True


def _cmd_morse(args):
    points = morse_data(args.n)
    n2 = args.n + 2
    histogram = [0] * (args.n + 1)
    rows = []
    norms_ok = True
    for pt in points:
        grad = gradient_f(list(pt.unit_coordinates()))
        norm = sum(g * g for g in grad) ** 0.5
        norms_ok = norms_ok and norm < args.tolerance
        histogram[pt.index] += 1
        rows.append(
            {
                "subset": _subset(pt.kmask),
                "coords": [_rat(c) for c in pt.coords],
                "index": pt.index,
                "gradient_norm": norm,
            }
        )
    expected = [comb(n2, args.n + 1 - m) for m in range(args.n + 1)]
    ok = len(points) == 2 ** n2 - 2 and histogram == expected and norms_ok
    return {
        "critical_points": rows,
        "count": len(points),
        "expected_count": 2 ** n2 - 2,
        "index_histogram": histogram,
        "expected_histogram": expected,
        "tolerance": args.tolerance,
        "pass": ok,
    }, ok


def _cmd_pearl_degree(args):
    k0 = _parse_subset(args.k0)
    inputs = [_parse_subset(tok) for tok in args.inputs]
    degree = pearl_degree(k0, inputs, args.n)
    return {
        "k0": _subset(k0),
        "inputs": [_subset(m) for m in inputs],
        "degree": _rat(degree),
        "integer": degree.denominator == 1,
    }, True


def _cmd_validate_labels(args):
    with open(args.file) as fh:
        doc = json.load(fh)
    n = doc["n"]
    pearls = tuple(
        PearlLabel(
            tuple(from_elements(s) for s in entry["flips"]),
            int(entry["degree"]),
        )
        for entry in doc["pearls"]
    )
    issues = validate_pearl_labels(PearlTreeLabeling(pearls), n)
    ok = not issues
    return {
        "pearls": len(pearls),
        "issues": [[idx, msg] for idx, msg in issues],
        "pass": ok,
    }, ok


def _cmd_rnc(args):
    target = _parse_rationals(args.pphi)
    curve = solve_nodes(args.n, target)
    n = args.n
    interpolation = all(
        projectively_equal(
            curve_eval(curve, nu),
            [Fraction(n + 1) if m == j else Fraction(-1) for m in range(n + 2)],
        )
        for j, nu in enumerate(curve.nodes)
    )
    anchor = projectively_equal(curve_eval(curve, 0), list(target))
    degrees = [len(p) - 1 for p in cleared_polys(curve)]
    reports = crossing_positivity(curve)
    crossings = []
    crossings_ok = True
    for rep in reports:
        positive = all(d > -args.tolerance for d in rep.derivatives)
        crossings_ok = crossings_ok and positive and not rep.flags
        crossings.append(
            {
                "component": rep.component + 1,
                "roots": rep.roots,
                "derivatives": rep.derivatives,
                "flags": rep.flags,
            }
        )
    ok = (
        interpolation
        and anchor
        and all(d == n for d in degrees)
        and crossings_ok
    )
    return {
        "nodes": [_rat(nu) for nu in curve.nodes],
        "target": [_rat(v) for v in target],
        "interpolates_coordinate_points": interpolation,
        "anchor_at_zero": anchor,
        "cleared_degrees": degrees,
        "crossings": crossings,
        "tolerance": args.tolerance,
        "pass": ok,
    }, ok


def _cmd_opposite(args):
    doc, alg = _load_model_file(args.model)
    op = opposite(alg)
    return {
        "model": {
            "schema": MODEL_SCHEMA,
            "n": doc["n"],
            "weights": doc["weights"],
            "aux": doc["aux"],
            "generators": doc["generators"],
            "tables": _tables_payload(op.ops),
        }
    }, True


def _parse_group(spec):
    if ":" in spec:
        fpart, rpart = spec.split(":", 1)
        rho = tuple(
            tuple(int(x) for x in row.split(","))
            for row in rpart.split(";")
            if row
        )
    else:
        fpart, rho = spec, ()
    factors = tuple(int(x) for x in fpart.split(","))
    return FiniteAbelianGroupData(factors, rho)


def _cmd_smash(args):
    doc, alg = _load_model_file(args.model)
    grp = _parse_group(args.group)
    sm = smash(alg, grp)

    def label(b):
        mask, chi = b
        return [_subset(mask), list(chi)]

    gens = sorted(
        (
            {
                "subset": _subset(mask),
                "char": list(chi),
                "zdeg": sm.zdeg[(mask, chi)],
            }
            for mask, chi in sm.basis
        ),
        key=lambda g: (g["subset"], g["char"]),
    )
    tables = {}
    for k in sorted(sm.ops):
        rows = [
            [label(out), [label(i) for i in ins], c.mag.numerator,
             c.mag.denominator, c.exp, c.order]
            for (out, ins), c in sm.ops[k].items()
            if c
        ]
        rows.sort()
        tables[str(k)] = rows
    return {
        "schema": "koszulmf-smash/1",
        "n": doc["n"],
        "group": {
            "factors": list(grp.factors),
            "rho": [list(r) for r in grp.rho],
        },
        "dimension": len(sm.basis),
        "generators": gens,
        "tables": tables,
    }, True


_HANDLERS = {
    "mf-check": _cmd_mf_check,
    "minimal-model": _cmd_minimal_model,
    "hkr": _cmd_hkr,
    "zonotope": _cmd_zonotope,
    "coamoeba": _cmd_coamoeba,
    "morse": _cmd_morse,
    "pearl-degree": _cmd_pearl_degree,
    "validate-labels": _cmd_validate_labels,
    "rnc": _cmd_rnc,
    "opposite": _cmd_opposite,
    "smash": _cmd_smash,
}


def _build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--threads",
        type=int,
        default=1,
        help="accepted for compatibility; checks run sequentially",
    )
    shared.add_argument(
        "--tolerance",
        type=float,
        default=1e-9,
        help="tolerance for float-based geometric checks",
    )

    parser = argparse.ArgumentParser(
        prog="koszulmf",
        description="exact checks for the product-of-variables factorization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mf-check", parents=[shared])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("minimal-model", parents=[shared])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-arity", type=int, default=None)
    p.add_argument("--a-weights", default=None,
                   help="comma separated rationals summing to 1")
    p.add_argument("--dbar-aux", default=None,
                   help="comma separated partner indices")

    p = sub.add_parser("hkr", parents=[shared])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)

    p = sub.add_parser("zonotope", parents=[shared])
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("coamoeba", parents=[shared])
    p.add_argument("--theta", required=True,
                   help="comma separated angles in radians")

    p = sub.add_parser("morse", parents=[shared])
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("pearl-degree", parents=[shared])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k0", required=True,
                   help='output subset, e.g. "1,3" or "-" for empty')
    p.add_argument("--inputs", nargs="+", required=True,
                   help='input subsets, e.g. 1,2 3 -')

    p = sub.add_parser("validate-labels", parents=[shared])
    p.add_argument("--file", required=True)

    p = sub.add_parser("rnc", parents=[shared])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pphi", required=True,
                   help="comma separated rationals summing to 0")

    p = sub.add_parser("opposite", parents=[shared])
    p.add_argument("--model", required=True)

    p = sub.add_parser("smash", parents=[shared])
    p.add_argument("--model", required=True)
    p.add_argument("--group", required=True,
                   help='factors:rho rows, e.g. "3,3:1,0;0,1;2,2"')

    return parser


def _echo_parameters(args):
    skip = {"command"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip
    }


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    start = time.perf_counter()
    params = _echo_parameters(args)
    try:
        results, ok = _HANDLERS[args.command](args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return 2
    digest = hashlib.sha256(
        json.dumps(
            {"command": args.command, "parameters": params, "version": __version__},
            sort_keys=True,
        ).encode()
    ).hexdigest()[:16]
    report = {
        "command": args.command,
        "parameters": params,
        "results": results,
        "provenance": {
            "version": __version__,
            "config_hash": digest,
            "wall_time_seconds": round(time.perf_counter() - start, 6),
        },
    }
    print(json.dumps(report, sort_keys=True, indent=2))
    print(f"{args.command}: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
