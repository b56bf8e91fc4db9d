"""The ``mmkit`` command line.

Exit codes: 0 success, 1 invalid input, 2 failed precondition, 3 an
experiment assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import bundle, distances, experiments, invariants, pyramids
from .core import FiniteMMSpace, fmt, load_space, parse_rational_list
from .corpus import random_space
from .errors import PreconditionError, ValidationError
from .experiments import ExperimentReport
from .invariants import StepFunction

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION, EXIT_ASSERTION = 0, 1, 2, 3


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE.json",
                   help="space document; repeat for commands taking two spaces")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], help="output format (default json, or from --out)")
    p.add_argument("--seed", type=int, help="seed for a random corpus space when --in is omitted")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for experiments")
    return p


def _spaces(args, count: int) -> list[FiniteMMSpace]:
    if len(args.inputs) < count:
        raise PreconditionError(f"this command needs {count} --in space document(s)")
    return [load_space(path) for path in args.inputs[:count]]


def _experiment_space(args) -> FiniteMMSpace:
    if args.inputs:
        return load_space(args.inputs[0])
    if args.seed is None:
        raise PreconditionError("give --in FILE.json or --seed N")
    return random_space(random.Random(args.seed), n_min=2, n_max=5)


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise PreconditionError(f"--{name} is required")
    return value


def _pyramid(args):
    if args.atoms is not None:
        return pyramids.AtomPyramid(pyramids.as_atoms(args.atoms))
    return pyramids.AssociatedPyramid(_spaces(args, 1)[0])


# -- commands ----------------------------------------------------------------

def cmd_validate(args):
    X = _spaces(args, 1)[0]
    return {"valid": True, "size": X.size, "diameter": fmt(X.diameter())}


def cmd_invariant(args):
    X = _spaces(args, 1)[0]
    if args.which == "diam":
        return {"partial_diam": fmt(invariants.partial_diam(X, _need(args, "alpha")))}
    if args.which == "sep":
        return {"sep": fmt(invariants.sep(X, _need(args, "kappa")))}
    upper = args.upper or "1"
    if args.of == "sep":
        return invariants.sep_profile(X, _need(args, "kappa"), upper)
    return invariants.partial_diam_profile(X, upper)


def cmd_dist(args):
    if args.kind in ("box", "dconc"):
        X, Y = _spaces(args, 2)
        if args.kind == "box":
            return distances.box_bounds(X, Y).to_json()
        return {"upper": fmt(distances.dconc_upper(X, Y))}
    X = _spaces(args, 1)[0]
    if args.kind == "kyfan":
        f = [p.strip() for p in _need(args, "f").split(",")]
        g = [p.strip() for p in _need(args, "g").split(",")]
        return {"ky_fan": fmt(distances.ky_fan(f, g, parse_rational_list(_need(args, "omega")), X))}
    mu = parse_rational_list(_need(args, "mu"))
    nu = parse_rational_list(_need(args, "nu"))
    if args.kind == "tv":
        return {"tv": fmt(distances.tv(mu, nu, X))}
    return {"prokhorov": fmt(distances.prokhorov(mu, nu, X))}


def cmd_bundle(args):
    if args.action == "recover":
        X, X2 = _spaces(args, 2)
        return {"t": fmt(bundle.recover_scale(X, X2, _need(args, "delta")))}
    if args.action == "trivialize":
        X = _spaces(args, 1)[0]
        return bundle.trivialize(X, _need(args, "delta")).to_json()
    if args.delta is not None:
        X = _spaces(args, 1)[0]
        member = bundle.in_X_delta(X, args.delta)
        if args.action == "member":
            return {"member": member}
        p = bundle.trivialize(X, args.delta) if member else None
        return {
            "member": member,
            "r_delta": fmt(p.radius) if p else None,
            "section_rep": p.section_rep.to_json() if p else None,
        }
    if args.kappa is None:
        raise PreconditionError("give --delta or --kappa")
    P = _pyramid(args)
    member = bundle.in_Pi_kappa(P, args.kappa)
    if args.action == "member":
        return {"member": member}
    return {"member": member, "r_kappa": fmt(bundle.r_kappa(P, args.kappa)) if member else None}


def cmd_pyramid(args):
    if args.action == "dominates":
        X, Y = _spaces(args, 2)
        image = pyramids.find_domination(X, Y)
        return {
            "dominates": image is not None,
            "map": None if image is None else {X.labels[i]: Y.labels[j] for i, j in enumerate(image)},
        }
    atoms = _need(args, "atoms")
    if args.action == "member":
        return {"member": pyramids.in_P_A(_spaces(args, 1)[0], atoms)}
    if args.action == "sep":
        return pyramids.sep_atom_pyramid(atoms, _need(args, "kappa")).to_json()
    atoms2 = _need(args, "atoms2")
    m = args.m if args.m is not None else pyramids.minimal_m(atoms, atoms2)
    W = pyramids.separating_witness(atoms, atoms2, m)
    return {"member_of": str(pyramids.witness_member(atoms, atoms2)), "m": m, "space": W.to_json()}


def cmd_experiment(args):
    X = _experiment_space(args)
    if args.name == "non-urysohn":
        eps = parse_rational_list(args.eps or "1/10,1/100")
        r = parse_rational_list(args.r or "10,100,1000")
        return experiments.run_non_urysohn(X, eps, r, jobs=args.jobs)
    if args.name == "limit-formula":
        kwargs = {}
        if args.eps:
            kwargs["eps_schedule"] = parse_rational_list(args.eps)
        if args.delta:
            kwargs["delta_grid"] = parse_rational_list(args.delta)
        if args.r:
            kwargs["r"] = parse_rational_list(args.r)[0]
        return experiments.run_limit_formula(X, args.kappa or "1/4,1/4", jobs=args.jobs, **kwargs)
    kwargs = {"noise_schedule": parse_rational_list(args.eps)} if args.eps else {}
    return experiments.run_scale_recovery(X, args.t or "2", **kwargs)


# -- output ------------------------------------------------------------------

def _render(result, fmt_name: str) -> str:
    if isinstance(result, ExperimentReport):
        return result.to_csv() if fmt_name == "csv" else result.dumps() + "\n"
    if isinstance(result, StepFunction):
        if fmt_name == "csv":
            rows = [{"left": fmt(a), "right": fmt(b), "value": fmt(v)} for a, b, v in result.segments()]
            return _csv(["left", "right", "value"], rows)
        result = result.to_json()
    if fmt_name == "csv":
        rows = [{"key": k, "value": v if isinstance(v, str) else json.dumps(v)} for k, v in result.items()]
        return _csv(["key", "value"], rows)
    return json.dumps(result, indent=2) + "\n"


def _csv(columns, rows) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="mmkit", description="Exact computations on finite mm-spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a space document")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("invariant", parents=[common], help="partial diameter, separation distance, profiles")
    p.add_argument("which", choices=["diam", "sep", "profile"])
    p.add_argument("--alpha")
    p.add_argument("--kappa")
    p.add_argument("--upper", help="right end of the profile domain (default 1)")
    p.add_argument("--of", choices=["diam", "sep"], default="diam", help="which profile")
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("dist", parents=[common], help="distances between measures or spaces")
    p.add_argument("kind", choices=["tv", "prokhorov", "kyfan", "box", "dconc"])
    p.add_argument("--mu")
    p.add_argument("--nu")
    p.add_argument("--omega", help="weights of the finite probability space of the maps")
    p.add_argument("--f", help="comma-separated labels, image of each point of omega")
    p.add_argument("--g")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("bundle", parents=[common], help="fiber coordinates of the scale action")
    p.add_argument("action", choices=["member", "r", "trivialize", "recover"])
    p.add_argument("--delta")
    p.add_argument("--kappa")
    p.add_argument("--atoms", help="use the atom pyramid P_A instead of P_X")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("pyramid", parents=[common], help="atom pyramids and the Lipschitz order")
    p.add_argument("action", choices=["member", "sep", "witness", "dominates"])
    p.add_argument("--atoms")
    p.add_argument("--atoms2")
    p.add_argument("--kappa")
    p.add_argument("--m", type=int, help="number of diffuse points in the witness")
    p.set_defaults(func=cmd_pyramid)

    p = sub.add_parser("experiment", parents=[common], help="reproducible self-checking experiments")
    p.add_argument("name", choices=["non-urysohn", "limit-formula", "scale-recovery"])
    p.add_argument("--eps", help="eps list, or the eps/noise schedule")
    p.add_argument("--r", help="r list, or the cross distance for limit-formula")
    p.add_argument("--kappa")
    p.add_argument("--delta", help="delta grid for limit-formula")
    p.add_argument("--t", help="scale factor for scale-recovery")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    fmt_name = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    text = _render(result, fmt_name)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if isinstance(result, ExperimentReport) and not result.passed:
        print("assertion failed: " + ", ".join(result.failures()), file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
