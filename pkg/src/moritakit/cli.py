"""Batch command line: validate, tensor, morita, reduce, bridge, verify.

Every run prints one canonical JSON report on stdout (optionally copied to
--out) and exits 0 only if all assertions in the report passed.  Exit 2
means an input document failed its schema, exit 3 means a well-formed
input violated a mathematical precondition (the violation is embedded in
the report), exit 1 means a certification assertion failed.  Reports carry
input digests and embedded witnesses, never timestamps, so identical
inputs and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import hashlib
import pathlib
import sys

from . import bimodules, groupoids, io_json, lawsuite
from . import correspondences as vna
from .algebras import validate_algebra
from .bimodules import validate_bimodule
from .correspondences import validate_correspondence
from .errors import DomainError, SchemaError
from .groupoids import validate_bibundle, validate_groupoid
from .numkit import DEFAULT_TOL
from .reduction import cstar_reduce, validate_rep, wstar_reduce


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", type=str, default=None)

    p = argparse.ArgumentParser(
        prog="moritakit",
        description="Finite Morita calculus: groupoid bibundles, Hilbert "
        "bimodules, correspondences, and group-representation reduction.",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("validate", parents=[common], help="check one object against its axioms")
    v.add_argument(
        "subject",
        choices=["groupoid", "bibundle", "algebra", "bimodule", "correspondence", "group-rep"],
    )
    v.add_argument("path")

    t = sub.add_parser("tensor", parents=[common], help="tensor two composable objects")
    t.add_argument("subject", choices=["bibundle", "bimodule", "correspondence"])
    t.add_argument("first")
    t.add_argument("second")

    m = sub.add_parser("morita", parents=[common], help="decide Morita equivalence")
    m.add_argument("subject", choices=["groupoid", "algebra"])
    m.add_argument("first")
    m.add_argument("second")

    r = sub.add_parser("reduce", parents=[common], help="reduce a representation pair")
    r.add_argument("subject", choices=["cstar", "wstar"])
    r.add_argument("--rep", required=True)
    r.add_argument("--chi", required=True)

    b = sub.add_parser("bridge", parents=[common], help="move between the module pictures")
    b.add_argument("subject", choices=["corr-to-bimodule", "bimodule-to-corr"])
    b.add_argument("path")

    w = sub.add_parser("verify", parents=[common], help="run the law suite")
    w.add_argument("subject", choices=["laws"])
    w.add_argument("--scale", choices=sorted(lawsuite._SCALES), default="small")
    return p


# ---------------------------------------------------------------------------
# plumbing

class _Run:
    def __init__(self, verb: str, subject: str):
        self.report: dict = {"command": {"verb": verb, "subject": subject}, "inputs": []}

    def load(self, path: str, role: str):
        try:
            raw = pathlib.Path(path).read_bytes()
        except OSError as exc:
            raise SchemaError(f"{role}: cannot read {path} ({exc})") from exc
        doc = io_json.loads(raw.decode("utf-8"), role)
        self.report["inputs"].append(
            {"role": role, "digest": hashlib.sha256(raw).hexdigest()}
        )
        return doc

    def finish(self, results: dict, assertions: list[tuple[str, bool]]) -> int:
        self.report["results"] = results
        self.report["assertions"] = [
            {"name": name, "passed": bool(ok)} for name, ok in assertions
        ]
        return 0 if all(ok for _, ok in assertions) else 1


_VALIDATORS = {
    "groupoid": (io_json.decode_groupoid, lambda obj, tol: validate_groupoid(obj)),
    "bibundle": (io_json.decode_bibundle, lambda obj, tol: validate_bibundle(obj)),
    "algebra": (io_json.decode_algebra, validate_algebra),
    "bimodule": (io_json.decode_bimodule, validate_bimodule),
    "correspondence": (io_json.decode_correspondence, validate_correspondence),
    "group-rep": (io_json.decode_rep, validate_rep),
}


def _require_valid(obj, subject: str, role: str, tol) -> None:
    msg = _VALIDATORS[subject][1](obj, tol)
    if msg is not None:
        raise DomainError(f"{role}: {msg}")


# ---------------------------------------------------------------------------
# operations

def _do_validate(run: _Run, args) -> int:
    decode, validator = _VALIDATORS[args.subject]
    obj = decode(run.load(args.path, args.subject))
    violation = validator(obj, args.tol)
    run.finish(
        {"valid": violation is None, "violation": violation},
        [("object-satisfies-axioms", violation is None)],
    )
    return 0 if violation is None else 3


def _do_tensor(run: _Run, args) -> int:
    if args.subject == "bibundle":
        m = io_json.decode_bibundle(run.load(args.first, "first"))
        n = io_json.decode_bibundle(run.load(args.second, "second"))
        for obj, role in ((m, "first"), (n, "second")):
            _require_valid(obj, "bibundle", role, args.tol)
        out = groupoids.tensor(m, n)
        results = {
            "product": io_json.encode_bibundle(out),
            "carrier_size": len(out.carrier),
            "right_principal": groupoids.is_right_principal(out),
        }
        checks = [
            ("product-validates", validate_bibundle(out) is None),
            (
                "principality-carries-over",
                groupoids.is_right_principal(out)
                or not (groupoids.is_right_principal(m) and groupoids.is_right_principal(n)),
            ),
        ]
        return run.finish(results, checks)
    if args.subject == "bimodule":
        e = io_json.decode_bimodule(run.load(args.first, "first"))
        f = io_json.decode_bimodule(run.load(args.second, "second"))
        for obj, role in ((e, "first"), (f, "second")):
            _require_valid(obj, "bimodule", role, args.tol)
        out = bimodules.interior_tensor(e, f, args.tol)
        results = {"product": io_json.encode_bimodule(out), "dim": out.dim}
        return run.finish(results, [("product-validates", validate_bimodule(out, args.tol) is None)])
    h = io_json.decode_correspondence(run.load(args.first, "first"))
    k = io_json.decode_correspondence(run.load(args.second, "second"))
    for obj, role in ((h, "first"), (k, "second")):
        _require_valid(obj, "correspondence", role, args.tol)
    out = vna.relative_tensor(h, k, None, args.tol)
    results = {"product": io_json.encode_correspondence(out), "dim": out.dim}
    return run.finish(
        results, [("product-validates", validate_correspondence(out, args.tol) is None)]
    )


def _do_morita(run: _Run, args) -> int:
    if args.subject == "groupoid":
        g = io_json.decode_groupoid(run.load(args.first, "first"))
        h = io_json.decode_groupoid(run.load(args.second, "second"))
        for obj, role in ((g, "first"), (h, "second")):
            _require_valid(obj, "groupoid", role, args.tol)
        w = groupoids.morita_equivalent(g, h)
        results = {
            "equivalent": w is not None,
            "witness": None if w is None else io_json.encode_bibundle(w),
        }
        checks = []
        if w is not None:
            checks.append(("witness-validates", validate_bibundle(w) is None))
            checks.append(("witness-is-biprincipal", groupoids.is_biprincipal(w)))
        return run.finish(results, checks)
    a = io_json.decode_algebra(run.load(args.first, "first"))
    b = io_json.decode_algebra(run.load(args.second, "second"))
    for obj, role in ((a, "first"), (b, "second")):
        _require_valid(obj, "algebra", role, args.tol)
    w = bimodules.morita_equivalent_algebras(a, b, args.tol)
    results = {
        "equivalent": w is not None,
        "witness": None if w is None else io_json.encode_bimodule(w),
    }
    checks = []
    if w is not None:
        checks.append(("witness-validates", validate_bimodule(w, args.tol) is None))
        checks.append(("witness-is-equivalence", bimodules.is_equivalence_bimodule(w, args.tol)))
    return run.finish(results, checks)


def _do_reduce(run: _Run, args) -> int:
    u = io_json.decode_rep(run.load(args.rep, "rep"))
    chi = io_json.decode_rep(run.load(args.chi, "chi"))
    reducer = cstar_reduce if args.subject == "cstar" else wstar_reduce
    report = reducer(u, chi, args.tol)
    results = {
        "dim": report.dim,
        "oracle_dim": report.oracle_dim,
        "residual": report.residual,
        "induced": io_json.encode_carray(report.induced),
    }
    checks = [
        ("dimension-matches-oracle", report.dim == report.oracle_dim),
        ("residual-within-tolerance", report.residual <= args.tol),
    ]
    return run.finish(results, checks)


def _do_bridge(run: _Run, args) -> int:
    if args.subject == "corr-to-bimodule":
        h = io_json.decode_correspondence(run.load(args.path, "correspondence"))
        _require_valid(h, "correspondence", "correspondence", args.tol)
        e = vna.corr_to_bimodule(h, args.tol)
        results = {"bimodule": io_json.encode_bimodule(e), "dim": e.dim}
        return run.finish(results, [("output-validates", validate_bimodule(e, args.tol) is None)])
    e = io_json.decode_bimodule(run.load(args.path, "bimodule"))
    _require_valid(e, "bimodule", "bimodule", args.tol)
    h = vna.bimodule_to_corr(e, args.tol)
    results = {"correspondence": io_json.encode_correspondence(h), "dim": h.dim}
    return run.finish(
        results, [("output-validates", validate_correspondence(h, args.tol) is None)]
    )


def _do_verify(run: _Run, args) -> int:
    outcomes = lawsuite.run_all(seed=args.seed, scale=args.scale, tol=args.tol)
    run.report["command"]["seed"] = args.seed
    run.report["command"]["scale"] = args.scale
    results = {
        "criteria": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in outcomes
        ]
    }
    return run.finish(results, [(r.name, r.passed) for r in outcomes])


_DISPATCH = {
    "validate": _do_validate,
    "tensor": _do_tensor,
    "morita": _do_morita,
    "reduce": _do_reduce,
    "bridge": _do_bridge,
    "verify": _do_verify,
}


def _emit(report: dict, out_path: str | None) -> None:
    text = io_json.dumps(report)
    sys.stdout.write(text)
    if out_path:
        pathlib.Path(out_path).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    run = _Run(args.verb, args.subject)
    try:
        status = _DISPATCH[args.verb](run, args)
    except SchemaError as exc:
        run.report["error"] = {"kind": "schema", "message": str(exc)}
        _emit(run.report, args.out)
        return 2
    except DomainError as exc:
        run.report["error"] = {"kind": "domain", "message": str(exc)}
        _emit(run.report, args.out)
        return 3
    except AssertionError as exc:
        run.report["error"] = {"kind": "assertion", "message": str(exc)}
        _emit(run.report, args.out)
        return 1
    _emit(run.report, args.out)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
