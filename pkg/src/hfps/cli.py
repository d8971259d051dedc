"""Command-line surface.

    hfps repro thm1 --n 11            reproduce a classification case
    hfps repro thm2 --n 5 --lambdas 1,0
    hfps repro eta --k 3
    hfps repro prop1
    hfps repro thm5
    hfps compute sec --catalog sphere4k --k 1 --lambda 2
    hfps compute pi --model path/to/fibration.json --cutoff 20

Exit codes: 0 success/match, 2 mismatch, 3 known-discrepancy-only,
64 usage error.  Reports are deterministic byte-for-byte for identical
invocations; --out-dir persists them keyed by the invocation hash.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from fractions import Fraction
from pathlib import Path

from .graded import Q
from . import catalog, repro
from .configio import ConfigError, catalog_match, load_fibration
from .minimal import elliptic_verdict, fingerprint, minimize, pi_table
from .report import VERSION, ReportDocument
from .sections import (
    UnsupportedRetractionSystem,
    build_section_model,
    component_model,
    enumerate_components,
)

USAGE_EXIT = 64

DEFAULT_RANGES = {
    "thm1_n": (3, 16),
    "thm2_n": (2, 9),
    "eta_k": (1, 6),
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


def _rational_vector(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(_rational(part) for part in text.split(","))


def build_parser() -> Parser:
    p = Parser(prog="hfps", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("repro", help="reproduce a classification result")
    rsub = rp.add_subparsers(dest="theorem", required=True)

    def common(q):
        q.add_argument("--cutoff", type=int, default=None)
        q.add_argument("--format", choices=("text", "json"), default="text")
        q.add_argument("--out-dir", default=None)
        q.add_argument("--allow-large", action="store_true",
                       help="lift the default parameter bounds")

    q = rsub.add_parser("thm1")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--lambda", dest="lam", type=_rational, default=Q(0))
    common(q)
    q = rsub.add_parser("thm2")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--lambdas", type=_rational_vector, default=None)
    common(q)
    q = rsub.add_parser("eta")
    q.add_argument("--k", type=int, required=True)
    common(q)
    q = rsub.add_parser("prop1")
    common(q)
    q = rsub.add_parser("thm5")
    common(q)

    cp = sub.add_parser("compute", help="compute one artifact of the pipeline")
    cp.add_argument("what",
                    choices=("sec", "minimize", "betti", "pi", "components"))
    cp.add_argument("--catalog",
                    choices=("sphereodd", "sphere4k", "sphere4k2", "cp", "eta"),
                    default=None)
    cp.add_argument("--model", default=None, help="fibration config file")
    cp.add_argument("--n", type=int, default=None)
    cp.add_argument("--k", type=int, default=None)
    cp.add_argument("--lambda", dest="lam", type=_rational, default=Q(0))
    cp.add_argument("--lambdas", type=_rational_vector, default=None)
    cp.add_argument("--cutoff", type=int, default=None)
    cp.add_argument("--component", type=int, default=0,
                    help="component index for minimize/betti/pi")
    cp.add_argument("--format", choices=("text", "json"), default="text")
    cp.add_argument("--out-dir", default=None)
    return p


def _check_range(label: str, value: int, allow_large: bool):
    lo, hi = DEFAULT_RANGES[label]
    if value < lo:
        raise UsageError(f"{label.split('_')[1]} must be >= {lo}")
    if value > hi and not allow_large:
        raise UsageError(
            f"{label.split('_')[1]} > {hi} needs --allow-large "
            "(basis sizes grow quickly)"
        )


def _resolve_fibration(args, invocation):
    if (args.catalog is None) == (args.model is None):
        raise UsageError("exactly one of --catalog and --model is required")
    if args.model is not None:
        return load_fibration(args.model)
    name = args.catalog
    if name == "sphereodd":
        if args.n is None:
            raise UsageError("--catalog sphereodd needs --n")
        return catalog.sphere_odd_s3(args.n, args.cutoff)
    if name == "sphere4k":
        if args.k is None:
            raise UsageError("--catalog sphere4k needs --k")
        return catalog.sphere_4k_s3(args.k, args.lam, args.cutoff)
    if name == "sphere4k2":
        if args.k is None:
            raise UsageError("--catalog sphere4k2 needs --k")
        return catalog.sphere_4k2_s3(args.k, args.cutoff)
    if name == "cp":
        if args.n is None:
            raise UsageError("--catalog cp needs --n")
        lams = args.lambdas
        if lams is None:
            lams = (0,) * catalog.cp_lambda_length(args.n)
        return catalog.cp_s3(args.n, lams, args.cutoff)
    if args.k is None:
        raise UsageError("--catalog eta needs --k")
    return catalog.eilenberg_product_s1(2 * args.k, args.cutoff)


def run_compute(args, invocation) -> ReportDocument:
    f = _resolve_fibration(args, invocation)
    if args.model is not None and args.cutoff is not None:
        f = f.with_cutoff(args.cutoff)
    doc = ReportDocument(invocation=invocation, cutoff=f.total.cutoff)
    for note in f.notes:
        doc.add_note(note)
    match = catalog_match(f)
    if args.model is not None:
        doc.add_verdict("catalog instance",
                        match if match else "not a catalog instance")

    if args.what == "components":
        rets = enumerate_components(f)
        doc.add_verdict("components", len(rets))
        for i, r in enumerate(rets):
            values = ", ".join(
                f"{n} -> {v}" for n, v in sorted(r.describe().items())
            )
            doc.add_verdict(f"retraction {i}", values)
        if f.family == "sphere_4k" and f.params.get("lambda"):
            doc.add_note(catalog.NOTE_RETRACTION_ROOTS)
        return doc

    section = build_section_model(f)
    if args.what == "sec":
        doc.add_model("section space", section.cdga)
        census = ", ".join(str(d) for d in section.degree_census())
        doc.add_verdict("token degrees", census)
        return doc

    rets = enumerate_components(f)
    if not 0 <= args.component < len(rets):
        raise UsageError(
            f"--component {args.component} out of range ({len(rets)} found)"
        )
    comp = component_model(section, rets[args.component])
    res = minimize(comp.cdga)
    if args.what == "minimize":
        doc.add_model("component", comp.cdga)
        doc.add_model("minimal", res.minimal)
        doc.add_verdict("eliminated pairs",
                        "; ".join(f"{u},{w}" for u, w in res.eliminated))
        doc.add_note(res.note)
        return doc
    if args.what == "pi":
        table = pi_table(res.minimal)
        doc.add_table("component", "pi", table.dims, table.cutoff)
        return doc
    betti = comp.cdga.cohomology()
    doc.add_table("component", "betti", betti.dims, betti.cutoff)
    return doc


def run_repro(args, invocation) -> ReportDocument:
    if args.theorem == "thm1":
        _check_range("thm1_n", args.n, args.allow_large)
        if args.n % 4 == 2 and args.n < 6:
            raise UsageError("thm1 with n = 2 is outside the catalog")
        return repro.run_thm1(args.n, args.lam, args.cutoff, invocation)
    if args.theorem == "thm2":
        _check_range("thm2_n", args.n, args.allow_large)
        lams = args.lambdas
        if lams is None:
            lams = (0,) * catalog.cp_lambda_length(args.n)
        return repro.run_thm2(args.n, lams, args.cutoff, invocation)
    if args.theorem == "eta":
        _check_range("eta_k", args.k, args.allow_large)
        return repro.run_eta(args.k, args.cutoff, invocation)
    if args.theorem == "prop1":
        return repro.run_prop1(invocation)
    return repro.run_thm5(invocation)


def _persist(doc: ReportDocument, out_dir: str):
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    key = hashlib.sha256(
        (" ".join(doc.invocation) + "\n" + VERSION).encode()
    ).hexdigest()[:16]
    (directory / f"{key}.json").write_text(doc.to_json(), encoding="utf-8")
    (directory / f"{key}.txt").write_text(doc.to_text(), encoding="utf-8")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        invocation = argv
        if args.command == "repro":
            doc = run_repro(args, invocation)
        else:
            doc = run_compute(args, invocation)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ConfigError, UnsupportedRetractionSystem, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = doc.to_json() if args.format == "json" else doc.to_text()
    sys.stdout.write(out)
    if args.out_dir:
        _persist(doc, args.out_dir)
    return doc.exit_code


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
