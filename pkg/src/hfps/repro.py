"""End-to-end reproduction of the classification results, as report documents.

Each run_* function drives the full pipeline (catalog model, section model,
components, minimization, fingerprint) and compares against the expected
shape, returning a ReportDocument whose exit_code is

    0   every comparison matched,
    2   a comparison failed,
    3   only the documented discrepancy separates the construction from the
        printed classification (the S^{4k+2} degree-2 generator).
"""

from __future__ import annotations

from fractions import Fraction

from .graded import Q
from . import catalog
from .catalog import (
    NOTE_CP_EXPONENTS,
    NOTE_DEGREE2_GENERATOR,
    NOTE_ODD_TRUNCATION,
    NOTE_RETRACTION_ROOTS,
)
from .sections import build_section_model, component_model, enumerate_components
from .minimal import (
    elliptic_verdict,
    fingerprint,
    fingerprint_match,
    minimize,
    pi_table,
)
from .fixed_locus import (
    cp_infinity_criterion,
    k_iso_on_indecomposables,
    trivial_pair,
)
from .cdga import Cdga
from .graded import Algebra
from .report import ReportDocument

NOTE_THM5_PROOF = (
    "the proof text of the CP-infinity criterion contains contradictory "
    "degree clauses (|w_j| >= 2 as obstruction vs |w_j| = 2 as conclusion); "
    "the statement-level criterion (degree-2 generators, zero differential) "
    "is what this tool implements."
)


def bookkeeping_census(f) -> dict:
    """Mapping-space pi census for trivial fibrations: {|v| - |a| : > 0}."""
    base_alg = f.base.algebra
    out = {}
    for t_name in f.fiber_names:
        v_deg = f.total.algebra.by_name[t_name].degree
        for mono in f.base_monomials():
            d = v_deg - base_alg.monomial_degree(mono)
            if d > 0:
                out[d] = out.get(d, 0) + 1
    return out


def sphere_odd_shape(n: int) -> str:
    a = 1 if n % 4 == 1 else 3
    return "*".join(f"S{d}" for d in range(a, n + 1, 4))


def sphere_4k_shape(k: int) -> str:
    return "*".join(f"S{d}" for d in range(4 * k + 3, 8 * k, 4))


def cp_list_entries(n: int) -> list:
    """The classification list for CP^n, truncated to n, in printed order."""
    entries = []
    if n % 2 == 1:
        k = (n - 1) // 2
        for j in range(0, k + 1):
            factors = [f"S{4 * s - 1}" for s in range(1, j + 1)]
            factors.append(f"CP{2 * j + 1}")
            factors += [f"S{4 * s + 3}" for s in range(j + 1, k + 1)]
            entries.append("*".join(factors))
    else:
        k = n // 2
        entries.append("*".join([""] + [f"S{4 * r - 3}" for r in range(2, k + 2)]))
        for j in range(1, k + 1):
            factors = [f"S{4 * r - 3}" for r in range(1, k + 2) if r != j + 1]
            factors.append(f"CP{2 * j}")
            entries.append("*".join(sorted(factors, key=_factor_degree)))
    return entries


def _factor_degree(token: str) -> int:
    if token.startswith("CP"):
        return 2 * int(token[2:])
    return int(token[1:])


def cp_expected_shape(n: int, lams) -> str:
    """Case analysis: first nonzero twisting parameter picks the list entry.

    With d(e'_r) = lambda_{k+1-r} e^{2r}, a first nonzero lambda_i collapses
    the CP factor to CP^{2(k-i)+1} (odd n; one less for even n); all-zero
    keeps CP^n itself.
    """
    lams = tuple(Q(v) for v in lams)
    first = next((i for i, v in enumerate(lams, start=1) if v), None)
    if n % 2 == 1:
        k = (n - 1) // 2
        j = k if first is None else k - first
        factors = [f"S{4 * s - 1}" for s in range(1, j + 1)]
        factors.append(f"CP{2 * j + 1}")
        factors += [f"S{4 * s + 3}" for s in range(j + 1, k + 1)]
        return "*".join(factors)
    k = n // 2
    j = k if first is None else k - first
    factors = [f"S{4 * r - 3}" for r in range(1, k + 2) if r != j + 1]
    factors.append(f"CP{2 * j}")
    return "*".join(sorted(factors, key=_factor_degree))


def _pipeline(f, cutoff=None):
    """(section model, [(retraction, component, MinimizeResult)])."""
    section = build_section_model(f)
    rets = enumerate_components(f)
    out = []
    for r in rets:
        comp = component_model(section, r)
        out.append((r, comp, minimize(comp.cdga, cutoff)))
    return section, out


def run_thm1(n: int, lam=0, cutoff: int | None = None,
             invocation=None) -> ReportDocument:
    lam = Q(lam)
    doc = ReportDocument(invocation=invocation or ["repro", "thm1", "--n", str(n)])
    if n % 2 == 1:
        f = catalog.sphere_odd_s3(n, cutoff)
        expected = [sphere_odd_shape(n)]
    elif n % 4 == 0:
        f = catalog.sphere_4k_s3(n // 4, lam, cutoff)
        k = n // 4
        expected = ([sphere_4k_shape(k)] * 2) if lam else [f"S3*K{k}"]
    else:
        if n < 6:
            raise ValueError("n = 2 is outside the catalog (needs k >= 1)")
        f = catalog.sphere_4k2_s3((n - 2) // 4, cutoff)
        expected = None  # handled below: oracle + discrepancy flag
    doc.cutoff = f.total.cutoff
    for note in f.notes:
        doc.add_note(note)
    doc.add_model("total", f.total)

    section, comps = _pipeline(f)
    doc.add_verdict("components", len(comps))

    if expected is not None:
        if len(comps) != len(expected):
            doc.add_verdict("component count expected", len(expected))
            doc.exit_code = 2
            return doc
        ok = True
        for i, ((r, comp, res), shape) in enumerate(zip(comps, expected)):
            fp = fingerprint(res.minimal)
            match = fingerprint_match(fp, shape)
            label = f"component {i}" if len(comps) > 1 else "component"
            doc.add_model(label, comp.cdga)
            doc.add_model(f"{label} minimal", res.minimal)
            doc.add_table(label, "pi", fp.pi.dims, fp.pi.cutoff)
            doc.add_table(label, "betti", fp.betti.dims, fp.betti.cutoff)
            doc.add_verdict(f"{label} fingerprint = {shape}", match)
            ok = ok and match
        doc.exit_code = 0 if ok else 2
        return doc

    # n = 4k+2: compare against the bookkeeping oracle, flag the printed shape.
    k = (n - 2) // 4
    (r, comp, res) = comps[0]
    fp = fingerprint(res.minimal)
    doc.add_model("component", comp.cdga)
    doc.add_model("component minimal", res.minimal)
    doc.add_table("component", "pi", fp.pi.dims, fp.pi.cutoff)
    doc.add_table("component", "betti", fp.betti.dims, fp.betti.cutoff)
    oracle = bookkeeping_census(f)
    oracle_ok = fp.pi.nonzero() == {d: c for d, c in sorted(oracle.items())}
    printed = f"S3*S7*T{k}"
    printed_ok = fingerprint_match(fp, printed)
    doc.add_verdict("pi equals mapping-space bookkeeping oracle", oracle_ok)
    doc.add_verdict(f"fingerprint = printed {printed}", printed_ok)
    doc.add_note(NOTE_DEGREE2_GENERATOR)
    if printed_ok:
        doc.exit_code = 0
    elif oracle_ok:
        doc.exit_code = 3
    else:
        doc.exit_code = 2
    return doc


def run_thm2(n: int, lams, cutoff: int | None = None,
             invocation=None) -> ReportDocument:
    lams = tuple(Q(v) for v in lams)
    doc = ReportDocument(
        invocation=invocation
        or ["repro", "thm2", "--n", str(n), "--lambdas",
            ",".join(str(v) for v in lams)]
    )
    f = catalog.cp_s3(n, lams, cutoff)
    doc.cutoff = f.total.cutoff
    for note in f.notes:
        doc.add_note(note)
    doc.add_model("total", f.total)

    section, comps = _pipeline(f)
    doc.add_verdict("components", len(comps))
    if len(comps) != 1:
        doc.exit_code = 2
        return doc
    (r, comp, res) = comps[0]
    fp = fingerprint(res.minimal)
    doc.add_model("component", comp.cdga)
    doc.add_model("component minimal", res.minimal)
    doc.add_table("component", "pi", fp.pi.dims, fp.pi.cutoff)
    doc.add_table("component", "betti", fp.betti.dims, fp.betti.cutoff)

    entries = cp_list_entries(n)
    matches = [e for e in entries if fingerprint_match(fp, e)]
    expected = cp_expected_shape(n, lams)
    doc.add_verdict("list entries matched", len(matches),
                    detail="; ".join(matches))
    doc.add_verdict(f"expected entry {expected}",
                    matches == [expected])
    doc.exit_code = 0 if matches == [expected] else 2
    return doc


def run_eta(k: int, cutoff: int | None = None, invocation=None) -> ReportDocument:
    doc = ReportDocument(
        invocation=invocation or ["repro", "eta", "--k", str(k)]
    )
    f = catalog.eilenberg_product_s1(2 * k, cutoff)
    doc.cutoff = f.total.cutoff
    doc.add_model("total", f.total)

    section, comps = _pipeline(f)
    connected = len(comps) == 1
    doc.add_verdict("path connected (single retraction)", connected)
    ok = connected
    if connected:
        (r, comp, res) = comps[0]
        fp = fingerprint(res.minimal)
        doc.add_model("component", comp.cdga)
        doc.add_model("component minimal", res.minimal)
        doc.add_table("component", "pi", fp.pi.dims, fp.pi.cutoff)
        doc.add_table("component", "betti", fp.betti.dims, fp.betti.cutoff)
        shape = f"S{2 * k + 1}"
        match = fingerprint_match(fp, shape)
        doc.add_verdict(f"fingerprint = {shape}", match)
        fiber_v = elliptic_verdict(f.fiber)
        comp_v = elliptic_verdict(res.minimal)
        doc.add_verdict("fiber ellipticity", fiber_v.kind, fiber_v.detail)
        doc.add_verdict("component ellipticity", comp_v.kind, comp_v.detail)
        ok = (match and fiber_v.kind == "non-elliptic-evidence"
              and comp_v.kind == "certified-elliptic")
    doc.exit_code = 0 if ok else 2
    return doc


def catalog_battery():
    """The instances exercised by the classification criteria."""
    battery = []
    for n in (3, 5, 7, 9, 11, 13):
        battery.append((f"sphere_odd n={n}", catalog.sphere_odd_s3(n)))
    for k in (1, 2, 3):
        for lam in (0, 1, -1, 2):
            battery.append((f"sphere_4k k={k} lambda={lam}",
                            catalog.sphere_4k_s3(k, lam)))
    for k in (1, 2):
        battery.append((f"sphere_4k2 k={k}", catalog.sphere_4k2_s3(k)))
    battery.append(("cp n=3 lambda=(0)", catalog.cp_s3(3, (0,))))
    battery.append(("cp n=3 lambda=(1)", catalog.cp_s3(3, (1,))))
    for lams in ((0, 0), (1, 0), (0, 1)):
        battery.append((f"cp n=5 lambda={lams}", catalog.cp_s3(5, lams)))
    for k in (1, 2, 3):
        battery.append((f"eta k={k}", catalog.eilenberg_product_s1(2 * k)))
    return battery


def run_prop1(invocation=None) -> ReportDocument:
    """2 dim pi(component) >= dim pi(fiber), on every catalog instance."""
    doc = ReportDocument(invocation=invocation or ["repro", "prop1"])
    ok = True
    for label, f in catalog_battery():
        cutoff = f.total.cutoff
        fiber_pi = pi_table(f.fiber, cutoff).total()
        section, comps = _pipeline(f)
        for i, (r, comp, res) in enumerate(comps):
            comp_pi = pi_table(res.minimal, cutoff).total()
            holds = 2 * comp_pi >= fiber_pi
            ok = ok and holds
            doc.add_verdict(
                f"{label} component {i}: 2*{comp_pi} >= {fiber_pi}", holds
            )
    doc.exit_code = 0 if ok else 2
    return doc


def thm5_battery():
    """(label, minimal model, expected criterion status)."""
    def cdga(gens, diff_builder=None, cutoff=16, label=""):
        alg = Algebra(gens)
        diff = diff_builder(alg) if diff_builder else {}
        return Cdga(alg, diff, cutoff, label=label)

    return [
        ("CP-infinity", cdga([("e", 2)], label="CPoo"), "true"),
        ("CP-infinity x CP-infinity",
         cdga([("e", 2), ("f", 2)], label="CPoo x CPoo"), "true"),
        ("S2 model",
         cdga([("e", 2), ("y", 3)],
              lambda alg: {"y": alg.gen("e") * alg.gen("e")}, label="S2"),
         "false"),
        ("S4 model",
         cdga([("e", 4), ("y", 7)],
              lambda alg: {"y": alg.gen("e") * alg.gen("e")}, label="S4"),
         "false"),
        ("eta fiber k=1", cdga([("z", 2), ("y", 3)], label="K(Z,2)xK(Z,3)"),
         "false"),
        ("eta fiber k=2", cdga([("z", 4), ("y", 5)], label="K(Z,4)xK(Z,5)"),
         "false"),
    ]


def run_thm5(invocation=None) -> ReportDocument:
    doc = ReportDocument(invocation=invocation or ["repro", "thm5"])
    doc.add_note(NOTE_THM5_PROOF)
    ok = True
    for label, model, expected in thm5_battery():
        verdict = cp_infinity_criterion(model)
        pair = trivial_pair(model)
        direct = k_iso_on_indecomposables(pair, model.cutoff)
        agree = (verdict.status == "true") == direct
        doc.add_verdict(f"{label}: criterion", verdict.status,
                        verdict.witness or "")
        doc.add_verdict(f"{label}: two routes agree", agree)
        ok = ok and verdict.status == expected and agree
    doc.exit_code = 0 if ok else 2
    return doc
