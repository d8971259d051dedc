"""Fibration and equivariant-pair config files (JSON), and the poly grammar.

Schema (all strings exact, parsing is total -- a file either loads fully and
validates or raises ConfigError):

    {
      "name": "optional label",
      "generators": [
        {"name": "x", "degree": 4, "side": "base"},
        {"name": "e", "degree": 4, "side": "fiber"},
        {"name": "e'", "degree": 7, "side": "fiber"}
      ],
      "truncations": {"x": 3},
      "differential": {"e": "0", "e'": "e^2 + x e"},
      "params": {"lambda": "1"},
      "cutoff": 30
    }

The differential gives D on fiber generators as polynomial strings over all
generators; the fiber differential is its projection along base -> 0.  An
equivariant pair file adds

    "fixed_model": {"generators": [...], "differential": {...}},
    "psi": {"z": "...", "y": "..."}

with psi values over the base generators and the fixed-model generators.

Polynomial grammar:

    poly    := term (('+' | '-') term)*
    term    := coeff? factor*
    factor  := name ('^' int)?
    coeff   := int ('/' int)?
    name    := letter (letter | digit | '_' | "'")*

Factors are separated by whitespace; an empty term list with a coefficient is
a constant, and the literal "0" is the zero polynomial.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .graded import Algebra, Polynomial, Q
from .cdga import Cdga, substitute
from .catalog import (
    FibrationModel,
    cp_lambda_length,
    cp_s3,
    eilenberg_product_s1,
    sphere_4k2_s3,
    sphere_4k_s3,
    sphere_odd_s3,
    validate_fibration,
)


class ConfigError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<coeff>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)(?:\^(?P<exp>\d+))?)"
)


def parse_poly(algebra: Algebra, text: str, where: str = "poly") -> Polynomial:
    """Parse the documented grammar over the given algebra."""
    text = text.strip()
    if not text:
        raise ConfigError(f"{where}: empty polynomial string")
    out = algebra.zero()
    # split into signed terms at top level
    terms = re.split(r"\s*([+-])\s*", text)
    pending = []
    i = 0
    if terms[0] == "":
        if len(terms) < 3 or terms[1] != "-":
            raise ConfigError(f"{where}: cannot parse {text!r}")
        pending.append((Q(-1), terms[2]))  # leading minus
        i = 3
    else:
        pending.append((Q(1), terms[0]))
        i = 1
    while i < len(terms):
        op, body = terms[i], terms[i + 1]
        pending.append((Q(1) if op == "+" else Q(-1), body))
        i += 2
    for sgn, body in pending:
        out = out + _parse_term(algebra, body, sgn, where)
    return out


def _parse_term(algebra: Algebra, body: str, sign, where: str) -> Polynomial:
    body = body.strip()
    if not body:
        raise ConfigError(f"{where}: empty term")
    coeff = Q(sign)
    factors = []
    pos = 0
    first = True
    while pos < len(body):
        m = _TOKEN.match(body, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"{where}: cannot parse {body[pos:]!r}")
        if m.group("coeff"):
            if not first:
                raise ConfigError(
                    f"{where}: coefficient {m.group('coeff')!r} must lead its term"
                )
            coeff *= Q(m.group("coeff"))
        else:
            name = m.group("name")
            g = algebra.by_name.get(name)
            if g is None:
                raise ConfigError(f"{where}: unknown generator {name!r}")
            factors.append((g.gid, int(m.group("exp") or 1)))
        first = False
        pos = m.end()
    if not factors:
        return algebra.scalar(coeff)
    merged = {}
    for gid, e in factors:
        merged[gid] = merged.get(gid, 0) + e
    poly = algebra.monomial(tuple(sorted(merged.items())), 1)
    return poly.scale(coeff)


def poly_str(p: Polynomial) -> str:
    """Renders in the same grammar parse_poly accepts."""
    return str(p)


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"{where}: rationals must be ints or strings, not floats")
    try:
        return Q(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: bad rational {value!r}: {exc}") from None


def _generators(data, where: str):
    base, fiber = [], []
    for i, entry in enumerate(data):
        spot = f"{where}[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{spot}: expected an object")
        for key in ("name", "degree", "side"):
            if key not in entry:
                raise ConfigError(f"{spot}: missing field {key!r}")
        side = entry["side"]
        if side not in ("base", "fiber"):
            raise ConfigError(f"{spot}: side must be 'base' or 'fiber'")
        degree = entry["degree"]
        if not isinstance(degree, int) or degree < 0:
            raise ConfigError(f"{spot}: degree must be a nonnegative integer")
        (base if side == "base" else fiber).append((entry["name"], degree))
    if not fiber:
        raise ConfigError(f"{where}: at least one fiber generator is required")
    return base, fiber


def fibration_from_dict(data: dict, where: str = "config") -> FibrationModel:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: the document must be an object")
    for key in data:
        if key not in ("name", "generators", "truncations", "differential",
                       "params", "cutoff", "fixed_model", "psi"):
            raise ConfigError(f"{where}: unknown field {key!r}")
    if "generators" not in data:
        raise ConfigError(f"{where}: missing field 'generators'")
    base_gens, fiber_gens = _generators(data["generators"], f"{where}.generators")

    trunc = {}
    for name, power in (data.get("truncations") or {}).items():
        if not isinstance(power, int) or power < 1:
            raise ConfigError(f"{where}.truncations.{name}: power must be >= 1")
        if name in {n for n, _ in fiber_gens}:
            raise ConfigError(
                f"{where}.truncations: fiber generator {name!r} cannot be "
                "truncated (the fiber model is free)"
            )
        if name not in {n for n, _ in base_gens}:
            raise ConfigError(f"{where}.truncations: unknown generator {name!r}")
        trunc[name] = power
    for name, _ in base_gens:
        g_deg = dict(base_gens)[name]
        if g_deg % 2 == 0 and name not in trunc:
            raise ConfigError(
                f"{where}: base generator {name!r} is even and needs a truncation"
            )

    top_fiber = max(d for _, d in fiber_gens)
    cutoff = data.get("cutoff", 2 * top_fiber + 2)
    if not isinstance(cutoff, int) or cutoff < 1:
        raise ConfigError(f"{where}.cutoff: must be a positive integer")

    base_trunc = {n: p for n, p in trunc.items() if n in dict(base_gens)}
    total_alg = Algebra(base_gens + fiber_gens, trunc)
    diff_data = data.get("differential") or {}
    fiber_names = {n for n, _ in fiber_gens}
    for name in diff_data:
        if name not in fiber_names:
            raise ConfigError(
                f"{where}.differential: {name!r} is not a fiber generator"
            )
    total_diff = {
        name: parse_poly(total_alg, text, f"{where}.differential.{name}")
        for name, text in diff_data.items()
    }

    base_alg = Algebra(base_gens, base_trunc)
    base = Cdga(base_alg, {}, cutoff, label="base")
    fiber_alg = Algebra(fiber_gens)
    to_fiber = {}
    for g in total_alg.gens:
        if g.name in fiber_names:
            to_fiber[g.gid] = fiber_alg.gen(g.name)
        else:
            to_fiber[g.gid] = fiber_alg.zero()
    fiber = Cdga(
        fiber_alg,
        {n: substitute(p, to_fiber, fiber_alg) for n, p in total_diff.items()},
        cutoff, label="fiber",
    )
    total = Cdga(total_alg, total_diff, cutoff, label=data.get("name", "total"))

    params = {}
    for key, value in (data.get("params") or {}).items():
        if isinstance(value, list):
            params[key] = tuple(_rational(v, f"{where}.params.{key}") for v in value)
        else:
            params[key] = _rational(value, f"{where}.params.{key}")

    model = FibrationModel(
        base=base, fiber=fiber, total=total, params=params,
        family=data.get("name", ""),
        base_names=tuple(n for n, _ in base_gens),
        fiber_names=tuple(n for n, _ in fiber_gens),
    )
    validate_fibration(model)
    return model


def loads_fibration(text: str, where: str = "config") -> FibrationModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{where}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return fibration_from_dict(data, where)


def load_fibration(path) -> FibrationModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_fibration(fh.read(), where=str(path))


def serialize_fibration(f: FibrationModel) -> dict:
    alg = f.total.algebra
    gens = []
    for n in f.base_names:
        gens.append({"name": n, "degree": alg.by_name[n].degree, "side": "base"})
    for n in f.fiber_names:
        gens.append({"name": n, "degree": alg.by_name[n].degree, "side": "fiber"})
    trunc = {
        alg.gens[gid].name: p for gid, p in sorted(alg.truncations.items())
    }
    diff = {}
    for n in f.fiber_names:
        diff[n] = str(f.total.diff[alg.by_name[n].gid])
    params = {}
    for k, v in f.params.items():
        if isinstance(v, tuple):
            params[k] = [str(x) for x in v]
        else:
            params[k] = str(v)
    out = {
        "name": f.family or "fibration",
        "generators": gens,
        "truncations": trunc,
        "differential": diff,
        "cutoff": f.total.cutoff,
    }
    if params:
        out["params"] = params
    return out


def dumps_fibration(f: FibrationModel) -> str:
    return json.dumps(serialize_fibration(f), indent=2, sort_keys=True) + "\n"


def load_equivariant_pair(path):
    """Load a fibration config extended with fixed_model and psi blocks."""
    from .fixed_locus import make_pair, make_product

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    where = str(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{where}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if "fixed_model" not in data or "psi" not in data:
        raise ConfigError(f"{where}: an equivariant pair needs 'fixed_model' and 'psi'")
    fixed_data = data["fixed_model"]
    fibration = fibration_from_dict(
        {k: v for k, v in data.items() if k not in ("fixed_model", "psi")},
        where,
    )
    gens = []
    for i, entry in enumerate(fixed_data.get("generators", [])):
        spot = f"{where}.fixed_model.generators[{i}]"
        if not isinstance(entry, dict) or "name" not in entry or "degree" not in entry:
            raise ConfigError(f"{spot}: expected {{name, degree}}")
        gens.append((entry["name"], entry["degree"]))
    fixed_alg = Algebra(gens)
    fixed_diff = {
        n: parse_poly(fixed_alg, s, f"{where}.fixed_model.differential.{n}")
        for n, s in (fixed_data.get("differential") or {}).items()
    }
    fixed = Cdga(fixed_alg, fixed_diff, fibration.total.cutoff, label="fixed set")
    fixed.validate_strict()

    product, _ = make_product(fibration, fixed)
    psi_values = {
        n: parse_poly(product.algebra, s, f"{where}.psi.{n}")
        for n, s in data["psi"].items()
    }
    return make_pair(fibration, fixed, psi_values)


def catalog_match(f: FibrationModel):
    """Identify f with a catalog family (canonical names), or return None."""
    alg = f.total.algebra

    def deg(name):
        return alg.by_name[name].degree

    try:
        if f.base_names == ("x",) and f.fiber_names == ("e",) and deg("x") == 4:
            n = deg("e")
            if n % 2 == 1 and f == sphere_odd_s3(n, cutoff=f.total.cutoff):
                return f"sphere_odd(n={n})"
        if f.base_names == ("x",) and f.fiber_names == ("e", "e'"):
            n = deg("e")
            if deg("x") == 4 and n % 4 == 0:
                k = n // 4
                de = f.total.diff[alg.by_name["e'"].gid]
                x_gid, e_gid = alg.by_name["x"].gid, alg.by_name["e"].gid
                lam = de.terms.get(tuple(sorted(((x_gid, k), (e_gid, 1)))), Q(0))
                if f == sphere_4k_s3(k, lam, cutoff=f.total.cutoff):
                    return f"sphere_4k(k={k}, lambda={lam})"
            if deg("x") == 4 and n % 4 == 2 and n >= 6:
                k = (n - 2) // 4
                if f == sphere_4k2_s3(k, cutoff=f.total.cutoff):
                    return f"sphere_4k2(k={k})"
            if deg("x") == 4 and n == 2:
                cp_n = (deg("e'") - 1) // 2
                de = f.total.diff[alg.by_name["e'"].gid]
                x_gid, e_gid = alg.by_name["x"].gid, alg.by_name["e"].gid
                lams = []
                for m in range(1, cp_lambda_length(cp_n) + 1):
                    j = cp_n + 1 - 2 * m
                    mono = tuple(sorted(((x_gid, m), (e_gid, j))))
                    lams.append(de.terms.get(mono, Q(0)))
                if f == cp_s3(cp_n, lams, cutoff=f.total.cutoff):
                    return f"cp(n={cp_n}, lambda={tuple(lams)})"
        if f.base_names == ("x",) and f.fiber_names == ("z", "y") and deg("x") == 2:
            n = deg("z")
            if f == eilenberg_product_s1(n, cutoff=f.total.cutoff):
                return f"eta(n={n})"
    except (ValueError, KeyError):
        return None
    return None
