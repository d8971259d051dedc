"""Minimization of Sullivan models, homotopy tables, fingerprints, ellipticity.

Minimization repeatedly eliminates a contractible pair (u, w) with
d(u) = c.w + (rest), c != 0: both generators are removed and w is rewritten
as -(rest)/c throughout.  In a positively graded algebra the rest can never
contain w itself (that would need a degree-0 cofactor), so the rewriting is a
single substitution; the accumulated substitutions form the quasi-isomorphism
witness, which is what quasi_iso_check certifies up to the cutoff.

Fingerprints compare pi and Betti tables only (no formality check) against
reference models assembled from the shape grammar: products of S<k>, CP<m>,
K<k>, T<k> and the trivial factor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .graded import Algebra, Polynomial, Q
from .cdga import (
    BettiTable,
    Cdga,
    CdgaMorphism,
    compose,
    identity_morphism,
    substitute,
    tensor,
)


class NotMinimal(ValueError):
    pass


class MalformedShape(ValueError):
    pass


def linear_coefficients(c: Cdga):
    """Word-length-1 part of d: {u_gid: {w_gid: coeff}}, omitting zero rows."""
    out = {}
    for g in c.algebra.gens:
        row = {}
        for mono, coeff in c.diff[g.gid].terms.items():
            if len(mono) == 1 and mono[0][1] == 1:
                row[mono[0][0]] = coeff
        if row:
            out[g.gid] = row
    return out


def linear_part(c: Cdga):
    """Per-degree matrices of the linear part of d.

    Returns {degree: (source names, target names, {(src, tgt): coeff})} for
    the degrees where the linear part is nonzero.
    """
    lin = linear_coefficients(c)
    by_degree = {}
    for u, row in lin.items():
        ug = c.algebra.gens[u]
        d = ug.degree
        if d not in by_degree:
            srcs = [g.name for g in c.algebra.gens if g.degree == d]
            tgts = [g.name for g in c.algebra.gens if g.degree == d + 1]
            by_degree[d] = (srcs, tgts, {})
        for w, coeff in row.items():
            by_degree[d][2][(ug.name, c.algebra.gens[w].name)] = coeff
    return dict(sorted(by_degree.items()))


def is_minimal(c: Cdga) -> bool:
    return not linear_coefficients(c)


@dataclass
class MinimizeResult:
    minimal: Cdga
    witness: CdgaMorphism       # input -> minimal
    cutoff: int
    eliminated: list            # [(u name, w name)] in elimination order

    @property
    def note(self):
        return f"minimal up to degree {self.cutoff}"


def minimize(c: Cdga, cutoff: int | None = None, tie_break: str = "low") -> MinimizeResult:
    """Eliminate the linear part of d; lowest degree first.

    tie_break selects among equally low-degree candidates ("low" or "high"
    generator id); the resulting pi table is independent of the choice, which
    the test suite checks.
    """
    if cutoff is None:
        cutoff = c.cutoff
    for g in c.algebra.gens:
        if g.degree < 1:
            raise NotMinimal(
                f"minimize needs a positively graded input, got {g.name} "
                f"of degree {g.degree}"
            )
    cur = c
    witness = identity_morphism(c)
    eliminated = []
    while True:
        lin = linear_coefficients(cur)
        if not lin:
            break
        if tie_break == "low":
            u_gid = min(lin, key=lambda g: (cur.algebra.gens[g].degree, g))
            w_gid = min(lin[u_gid])
        else:
            u_gid = min(lin, key=lambda g: (cur.algebra.gens[g].degree, -g))
            w_gid = max(lin[u_gid])
        cval = lin[u_gid][w_gid]
        old = cur.algebra
        u, w = old.gens[u_gid], old.gens[w_gid]
        if u_gid in old.truncations or w_gid in old.truncations:
            raise NotMinimal(f"cannot eliminate truncated generator {u.name}")

        keep = [g for g in old.gens if g.gid not in (u_gid, w_gid)]
        new_alg = Algebra(
            [(g.name, g.degree) for g in keep],
            {old.gens[gid].name: p for gid, p in old.truncations.items()},
        )
        values = {g.gid: new_alg.gen(g.name) for g in keep}
        values[u_gid] = new_alg.zero()
        rest = cur.diff[u_gid] - old.gen(w.name).scale(cval)
        for mono in rest.terms:
            if any(gid == w_gid for gid, _ in mono):
                raise NotMinimal(
                    f"d({u.name}) depends on {w.name} beyond its linear term"
                )
        values[w_gid] = substitute(rest, values, new_alg).scale(Q(-1) / cval)

        new_diff = {
            g.name: substitute(cur.diff[g.gid], values, new_alg) for g in keep
        }
        new_cdga = Cdga(new_alg, new_diff, cur.cutoff, label=cur.label)
        step = CdgaMorphism(
            cur, new_cdga, {old.gens[gid].name: v for gid, v in values.items()}
        )
        step.validate_strict()
        witness = compose(step, witness)
        eliminated.append((u.name, w.name))
        cur = new_cdga
    return MinimizeResult(minimal=cur, witness=witness, cutoff=cutoff,
                          eliminated=eliminated)


@dataclass
class PiTable:
    """dim pi_k (x) Q per degree, read off a minimal model's generators."""

    dims: dict
    cutoff: int

    def __getitem__(self, k):
        return self.dims.get(k, 0)

    def nonzero(self):
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def total(self) -> int:
        return sum(self.dims.values())

    def degrees(self):
        out = []
        for k, v in sorted(self.dims.items()):
            out.extend([k] * v)
        return out

    def __eq__(self, other):
        if not isinstance(other, PiTable):
            return NotImplemented
        return self.cutoff == other.cutoff and self.nonzero() == other.nonzero()

    def __str__(self):
        body = ", ".join(f"{k}:{v}" for k, v in self.nonzero().items())
        return f"{{{body}}} up to degree {self.cutoff}"


def pi_table(minimal: Cdga, cutoff: int | None = None) -> PiTable:
    if not is_minimal(minimal):
        raise NotMinimal("pi tables are read off minimal models only")
    if cutoff is None:
        cutoff = minimal.cutoff
    dims = {}
    for g in minimal.algebra.gens:
        if 1 <= g.degree <= cutoff:
            dims[g.degree] = dims.get(g.degree, 0) + 1
    return PiTable(dims, cutoff)


@dataclass
class Fingerprint:
    pi: PiTable
    betti: BettiTable
    cutoff: int
    shape: str | None = None

    def __str__(self):
        tail = f" = {self.shape}" if self.shape else ""
        return f"pi {self.pi}; betti {self.betti}{tail}"


def fingerprint(minimal: Cdga, cutoff: int | None = None) -> Fingerprint:
    if cutoff is None:
        cutoff = minimal.cutoff
    return Fingerprint(
        pi=pi_table(minimal, cutoff),
        betti=minimal.cohomology(cutoff),
        cutoff=cutoff,
    )


# ---------------------------------------------------------------------------
# Shape grammar and reference models
# ---------------------------------------------------------------------------

_FACTOR_RE = re.compile(r"^(S|CP|K|T)(\d+)$")


def parse_shape(expr: str):
    """Product expression: factors S<k>, CP<m>, K<k>, T<k> joined by '*'.

    An empty token (or the whole string '*' / '') is the trivial factor.
    """
    factors = []
    for token in expr.split("*"):
        token = token.strip()
        if not token:
            factors.append(("pt", 0))
            continue
        m = _FACTOR_RE.match(token)
        if not m:
            raise MalformedShape(f"unrecognised factor {token!r} in {expr!r}")
        kind, num = m.group(1), int(m.group(2))
        if num < 1:
            raise MalformedShape(f"factor {token!r} needs a positive index")
        factors.append((kind, num))
    return factors


def _sphere_model(k: int, cutoff: int) -> Cdga:
    if k % 2 == 1:
        alg = Algebra([("e", k)])
        return Cdga(alg, {}, cutoff, label=f"S{k}")
    alg = Algebra([("e", k), ("y", 2 * k - 1)])
    e = alg.gen("e")
    return Cdga(alg, {"y": e * e}, cutoff, label=f"S{k}")


def _cp_model(m: int, cutoff: int) -> Cdga:
    alg = Algebra([("e", 2), ("y", 2 * m + 1)])
    return Cdga(alg, {"y": alg.gen("e") ** (m + 1)}, cutoff, label=f"CP{m}")


def _k_model(k: int, cutoff: int) -> Cdga:
    """(Lambda((x_s), (y_r)), d), |x_s| = 4s, |y_r| = 4r-1,
    d y_r = sum over ordered pairs s+t=r of x_s x_t, 2 <= r <= 2k."""
    gens = [(f"x{s}", 4 * s) for s in range(1, k + 1)]
    gens += [(f"y{r}", 4 * r - 1) for r in range(2, 2 * k + 1)]
    alg = Algebra(gens)
    diff = {}
    for r in range(2, 2 * k + 1):
        total = alg.zero()
        for s in range(1, k + 1):
            t = r - s
            if 1 <= t <= k:
                total = total + alg.gen(f"x{s}") * alg.gen(f"x{t}")
        diff[f"y{r}"] = total
    return Cdga(alg, diff, cutoff, label=f"K{k}")


def _t_model(k: int, cutoff: int) -> Cdga:
    """As K_k but |x_s| = 4s+2, y_r for 3 <= r <= 2k+1, d y_r = sum_{s+t=r-1}."""
    gens = [(f"x{s}", 4 * s + 2) for s in range(1, k + 1)]
    gens += [(f"y{r}", 4 * r - 1) for r in range(3, 2 * k + 2)]
    alg = Algebra(gens)
    diff = {}
    for r in range(3, 2 * k + 2):
        total = alg.zero()
        for s in range(1, k + 1):
            t = r - 1 - s
            if 1 <= t <= k:
                total = total + alg.gen(f"x{s}") * alg.gen(f"x{t}")
        diff[f"y{r}"] = total
    return Cdga(alg, diff, cutoff, label=f"T{k}")


def shape_model(expr: str, cutoff: int) -> Cdga:
    """Reference minimal model of a shape expression."""
    factors = parse_shape(expr)
    builders = {"S": _sphere_model, "CP": _cp_model, "K": _k_model, "T": _t_model}
    parts = [
        builders[kind](num, cutoff) for kind, num in factors if kind != "pt"
    ]
    if not parts:
        return Cdga(Algebra([]), {}, cutoff, label="pt")
    out = parts[0]
    for p in parts[1:]:
        out = tensor(out, p, cutoff=cutoff)
    out.label = expr
    return out


def fingerprint_match(f: Fingerprint, shape_expr: str) -> bool:
    """True iff the shape's reference model has the same pi and Betti tables."""
    ref = shape_model(shape_expr, f.cutoff)
    pi_ref = pi_table(ref, f.pi.cutoff)
    if pi_ref.nonzero() != f.pi.nonzero():
        return False
    betti_ref = ref.cohomology(f.betti.cutoff)
    return betti_ref.nonzero() == f.betti.nonzero()


def match_any(f: Fingerprint, exprs) -> list:
    return [e for e in exprs if fingerprint_match(f, e)]


# ---------------------------------------------------------------------------
# Ellipticity
# ---------------------------------------------------------------------------


@dataclass
class EllipticVerdict:
    kind: str          # certified-elliptic | non-elliptic-evidence | inconclusive
    cutoff: int
    detail: str

    def __str__(self):
        return f"{self.kind} (up to degree {self.cutoff}): {self.detail}"


def elliptic_verdict(minimal: Cdga, cutoff: int | None = None) -> EllipticVerdict:
    """Ellipticity certificate for a minimal model, honest about the cutoff.

    certified-elliptic: finitely many generators, all of degree <= cutoff/2,
    and cohomology vanishing on (cutoff/2, cutoff].  Evidence against: Betti
    numbers still nonzero in the top quarter of the window, the signature of
    unbounded cohomology.  Anything else is inconclusive at this cutoff.
    """
    if not is_minimal(minimal):
        raise NotMinimal("ellipticity is decided on minimal models")
    if cutoff is None:
        cutoff = minimal.cutoff
    degrees = [g.degree for g in minimal.algebra.gens]
    top_gen = max(degrees, default=0)
    if 2 * top_gen > cutoff:
        return EllipticVerdict(
            "inconclusive", cutoff,
            f"generator of degree {top_gen} exceeds half the cutoff",
        )
    betti = minimal.cohomology(cutoff)
    top = max((k for k, v in betti.dims.items() if v), default=0)
    if 2 * top <= cutoff:
        return EllipticVerdict(
            "certified-elliptic", cutoff,
            f"pi census {len(degrees)}, cohomology vanishes above degree {top}",
        )
    if any(v and 4 * k > 3 * cutoff for k, v in betti.dims.items()):
        return EllipticVerdict(
            "non-elliptic-evidence", cutoff,
            "cohomology persists through the top quarter of the window",
        )
    return EllipticVerdict(
        "inconclusive", cutoff,
        f"top cohomology at degree {top} is too close to the cutoff",
    )
