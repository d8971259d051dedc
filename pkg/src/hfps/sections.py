"""Models of section spaces of Borel fibrations, and their components.

Given a relative model (A, 0) -> (A (x) Lambda V, D) -> (Lambda V, d) with A
finite dimensional, the section space has the free model Lambda(V (x) A#):
one generator v|a of degree |v| - |a| for every fiber generator v and every
monomial a of A.  The differential is obtained by pushing D(v) through the
expansion map

    v  |->  sum_a  a . (v|a)

inside A (x) Lambda(V (x) A#) and reading off the coefficient of each basis
monomial a.  Base generators are given smaller ids than the tokens, so every
monomial of the working algebra is (base part).(token part) in canonical
order and the extraction needs no extra signs; the d~^2 = 0 self-check below
guards the convention on every build.

Components of the section space correspond to retractions of the total model
onto the base.  Retraction values are solved from the chain-map conditions in
the UNtruncated base algebra: the truncation of A is a Postnikov artifact,
and solving modulo x^N would manufacture spurious one-parameter families of
retractions (e.g. for the circle example, where phi(z) = c x^k satisfies the
truncated condition for every c but only c = 0 survives in Lambda x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graded import ONE, Algebra, Polynomial, Q
from .cdga import Cdga, CdgaMorphism, InvalidCdga, substitute
from .catalog import FibrationModel

Q1 = Q(1)


class UnsupportedRetractionSystem(RuntimeError):
    """The retraction constraints fall outside the triangular univariate scope."""


@dataclass
class DualBasis:
    """Dual basis A# of the base: one token per monomial of A."""

    algebra: Algebra          # the (truncated) base algebra
    entries: list             # [(monomial, dual name, -degree)]

    def __len__(self):
        return len(self.entries)


@dataclass
class TokenInfo:
    name: str
    fiber_name: str
    base_mono: tuple
    degree: int


@dataclass
class SectionSpaceModel:
    cdga: Cdga                # free CDGA on the tokens (may have degree <= 0 gens)
    fibration: FibrationModel
    dual: DualBasis
    tokens: list              # [TokenInfo] in generator order

    def token_name(self, fiber_name: str, base_mono) -> str:
        return self._by_pair[(fiber_name, tuple(base_mono))]

    def degree_census(self):
        """Multiset of token degrees, as a sorted list."""
        return sorted(t.degree for t in self.tokens)

    def positive_census(self):
        return sorted(t.degree for t in self.tokens if t.degree > 0)


@dataclass
class Retraction:
    """Chain retraction of the total model onto the base, fixing the base."""

    fibration: FibrationModel
    values: dict              # fiber name -> Polynomial over the base algebra
    morphism: CdgaMorphism

    def sort_key(self):
        return tuple(
            tuple(sorted((m, c) for m, c in self.values[n].terms.items()))
            for n in self.fibration.fiber_names
        )

    def describe(self):
        return {n: str(self.values[n]) for n in self.fibration.fiber_names}


@dataclass
class ComponentModel:
    """Positive-degree model of one component of the section space."""

    cdga: Cdga
    retraction: Retraction
    section: SectionSpaceModel
    kept: list                # surviving TokenInfo, in generator order


def _dual_name(fiber_name: str, base_algebra: Algebra, mono) -> str:
    return f"{fiber_name}({base_algebra.monomial_str(mono)})"


def build_section_model(f: FibrationModel) -> SectionSpaceModel:
    base_alg = f.base.algebra
    total_alg = f.total.algebra
    nbase = len(f.base_names)
    base_monos = f.base_monomials()

    dual = DualBasis(
        base_alg,
        [
            (m, f"({base_alg.monomial_str(m)})#", -base_alg.monomial_degree(m))
            for m in base_monos
        ],
    )

    tokens = []
    for vname in f.fiber_names:
        v = total_alg.by_name[vname]
        for mono in base_monos:
            tokens.append(TokenInfo(
                name=_dual_name(vname, base_alg, mono),
                fiber_name=vname,
                base_mono=mono,
                degree=v.degree - base_alg.monomial_degree(mono),
            ))

    # Working algebra: base generators first, then the tokens.
    work_gens = [(n, total_alg.by_name[n].degree) for n in f.base_names]
    work_gens += [(t.name, t.degree) for t in tokens]
    work_trunc = {
        base_alg.gens[gid].name: p for gid, p in base_alg.truncations.items()
    }
    work = Algebra(work_gens, work_trunc)

    token_alg = Algebra([(t.name, t.degree) for t in tokens])

    # Expansion v |-> sum_a a.(v|a); base generators map to themselves.
    expansion = {}
    for n in f.base_names:
        expansion[total_alg.by_name[n].gid] = work.gen(n)
    pos = 0
    token_index = {}
    for vname in f.fiber_names:
        v = total_alg.by_name[vname]
        val = work.zero()
        for mono in base_monos:
            t = tokens[pos]
            token_index[(vname, mono)] = pos
            base_part = work.monomial(mono, 1)  # same gids as base_alg
            val = val + base_part * work.gen(t.name)
            pos += 1
        expansion[v.gid] = val

    def expand(poly: Polynomial) -> Polynomial:
        out = work.zero()
        for mono, c in poly.terms.items():
            acc = work.one()
            for gid, e in mono:
                acc = acc * expansion[gid] ** e
                if not acc:
                    break
            out = out + acc.scale(c)
        return out

    # Read the differential off the expansion of D(v).
    diff = {t.name: token_alg.zero() for t in tokens}
    mono_to_slot = {m: i for i, m in enumerate(base_monos)}
    for vname in f.fiber_names:
        v = total_alg.by_name[vname]
        image = expand(f.total.diff[v.gid])
        per_mono = {}
        for wmono, c in image.terms.items():
            base_part = tuple((g, e) for g, e in wmono if g < nbase)
            tok_part = tuple((g - nbase, e) for g, e in wmono if g >= nbase)
            if base_part not in mono_to_slot:
                raise InvalidCdga(
                    f"expansion of D({vname}) produced a non-basis base part"
                )
            per_mono.setdefault(base_part, []).append((tok_part, c))
        for base_part, pairs in per_mono.items():
            t = tokens[token_index[(vname, base_part)]]
            diff[t.name] = diff[t.name] + token_alg.from_terms(pairs)

    cdga = Cdga(token_alg, diff, f.total.cutoff,
                label=f"Sec({f.family or f.total.label})")

    # Convention self-check: d~ must square to zero on every token.
    for t in tokens:
        dd = cdga.d(diff[t.name])
        if dd:
            raise InvalidCdga(
                f"section differential self-check failed: d~^2({t.name}) = {dd}"
            )

    model = SectionSpaceModel(cdga=cdga, fibration=f, dual=dual, tokens=tokens)
    model._by_pair = {(t.fiber_name, t.base_mono): t.name for t in tokens}
    return model


# ---------------------------------------------------------------------------
# Retractions
# ---------------------------------------------------------------------------


def _rational_roots(coeffs: dict) -> list:
    """All rational roots of sum_i coeffs[i] t^i, sorted."""
    coeffs = {i: Q(c) for i, c in coeffs.items() if c}
    if not coeffs:
        raise ValueError("identically zero polynomial has every root")
    roots = set()
    low = min(coeffs)
    if low > 0:
        roots.add(Q(0))
        coeffs = {i - low: c for i, c in coeffs.items()}
    if max(coeffs) == 0:
        return sorted(roots)
    # Clear denominators; candidates p/q with p | a_0, q | a_n.
    from math import gcd
    den = 1
    for c in coeffs.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {i: int(c * den) for i, c in coeffs.items()}
    deg = max(ints)
    a0, an = abs(ints.get(0, 0)), abs(ints[deg])

    def divisors(n):
        out = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                out.append(n // d)
            d += 1
        return out

    for p in divisors(a0):
        for q in divisors(an):
            for cand in (Q(p, q), Q(-p, q)):
                if sum(c * cand ** i for i, c in ints.items()) == 0:
                    roots.add(cand)
    return sorted(roots)


def _poly_eval(upoly: dict, state: dict):
    """Partially evaluate an unknown-polynomial {exps: coeff} under state."""
    out = {}
    for exps, coeff in upoly.items():
        c = coeff
        rest = []
        for name, e in exps:
            if name in state:
                c *= state[name] ** e
                if not c:
                    break
            else:
                rest.append((name, e))
        if not c:
            continue
        key = tuple(sorted(rest))
        s = out.get(key, Q(0)) + c
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def enumerate_components(f: FibrationModel):
    """All retractions of the total model onto the base, sorted by value.

    Solves the chain-map conditions phi(D v) = 0 in the untruncated base by
    triangular univariate rational root extraction; refuses inputs outside
    that scope with a diagnosis.
    """
    total_alg = f.total.algebra
    base_names = set(f.base_names)
    free_base = Algebra(
        [(n, total_alg.by_name[n].degree) for n in f.base_names]
    )

    # One unknown per fiber generator whose degree supports a base monomial.
    target_mono = {}
    for vname in f.fiber_names:
        deg = total_alg.by_name[vname].degree
        candidates = free_base.monomial_basis(deg)
        if len(candidates) > 1:
            raise UnsupportedRetractionSystem(
                f"retraction value of {vname} admits {len(candidates)} base "
                "monomials; only single-monomial (univariate) values are supported"
            )
        target_mono[vname] = candidates[0] if candidates else None

    # phi(D v) as {base monomial: polynomial in the unknowns}.
    equations = []
    for vname in f.fiber_names:
        dv = f.total.diff[total_alg.by_name[vname].gid]
        grouped = {}
        for mono, coeff in dv.terms.items():
            base_mono = ONE
            sign = Q1
            unknown = {}
            dead = False
            for gid, e in mono:
                g = total_alg.gens[gid]
                if g.name in base_names:
                    piece = ((free_base.by_name[g.name].gid, e),)
                else:
                    if target_mono[g.name] is None:
                        dead = True
                        break
                    piece = target_mono[g.name]
                    piece = tuple((gg, ee * e) for gg, ee in piece)
                    unknown[g.name] = unknown.get(g.name, 0) + e
                s, base_mono = _merge_free(free_base, base_mono, piece)
                if base_mono is None:
                    dead = True
                    break
                sign *= s
            if dead:
                continue
            key = tuple(sorted(unknown.items()))
            slot = grouped.setdefault(base_mono, {})
            c = slot.get(key, Q(0)) + sign * coeff
            if c:
                slot[key] = c
            else:
                slot.pop(key, None)
        for upoly in grouped.values():
            if upoly:
                equations.append(upoly)

    unknowns = sorted(n for n, m in target_mono.items() if m is not None)
    assignments = _solve_triangular(equations, unknowns)

    out = []
    for state in assignments:
        values = {}
        for vname in f.fiber_names:
            mono = target_mono[vname]
            c = state.get(vname, Q(0))
            if mono is None or not c:
                values[vname] = f.base.algebra.zero()
            else:
                values[vname] = f.base.algebra.monomial(mono, c)
        assignment = {n: f.base.algebra.gen(n) for n in f.base_names}
        assignment.update(values)
        morph = CdgaMorphism(f.total, f.base, assignment)
        bad = morph.validate()
        if bad:
            raise InvalidCdga(f"solved retraction fails validation: {bad[0]}")
        out.append(Retraction(fibration=f, values=values, morphism=morph))
    out.sort(key=Retraction.sort_key)
    return out


def _merge_free(alg: Algebra, mono, piece):
    sign, out = alg.mul_monomials(mono, tuple(sorted(piece)))
    return (Q(sign), out)


def _solve_triangular(equations, unknowns):
    """DFS over univariate conditions; returns the list of full assignments."""
    results = []

    def work(state):
        pending = []
        for eq in equations:
            reduced = _poly_eval(eq, state)
            if not reduced:
                continue
            if set(reduced) == {()}:
                return  # nonzero constant: no retraction on this branch
            pending.append(reduced)
        unresolved = [u for u in unknowns if u not in state]
        if not pending:
            if unresolved:
                raise UnsupportedRetractionSystem(
                    f"retraction value of {unresolved[0]} is unconstrained; "
                    "the component set is not finite"
                )
            results.append(dict(state))
            return
        # Pick a condition involving exactly one unresolved unknown.
        chosen = None
        for eq in pending:
            names = {n for exps in eq for n, _ in exps}
            if len(names) == 1:
                chosen = (next(iter(names)), eq)
                break
        if chosen is None:
            raise UnsupportedRetractionSystem(
                "retraction constraints are not triangular; "
                "supported scope exceeded"
            )
        name, eq = chosen
        coeffs = {}
        for exps, c in eq.items():
            power = exps[0][1] if exps else 0
            coeffs[power] = coeffs.get(power, Q(0)) + c
        for root in _rational_roots(coeffs):
            new_state = dict(state)
            new_state[name] = root
            work(new_state)

    work({})
    uniq = {tuple(sorted(s.items())): s for s in results}
    return [uniq[k] for k in sorted(uniq)]


# ---------------------------------------------------------------------------
# Component models
# ---------------------------------------------------------------------------


def component_model(s: SectionSpaceModel, r: Retraction) -> ComponentModel:
    """Evaluate degree-0 tokens at the retraction, drop nonpositive degrees.

    The substituted differential of every removed token must vanish (for
    degree-0 tokens this is the chain-map condition of the retraction); a
    nonzero residual aborts, since it would mean the positive-degree quotient
    is not a CDGA.
    """
    kept = [t for t in s.tokens if t.degree > 0]
    comp_alg = Algebra([(t.name, t.degree) for t in kept])

    values = {}
    for gid, t in enumerate(s.tokens):
        if t.degree > 0:
            values[gid] = comp_alg.gen(t.name)
        elif t.degree == 0:
            rv = r.values[t.fiber_name]
            coeff = rv.terms.get(t.base_mono, Q(0))
            values[gid] = comp_alg.scalar(coeff)
        else:
            values[gid] = comp_alg.zero()

    token_alg = s.cdga.algebra
    diff = {}
    for t in kept:
        gid = token_alg.by_name[t.name].gid
        diff[t.name] = substitute(s.cdga.diff[gid], values, comp_alg)
    for t in s.tokens:
        if t.degree > 0:
            continue
        gid = token_alg.by_name[t.name].gid
        residue = substitute(s.cdga.diff[gid], values, comp_alg)
        if residue:
            raise InvalidCdga(
                f"residual dependence on removed generator {t.name}: "
                f"substituted differential is {residue}, not 0"
            )

    cdga = Cdga(comp_alg, diff, s.cdga.cutoff,
                label=f"{s.cdga.label} component")
    cdga.validate_strict()
    return ComponentModel(cdga=cdga, retraction=r, section=s, kept=kept)
