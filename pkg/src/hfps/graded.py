"""Graded-commutative polynomial arithmetic over Q with Koszul signs.

Generators carry an integer cohomological degree.  Odd-degree generators
anticommute and square to zero; even-degree generators are central.  The only
relations supported beyond graded commutativity are monomial truncations
g^p = 0; every algebra needed here has that shape, so no general Groebner
machinery is involved.

Coefficients are exact rationals (fractions.Fraction) throughout.  Values are
immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Q = Fraction

#: The empty monomial (the unit of the algebra).
ONE: tuple = ()


class GeneratorMismatch(ValueError):
    """Raised when combining polynomials over different generator sets."""


class BasisOverflow(RuntimeError):
    """A degreewise monomial basis exceeded the configured bound."""

    def __init__(self, degree: int, bound: int):
        self.degree = degree
        self.bound = bound
        super().__init__(
            f"monomial basis in degree {degree} exceeds the bound {bound}"
        )


@dataclass(frozen=True)
class Generator:
    gid: int
    name: str
    degree: int

    @property
    def is_odd(self) -> bool:
        return self.degree % 2 != 0

    def __repr__(self):
        return f"<{self.name}:{self.degree}>"


class Algebra:
    """Free graded-commutative algebra on named generators, modulo g^p = 0.

    Monomials are tuples of (gid, exponent) pairs sorted by gid; the gid order
    is the canonical monomial order, and every Koszul sign is computed by
    counting odd-odd transpositions while merging sorted factor lists.
    """

    def __init__(self, gens, truncations=None):
        seen = set()
        out = []
        for i, (name, degree) in enumerate(gens):
            if name in seen:
                raise ValueError(f"duplicate generator name {name!r}")
            seen.add(name)
            out.append(Generator(i, name, int(degree)))
        self.gens = tuple(out)
        self.by_name = {g.name: g for g in self.gens}
        self.truncations = {}
        for name, power in (truncations or {}).items():
            power = int(power)
            if power < 1:
                raise ValueError(f"truncation power for {name!r} must be >= 1")
            self.truncations[self.by_name[name].gid] = power

    # -- identity ---------------------------------------------------------

    def signature(self):
        return (
            tuple((g.name, g.degree) for g in self.gens),
            tuple(sorted(self.truncations.items())),
        )

    def __repr__(self):
        names = ",".join(g.name for g in self.gens)
        return f"Algebra({names})"

    # -- monomials --------------------------------------------------------

    def monomial_degree(self, mono) -> int:
        return sum(self.gens[gid].degree * e for gid, e in mono)

    def reduce_monomial(self, mono):
        """Canonical form of a sorted (gid, exp) tuple, or None if it is 0."""
        for gid, e in mono:
            if e < 1:
                raise ValueError("exponents must be >= 1")
            if self.gens[gid].is_odd and e > 1:
                return None
            p = self.truncations.get(gid)
            if p is not None and e >= p:
                return None
        return mono

    def mul_monomials(self, a, b):
        """Product of two canonical monomials: (sign, monomial or None)."""
        # Koszul sign: one -1 per odd factor of b passing an odd factor of a
        # with larger gid while the concatenation a|b is re-sorted.
        odd_a = [gid for gid, _ in a if self.gens[gid].is_odd]
        sign = 1
        if odd_a:
            for gid_b, _ in b:
                if self.gens[gid_b].is_odd:
                    crossings = sum(1 for ga in odd_a if ga > gid_b)
                    if crossings % 2:
                        sign = -sign
        merged = dict(a)
        for gid, e in b:
            merged[gid] = merged.get(gid, 0) + e
        mono = self.reduce_monomial(tuple(sorted(merged.items())))
        return sign, mono

    def monomial_basis(self, degree: int, bound: int | None = None):
        """All canonical monomials of exactly the given degree.

        Raises ValueError when the basis cannot be finite (an untruncated even
        generator of degree <= 0) and BasisOverflow past `bound`.
        """
        gens = self.gens
        caps = []
        for g in gens:
            p = self.truncations.get(g.gid)
            if g.is_odd:
                cap = 1 if (p is None or p > 1) else 0
            elif p is not None:
                cap = p - 1
            elif g.degree > 0:
                cap = None  # bounded by the remaining degree at runtime
            else:
                raise ValueError(
                    f"monomial basis is infinite: even generator {g.name!r} of "
                    f"degree {g.degree} carries no truncation"
                )
            caps.append(cap)

        n = len(gens)
        # Degree range contributed by generators i..end, for pruning.
        tail_lo = [0] * (n + 1)
        tail_hi = [0] * (n + 1)  # None in tail_hi_unbounded marks +infinity
        unbounded_pos = [False] * (n + 1)
        for i in range(n - 1, -1, -1):
            g, cap = gens[i], caps[i]
            lo, hi = 0, 0
            if cap is None:
                unbounded_pos[i] = True
            else:
                span = cap * g.degree
                lo, hi = min(0, span), max(0, span)
            tail_lo[i] = tail_lo[i + 1] + lo
            tail_hi[i] = tail_hi[i + 1] + hi
            unbounded_pos[i] = unbounded_pos[i] or unbounded_pos[i + 1]

        out = []

        def rec(i, remaining, acc):
            if i == n:
                if remaining == 0:
                    out.append(tuple(acc))
                    if bound is not None and len(out) > bound:
                        raise BasisOverflow(degree, bound)
                return
            if remaining < tail_lo[i]:
                return
            if not unbounded_pos[i] and remaining > tail_hi[i]:
                return
            g, cap = gens[i], caps[i]
            if cap is None:
                cap = remaining // g.degree if remaining >= 0 else -1
            for e in range(0, cap + 1):
                if e:
                    acc.append((g.gid, e))
                rec(i + 1, remaining - e * g.degree, acc)
                if e:
                    acc.pop()

        rec(0, degree, [])
        out.sort()
        return out

    def all_monomials(self, bound: int | None = None):
        """Every monomial of a finite-dimensional algebra, sorted by degree.

        Requires every even generator to be truncated.
        """
        caps = []
        for g in self.gens:
            p = self.truncations.get(g.gid)
            if g.is_odd:
                caps.append(1 if (p is None or p > 1) else 0)
            elif p is not None:
                caps.append(p - 1)
            else:
                raise ValueError(
                    f"algebra is not finite dimensional: {g.name!r} untruncated"
                )
        out = [ONE]
        for g, cap in zip(self.gens, caps):
            out = [
                m + ((g.gid, e),) if e else m
                for m in out
                for e in range(cap + 1)
            ]
            if bound is not None and len(out) > bound:
                raise BasisOverflow(-1, bound)
        out.sort(key=lambda m: (self.monomial_degree(m), m))
        return out

    # -- polynomial constructors -------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {ONE: Q(1)})

    def scalar(self, c) -> "Polynomial":
        c = Q(c)
        return Polynomial(self, {ONE: c} if c else {})

    def gen(self, name: str) -> "Polynomial":
        g = self.by_name[name]
        mono = self.reduce_monomial(((g.gid, 1),))
        return Polynomial(self, {mono: Q(1)} if mono is not None else {})

    def monomial(self, mono, coeff=1) -> "Polynomial":
        coeff = Q(coeff)
        mono = self.reduce_monomial(tuple(sorted(mono)))
        if mono is None or not coeff:
            return self.zero()
        return Polynomial(self, {mono: coeff})

    def from_terms(self, pairs) -> "Polynomial":
        terms = {}
        for mono, coeff in pairs:
            coeff = Q(coeff)
            mono = self.reduce_monomial(tuple(sorted(mono)))
            if mono is None or not coeff:
                continue
            c = terms.get(mono, Q(0)) + coeff
            if c:
                terms[mono] = c
            else:
                terms.pop(mono, None)
        return Polynomial(self, terms)

    def monomial_str(self, mono) -> str:
        if not mono:
            return "1"
        parts = []
        for gid, e in mono:
            name = self.gens[gid].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)


class Polynomial:
    """Exact-rational linear combination of canonical monomials.

    Never mutated after construction; `terms` maps monomial -> nonzero
    Fraction.  Arithmetic checks that both operands live over the same
    Algebra object.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms: dict):
        self.algebra = algebra
        self.terms = terms

    # -- helpers -----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.algebra is not other.algebra:
            raise GeneratorMismatch(
                f"operands over different generator sets: "
                f"{self.algebra!r} vs {other.algebra!r}"
            )

    @property
    def degree(self):
        """Homogeneous degree, None for the zero polynomial, else 'mixed'."""
        degs = {self.algebra.monomial_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) == 1:
            return degs.pop()
        return "mixed"

    def is_homogeneous(self) -> bool:
        return self.degree != "mixed"

    # -- arithmetic ----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.algebra is other.algebra and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((id(self.algebra), tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.algebra.scalar(other)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, Q(0)) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.algebra.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = Q(c)
        if not c:
            return self.algebra.zero()
        return Polynomial(self.algebra, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        alg = self.algebra
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sign, mono = alg.mul_monomials(ma, mb)
                if mono is None:
                    continue
                c = terms.get(mono, Q(0)) + sign * ca * cb
                if c:
                    terms[mono] = c
                else:
                    terms.pop(mono, None)
        return Polynomial(alg, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    # -- rendering -----------------------------------------------------------

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda mc: (self.algebra.monomial_degree(mc[0]), mc[0]),
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            mstr = self.algebra.monomial_str(mono)
            if mono == ONE:
                body = str(coeff)
            elif coeff == 1:
                body = mstr
            elif coeff == -1:
                body = f"-{mstr}"
            else:
                body = f"{coeff} {mstr}"
            parts.append(body)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"
