"""CDGAs over Q: validation, degreewise cohomology, morphisms, quasi-isos.

A Cdga is an Algebra together with a differential given on generators and
extended by the graded Leibniz rule.  Every instance carries an explicit
cutoff degree; all cohomological claims made by this module are "up to the
cutoff" and callers are expected to say so when reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graded import ONE, Algebra, BasisOverflow, Polynomial, Q
from . import linalg

DEFAULT_BASIS_BOUND = 200_000


class InvalidCdga(ValueError):
    pass


@dataclass
class BettiTable:
    """Per-degree dimensions of rational cohomology, degrees 0..cutoff."""

    dims: dict
    cutoff: int

    def __getitem__(self, k):
        return self.dims.get(k, 0)

    def nonzero(self):
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def total(self) -> int:
        return sum(self.dims.values())

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.cutoff == other.cutoff and self.nonzero() == other.nonzero()

    def __str__(self):
        body = ", ".join(f"{k}:{v}" for k, v in self.nonzero().items())
        return f"{{{body}}} up to degree {self.cutoff}"


class Cdga:
    """A graded-commutative differential algebra with an explicit cutoff."""

    def __init__(self, algebra: Algebra, differential, cutoff: int,
                 label: str = "", basis_bound: int = DEFAULT_BASIS_BOUND):
        self.algebra = algebra
        self.cutoff = int(cutoff)
        self.label = label
        self.basis_bound = basis_bound
        self.diff = {}
        zero = algebra.zero()
        for g in algebra.gens:
            self.diff[g.gid] = zero
        for name, poly in (differential or {}).items():
            gid = algebra.by_name[name].gid
            if poly is None:
                poly = zero
            if not isinstance(poly, Polynomial):
                raise TypeError(f"differential of {name!r} must be a Polynomial")
            if poly.algebra is not algebra:
                raise InvalidCdga(
                    f"differential of {name!r} mentions foreign generators"
                )
            self.diff[gid] = poly

    # -- basics -------------------------------------------------------------

    @property
    def generators(self):
        return self.algebra.gens

    def d_of(self, name: str) -> Polynomial:
        return self.diff[self.algebra.by_name[name].gid]

    def with_cutoff(self, cutoff: int) -> "Cdga":
        return Cdga(
            self.algebra,
            {g.name: self.diff[g.gid] for g in self.algebra.gens},
            cutoff, label=self.label, basis_bound=self.basis_bound,
        )

    def __repr__(self):
        return f"Cdga({self.label or self.algebra!r}, cutoff={self.cutoff})"

    def describe(self):
        """Deterministic listing: (name, degree, differential string)."""
        return [
            (g.name, g.degree, str(self.diff[g.gid]))
            for g in self.algebra.gens
        ]

    # -- differential --------------------------------------------------------

    def d_monomial(self, mono) -> Polynomial:
        alg = self.algebra
        out = alg.zero()
        prefix_degree = 0
        for i, (gid, e) in enumerate(mono):
            g = alg.gens[gid]
            dg = self.diff[gid]
            if dg:
                # m = u g^e w  ->  (-1)^{|u|} e * u g^{e-1} * dg * w
                stump = list(mono[:i])
                if e > 1:
                    stump.append((gid, e - 1))
                left = alg.monomial(tuple(stump), Q(e) * (-1) ** (prefix_degree % 2))
                right = alg.monomial(mono[i + 1:], 1)
                out = out + left * dg * right
            prefix_degree += g.degree * e
        return out

    def d(self, p: Polynomial) -> Polynomial:
        if p.algebra is not self.algebra:
            raise InvalidCdga("polynomial over a foreign generator set")
        out = self.algebra.zero()
        for mono, c in p.terms.items():
            out = out + self.d_monomial(mono).scale(c)
        return out

    # -- validation ------------------------------------------------------------

    def validate(self):
        """List of violations (empty means the CDGA axioms hold on generators)."""
        problems = []
        for g in self.algebra.gens:
            dg = self.diff[g.gid]
            if not dg:
                continue
            deg = dg.degree
            if deg == "mixed" or deg != g.degree + 1:
                problems.append(
                    f"d({g.name}) has degree {deg}, expected {g.degree + 1}"
                )
                continue
            dd = self.d(dg)
            if dd:
                problems.append(f"d^2({g.name}) = {dd} != 0")
        return problems

    def validate_strict(self):
        problems = self.validate()
        if problems:
            raise InvalidCdga("; ".join(problems))

    # -- cohomology --------------------------------------------------------------

    def basis(self, degree: int):
        return self.algebra.monomial_basis(degree, bound=self.basis_bound)

    def _d_columns(self, degree, basis_lo, index_hi):
        """Columns of d on basis_lo, in coordinates of the degree+1 basis."""
        cols = []
        for mono in basis_lo:
            dp = self.d_monomial(mono)
            col = {}
            for m, c in dp.terms.items():
                col[index_hi[m]] = c
            cols.append(col)
        return cols

    def cohomology(self, max_degree: int | None = None) -> BettiTable:
        if max_degree is None:
            max_degree = self.cutoff
        if max_degree > self.cutoff:
            raise ValueError(
                f"max_degree {max_degree} exceeds the cutoff {self.cutoff}"
            )
        bases = {k: self.basis(k) for k in range(0, max_degree + 2)}
        ranks = {}
        for k in range(0, max_degree + 1):
            hi = {m: i for i, m in enumerate(bases[k + 1])}
            cols = self._d_columns(k, bases[k], hi)
            ranks[k], _ = linalg.image_and_kernel(cols)
        dims = {}
        for k in range(0, max_degree + 1):
            dims[k] = len(bases[k]) - ranks[k] - ranks.get(k - 1, 0)
        return BettiTable(dims, max_degree)


class CdgaMorphism:
    """Algebra map between CDGAs, given on generators, extended multiplicatively."""

    def __init__(self, source: Cdga, target: Cdga, assignment):
        self.source = source
        self.target = target
        self.values = {}
        zero = target.algebra.zero()
        for g in source.algebra.gens:
            self.values[g.gid] = zero
        for name, poly in (assignment or {}).items():
            gid = source.algebra.by_name[name].gid
            if not isinstance(poly, Polynomial) or poly.algebra is not target.algebra:
                raise InvalidCdga(f"image of {name!r} is not a target polynomial")
            self.values[gid] = poly

    def apply(self, p: Polynomial) -> Polynomial:
        if p.algebra is not self.source.algebra:
            raise InvalidCdga("polynomial over a foreign generator set")
        out = self.target.algebra.zero()
        for mono, c in p.terms.items():
            acc = self.target.algebra.one()
            for gid, e in mono:
                acc = acc * self.values[gid] ** e
                if not acc:
                    break
            out = out + acc.scale(c)
        return out

    __call__ = apply

    def validate(self):
        problems = []
        for g in self.source.algebra.gens:
            img = self.values[g.gid]
            deg = img.degree
            if img and (deg == "mixed" or deg != g.degree):
                problems.append(
                    f"phi({g.name}) has degree {deg}, expected {g.degree}"
                )
        for g in self.source.algebra.gens:
            lhs = self.apply(self.source.diff[g.gid])
            rhs = self.target.d(self.values[g.gid])
            if lhs != rhs:
                problems.append(
                    f"phi(d {g.name}) = {lhs} but d(phi {g.name}) = {rhs}"
                )
        return problems

    def validate_strict(self):
        problems = self.validate()
        if problems:
            raise InvalidCdga("; ".join(problems))


def substitute(poly: Polynomial, values: dict, target: Algebra) -> Polynomial:
    """Multiplicative extension of gid -> target polynomial on one polynomial."""
    out = target.zero()
    for mono, c in poly.terms.items():
        acc = target.one()
        for gid, e in mono:
            acc = acc * values[gid] ** e
            if not acc:
                break
        out = out + acc.scale(c)
    return out


def transport(poly: Polynomial, target: Algebra) -> Polynomial:
    """Re-express a polynomial in an algebra containing the same gen names.

    Handles a change of canonical generator order, with the Koszul sign of
    the induced re-sorting.
    """
    src = poly.algebra
    pairs = []
    for mono, c in poly.terms.items():
        mapped = [
            (target.by_name[src.gens[g].name].gid, e, src.gens[g].is_odd)
            for g, e in mono
        ]
        sign = 1
        arr = []
        for item in mapped:  # insertion sort, counting odd-odd transpositions
            j = len(arr)
            while j > 0 and arr[j - 1][0] > item[0]:
                if arr[j - 1][2] and item[2]:
                    sign = -sign
                j -= 1
            arr.insert(j, item)
        pairs.append((tuple((g, e) for g, e, _ in arr), c * sign))
    return target.from_terms(pairs)


def identity_morphism(c: Cdga) -> CdgaMorphism:
    return CdgaMorphism(c, c, {g.name: c.algebra.gen(g.name) for g in c.algebra.gens})


def compose(outer: CdgaMorphism, inner: CdgaMorphism) -> CdgaMorphism:
    """outer o inner."""
    if inner.target is not outer.source:
        raise InvalidCdga("morphisms do not compose")
    assignment = {
        g.name: outer.apply(inner.values[g.gid])
        for g in inner.source.algebra.gens
    }
    return CdgaMorphism(inner.source, outer.target, assignment)


def quasi_iso_check(m: CdgaMorphism, max_degree: int) -> bool:
    """True iff m induces an isomorphism on cohomology in degrees <= max_degree."""
    src, tgt = m.source, m.target
    src_bases = {k: src.basis(k) for k in range(0, max_degree + 2)}
    tgt_bases = {k: tgt.basis(k) for k in range(0, max_degree + 2)}

    src_rank, src_kernel = {}, {}
    tgt_rank, tgt_cols = {}, {}
    for k in range(0, max_degree + 1):
        hi = {mono: i for i, mono in enumerate(src_bases[k + 1])}
        cols = src._d_columns(k, src_bases[k], hi)
        src_rank[k], src_kernel[k] = linalg.image_and_kernel(cols)
        hi_t = {mono: i for i, mono in enumerate(tgt_bases[k + 1])}
        cols_t = tgt._d_columns(k, tgt_bases[k], hi_t)
        tgt_rank[k], _ = linalg.image_and_kernel(cols_t)
        tgt_cols[k] = cols_t

    for k in range(0, max_degree + 1):
        h_src = len(src_kernel[k]) - src_rank.get(k - 1, 0)
        # target cocycle count = dim - rank of outgoing d
        tgt_kernel_dim = len(tgt_bases[k]) - tgt_rank[k]
        h_tgt = tgt_kernel_dim - tgt_rank.get(k - 1, 0)
        if h_src != h_tgt:
            return False
        if h_src == 0:
            continue
        # image of the induced map: rank(M(Z_src) + B_tgt) - rank(B_tgt)
        index_t = {mono: i for i, mono in enumerate(tgt_bases[k])}
        ech = linalg.Echelon()
        if k >= 1:
            for col in tgt_cols[k - 1]:
                ech.add(col)
        boundary_rank = ech.rank
        for combo in src_kernel[k]:
            # combo: coordinates over src_bases[k]
            img = tgt.algebra.zero()
            for j, c in combo.items():
                img = img + m.apply(
                    src.algebra.monomial(src_bases[k][j], 1)
                ).scale(c)
            vec = {index_t[mono]: c for mono, c in img.terms.items()}
            ech.add(vec)
        if ech.rank - boundary_rank != h_src:
            return False
    return True


def tensor(a: Cdga, b: Cdga, cutoff: int | None = None, label: str = "") -> Cdga:
    """Tensor product CDGA; generator names are suffixed on collision."""
    names = set()
    gens, trunc, diff_polys = [], {}, []
    renames = []
    for idx, c in enumerate((a, b)):
        ren = {}
        for g in c.algebra.gens:
            name = g.name
            counter = 2
            while name in names:
                name = f"{g.name}_{counter}"
                counter += 1
            names.add(name)
            ren[g.name] = name
            gens.append((name, g.degree))
        for gid, p in c.algebra.truncations.items():
            trunc[ren[c.algebra.gens[gid].name]] = p
        renames.append(ren)
    alg = Algebra(gens, trunc)

    def transport(c: Cdga, ren, poly: Polynomial) -> Polynomial:
        pairs = []
        for mono, coeff in poly.terms.items():
            new = tuple(
                sorted((alg.by_name[ren[c.algebra.gens[g].name]].gid, e)
                       for g, e in mono)
            )
            pairs.append((new, coeff))
        return alg.from_terms(pairs)

    differential = {}
    for c, ren in zip((a, b), renames):
        for g in c.algebra.gens:
            differential[ren[g.name]] = transport(c, ren, c.diff[g.gid])
    if cutoff is None:
        cutoff = max(a.cutoff, b.cutoff)
    return Cdga(alg, differential, cutoff, label=label or f"{a.label}(x){b.label}")
