"""Sparse Gaussian elimination over the rationals.

Vectors are dicts mapping a hashable row key (usually a basis index) to a
nonzero Fraction.  Everything is exact; there are no tolerances anywhere.
"""

from __future__ import annotations

from fractions import Fraction

Q = Fraction


def axpy(dst: dict, src: dict, factor) -> dict:
    """dst - factor*src, as a fresh dict."""
    out = dict(dst)
    for k, v in src.items():
        s = out.get(k, Q(0)) - factor * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class Echelon:
    """Incremental echelon basis keyed by least row index."""

    def __init__(self):
        self.pivots = {}  # lead key -> vector

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        while vec:
            lead = min(vec)
            piv = self.pivots.get(lead)
            if piv is None:
                return vec
            vec = axpy(vec, piv, vec[lead] / piv[lead])
        return vec

    def add(self, vec: dict) -> bool:
        """Insert a vector; True iff it was independent of the span so far."""
        vec = self.reduce(vec)
        if not vec:
            return False
        self.pivots[min(vec)] = vec
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def column_reduce(columns):
    """Eliminate columns left to right, tracking the combination of each.

    Returns (pivots, kernel): pivots is a list of (reduced vector, combo) for
    the independent columns in insertion order, kernel a list of combos
    spanning the null space.  Combos are dicts {column index: Fraction}.
    """
    ech = Echelon()
    combos = {}  # lead key -> combo of the stored pivot
    pivots = []
    kernel = []
    for j, col in enumerate(columns):
        vec = dict(col)
        combo = {j: Q(1)}
        while vec:
            lead = min(vec)
            piv = ech.pivots.get(lead)
            if piv is None:
                break
            f = vec[lead] / piv[lead]
            vec = axpy(vec, piv, f)
            combo = axpy(combo, combos[lead], f)
        if vec:
            ech.pivots[min(vec)] = vec
            combos[min(vec)] = combo
            pivots.append((vec, combo))
        else:
            kernel.append(combo)
    return pivots, kernel


def image_and_kernel(columns):
    """Rank and kernel of the map sending basis vector j to columns[j]."""
    pivots, kernel = column_reduce(columns)
    return len(pivots), kernel
