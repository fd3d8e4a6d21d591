"""Basic Cech cochain complexes of finite basic open covers.

A cover is described combinatorially: the index set, the non-empty
intersections, and for each intersection the number of connected components
of its leaf space.  Basic functions that are locally constant on an
intersection form a vector space of dimension equal to that component count,
so the degree-``p`` cochain space is the direct sum of those spaces over all
``(p + 1)``-fold intersections.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import (
    BadComponentMapError,
    DegreeOutOfRangeError,
    DimensionMismatchError,
    MissingFaceError,
)
from .exact import SparseMatrix, as_rational

GOOD_COVER_NOTE = (
    "Cech cohomology of the given cover only; it equals basic de Rham cohomology "
    "when the cover is a basic good cover of a Riemannian foliation with all leaves "
    "closed. Neither hypothesis is checked here."
)

Label = Hashable
Simplex = tuple[int, ...]


def permutation_sign(indices: Sequence[int]) -> tuple[Simplex, int]:
    """Sort ``indices`` and return ``(sorted_tuple, sign)``.

    ``sign`` is the parity of the sorting permutation, or 0 if an index repeats
    (a cochain is alternating, so components with a repeated index vanish).
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


@dataclass(frozen=True)
class CoverNerve:
    """Finite basic open cover, described by its nerve and leaf-space components.

    ``intersections`` maps strictly increasing position tuples (positions into
    ``sets``) to component counts.  ``face_maps[(T, F)]`` lists, for every
    component of ``T``, the component of the facet ``F`` containing it; it may
    be omitted whenever ``F`` has a single component.
    """

    name: str
    sets: tuple[Label, ...]
    intersections: Mapping[Simplex, int]
    face_maps: Mapping[tuple[Simplex, Simplex], tuple[int, ...]] = field(default_factory=dict)

    @classmethod
    def from_labels(
        cls,
        name: str,
        sets: Sequence[Label],
        intersections: Sequence[tuple[Sequence[Label], int]] | Mapping,
        face_maps: Mapping | None = None,
    ) -> "CoverNerve":
        """Build a cover from set labels rather than positions.

        Singletons may be omitted from ``intersections``; they default to one
        component.  ``face_maps`` is keyed by ``(tuple_labels, facet_labels)``.
        Label tuples are sorted into index-set order.
        """
        sets = tuple(sets)
        pos = {lab: i for i, lab in enumerate(sets)}
        if len(pos) != len(sets):
            raise ValueError(f"cover {name!r}: duplicate set labels")

        def to_pos(labels) -> Simplex:
            try:
                p = [pos[lab] for lab in labels]
            except KeyError as exc:
                raise MissingFaceError(f"cover {name!r}: unknown set label {exc.args[0]!r}") from None
            simplex, sign = permutation_sign(p)
            if sign == 0:
                raise ValueError(f"cover {name!r}: repeated index in {tuple(labels)!r}")
            return simplex

        items = intersections.items() if isinstance(intersections, Mapping) else intersections
        inter: dict[Simplex, int] = {}
        for labels, count in items:
            key = to_pos(labels)
            if key in inter:
                raise ValueError(f"cover {name!r}: intersection {tuple(labels)!r} listed twice")
            inter[key] = count
        for i in range(len(sets)):
            inter.setdefault((i,), 1)
        fmaps = {}
        for (t_labels, f_labels), comp_map in (face_maps or {}).items():
            fmaps[(to_pos(t_labels), to_pos(f_labels))] = tuple(int(c) for c in comp_map)
        return cls(name=name, sets=sets, intersections=inter, face_maps=fmaps)

    @property
    def max_degree(self) -> int:
        return max(len(t) for t in self.intersections) - 1 if self.intersections else -1

    def simplices(self, degree: int) -> list[Simplex]:
        """Intersections of ``degree + 1`` sets, in insertion order."""
        return [t for t in self.intersections if len(t) == degree + 1]

    def components(self, simplex: Simplex) -> int:
        return self.intersections[simplex]

    def face_map(self, simplex: Simplex, facet: Simplex) -> tuple[int, ...]:
        key = (simplex, facet)
        if key in self.face_maps:
            return self.face_maps[key]
        if self.intersections[facet] == 1:
            return (0,) * self.intersections[simplex]
        raise BadComponentMapError(
            f"cover {self.name!r}: no component map from {self._fmt(simplex)} "
            f"to its facet {self._fmt(facet)} ({self.intersections[facet]} components)"
        )

    def _fmt(self, simplex: Simplex) -> str:
        return "(" + ",".join(str(self.sets[i]) for i in simplex) + ")"

    def validate(self) -> None:
        n = len(self.sets)
        for t, count in self.intersections.items():
            if not t or any(not (0 <= i < n) for i in t):
                raise MissingFaceError(f"cover {self.name!r}: tuple {t} not drawn from the index set")
            if any(a >= b for a, b in zip(t, t[1:])):
                raise ValueError(f"cover {self.name!r}: tuple {t} is not strictly increasing")
            if not isinstance(count, (int, np.integer)) or isinstance(count, bool) or count < 1:
                raise ValueError(
                    f"cover {self.name!r}: component count of {self._fmt(t)} must be a positive integer"
                )
        for i in range(n):
            if (i,) not in self.intersections:
                raise MissingFaceError(f"cover {self.name!r}: set {self.sets[i]!r} has no component count")
        for t in self.intersections:
            for k in range(1, len(t)):
                for face in combinations(t, k):
                    if face not in self.intersections:
                        raise MissingFaceError(
                            f"cover {self.name!r}: {self._fmt(t)} is non-empty "
                            f"but its face {self._fmt(face)} is not listed"
                        )
        for (t, f), comp_map in self.face_maps.items():
            if t not in self.intersections or f not in self.intersections:
                raise BadComponentMapError(f"cover {self.name!r}: component map for unlisted tuple {t}->{f}")
            if len(f) != len(t) - 1 or not set(f) <= set(t):
                raise BadComponentMapError(
                    f"cover {self.name!r}: {self._fmt(f)} is not a facet of {self._fmt(t)}"
                )
            if len(comp_map) != self.intersections[t]:
                raise BadComponentMapError(
                    f"cover {self.name!r}: map {self._fmt(t)}->{self._fmt(f)} has {len(comp_map)} "
                    f"entries, expected {self.intersections[t]}"
                )
            if any(not (0 <= c < self.intersections[f]) for c in comp_map):
                raise BadComponentMapError(
                    f"cover {self.name!r}: map {self._fmt(t)}->{self._fmt(f)} points outside "
                    f"the {self.intersections[f]} components of the facet"
                )
        # every needed map exists, and the two routes to a codimension-2 face agree
        for t in self.intersections:
            if len(t) < 2:
                continue
            facets = [t[:i] + t[i + 1:] for i in range(len(t))]
            maps = {f: self.face_map(t, f) for f in facets}
            if len(t) < 3:
                continue
            for i, j in combinations(range(len(t)), 2):
                fi, fj = facets[i], facets[j]
                ridge = tuple(x for x in t if x not in (t[i], t[j]))
                via_i = [self.face_map(fi, ridge)[c] for c in maps[fi]]
                via_j = [self.face_map(fj, ridge)[c] for c in maps[fj]]
                if via_i != via_j:
                    raise BadComponentMapError(
                        f"cover {self.name!r}: component maps from {self._fmt(t)} to "
                        f"{self._fmt(ridge)} disagree through {self._fmt(fi)} and {self._fmt(fj)}"
                    )

    def relabel(self, order: Sequence[int]) -> "CoverNerve":
        """Reorder the index set: new set ``k`` is old set ``order[k]``."""
        if sorted(order) != list(range(len(self.sets))):
            raise ValueError("order must be a permutation of the set positions")
        new_pos = {old: new for new, old in enumerate(order)}

        def move(t: Simplex) -> Simplex:
            return tuple(sorted(new_pos[i] for i in t))

        return CoverNerve(
            name=self.name,
            sets=tuple(self.sets[i] for i in order),
            intersections={move(t): c for t, c in self.intersections.items()},
            face_maps={(move(t), move(f)): m for (t, f), m in self.face_maps.items()},
        )


@dataclass(frozen=True)
class CechComplex:
    """Cochain spaces and coboundaries ``deltas[p]: C^p -> C^{p+1}``."""

    dims: tuple[int, ...]
    deltas: tuple[SparseMatrix, ...]
    bases: tuple[tuple[tuple[Simplex, int], ...], ...] = ()

    def __post_init__(self):
        if len(self.deltas) != max(len(self.dims) - 1, 0):
            raise DimensionMismatchError("need exactly one coboundary between consecutive degrees")
        for p, m in enumerate(self.deltas):
            if m.shape != (self.dims[p + 1], self.dims[p]):
                raise DimensionMismatchError(
                    f"delta^{p} has shape {m.shape}, expected {(self.dims[p + 1], self.dims[p])}"
                )

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def delta(self, degree: int) -> SparseMatrix:
        """Coboundary out of ``degree``; the zero map beyond the last listed degree."""
        if degree < 0 or degree > self.top_degree:
            raise DegreeOutOfRangeError(f"degree {degree} outside 0..{self.top_degree}")
        if degree < len(self.deltas):
            return self.deltas[degree]
        return SparseMatrix((0, self.dims[degree]))

    def is_cochain_complex(self) -> bool:
        return all((b @ a).is_zero() for a, b in zip(self.deltas, self.deltas[1:]))


@dataclass(frozen=True)
class CohomologySummary:
    betti: tuple[int, ...]
    euler: int
    dims: tuple[int, ...] = ()
    note: str = GOOD_COVER_NOTE

    def as_dict(self) -> dict:
        return {
            "betti": list(self.betti),
            "dims": list(self.dims),
            "euler": self.euler,
            "good_cover_hypothesis": "unverified",
            "note": self.note,
        }


def build_complex(cover: CoverNerve) -> CechComplex:
    """Assemble the alternating-restriction coboundaries of ``cover``.

    ``(delta w)_{a0..a(k+1)} = sum_i (-1)^i w_{a0..^ai..a(k+1)}``, restricted
    component-wise through the face maps.
    """
    cover.validate()
    top = cover.max_degree
    bases = []
    offsets: list[dict[Simplex, int]] = []
    for p in range(top + 1):
        basis = []
        offset = {}
        for t in cover.simplices(p):
            offset[t] = len(basis)
            basis.extend((t, c) for c in range(cover.components(t)))
        bases.append(tuple(basis))
        offsets.append(offset)
    dims = tuple(len(b) for b in bases)

    deltas = []
    for p in range(top):
        m = SparseMatrix((dims[p + 1], dims[p]))
        for t in cover.simplices(p + 1):
            row0 = offsets[p + 1][t]
            for i in range(len(t)):
                facet = t[:i] + t[i + 1:]
                comp_map = cover.face_map(t, facet)
                col0 = offsets[p][facet]
                sign = -1 if i % 2 else 1
                for c, fc in enumerate(comp_map):
                    m.add(row0 + c, col0 + fc, sign)
        deltas.append(m)
    return CechComplex(dims=dims, deltas=tuple(deltas), bases=tuple(bases))


def betti(complex_: CechComplex) -> CohomologySummary:
    ranks = [complex_.delta(p).rank() for p in range(complex_.top_degree + 1)]
    b = tuple(
        complex_.dims[p] - ranks[p] - (ranks[p - 1] if p > 0 else 0)
        for p in range(complex_.top_degree + 1)
    )
    euler = sum((-1) ** p * v for p, v in enumerate(b))
    return CohomologySummary(betti=b, euler=euler, dims=complex_.dims)


def cokernel_dim(complex_: CechComplex, degree: int) -> int:
    """``dim C^{degree+1} - rank delta^degree``; zero past the top degree."""
    m = complex_.delta(degree)
    return m.shape[0] - m.rank()


def cochain_value(complex_: CechComplex, cochain: Sequence, indices: Sequence[int], component: int = 0):
    """Evaluate a cochain on an arbitrary index sequence using the alternating convention.

    Swapping two indices flips the sign; repeated indices give zero.
    """
    simplex, sign = permutation_sign(indices)
    degree = len(indices) - 1
    if degree < 0 or degree > complex_.top_degree:
        raise DegreeOutOfRangeError(f"degree {degree} outside 0..{complex_.top_degree}")
    if len(cochain) != complex_.dims[degree]:
        raise DimensionMismatchError(f"cochain has {len(cochain)} entries, C^{degree} has {complex_.dims[degree]}")
    if sign == 0:
        return 0 * cochain[0] if len(cochain) else 0
    basis = complex_.bases[degree]
    try:
        k = basis.index((simplex, component))
    except ValueError:
        return 0 * cochain[0] if len(cochain) else 0
    return sign * cochain[k]


def group_average(form_coeffs: Sequence, group_action: Sequence[Sequence[Sequence]]) -> np.ndarray:
    """Average a coefficient vector over a finite group of linear maps.

    Exact ``Fraction`` arithmetic is used when every input entry is an int,
    Fraction, or rational string; otherwise the result is a float array.
    """
    if len(group_action) == 0:
        raise ValueError("group must have at least one element")
    n = len(form_coeffs)
    for g in group_action:
        if len(g) != n or any(len(row) != n for row in g):
            raise DimensionMismatchError(
                f"group element of shape {np.shape(g)} does not act on {n} coefficients"
            )

    def exact_ok(x) -> bool:
        return isinstance(x, (int, Fraction, str)) and not isinstance(x, bool)

    entries = list(form_coeffs) + [v for g in group_action for row in g for v in row]
    if all(exact_ok(v) for v in entries):
        x = [as_rational(v) for v in form_coeffs]
        total = [Fraction(0)] * n
        for g in group_action:
            for i, row in enumerate(g):
                total[i] += sum((as_rational(a) * b for a, b in zip(row, x)), Fraction(0))
        order = len(group_action)
        return np.array([v / order for v in total], dtype=object)

    x = np.asarray(form_coeffs, dtype=float)
    mats = np.asarray(group_action, dtype=float)
    return np.einsum("gij,j->i", mats, x) / len(mats)
