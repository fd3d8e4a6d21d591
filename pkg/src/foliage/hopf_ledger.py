"""Basic Hopf sums over critical leaf closures, checked against a direct Euler characteristic."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadIndexValueError, BettiShapeError, OddDegreeNonzeroError

# Twisted basic Euler characteristics that can be read off without computation.
CHI_PRESETS = {
    # a closed leaf that is a point of the leaf-closure space, trivial orientation bundle
    "point": 1,
    # leaf closure carrying a nowhere-tangent basic field, e.g. a torus with an irrational flow
    "irrational_torus": 0,
}


def chi_preset(name: str) -> int:
    try:
        return CHI_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown chi_b_twisted preset {name!r}; known: {sorted(CHI_PRESETS)}") from None


@dataclass(frozen=True)
class CriticalRecord:
    label: str
    index: int
    chi_b_twisted: int

    def __post_init__(self):
        if isinstance(self.index, bool) or self.index not in (-1, 1):
            raise BadIndexValueError(f"critical leaf closure {self.label!r}: index must be +1 or -1, got {self.index!r}")
        if isinstance(self.chi_b_twisted, bool) or int(self.chi_b_twisted) != self.chi_b_twisted:
            raise ValueError(f"critical leaf closure {self.label!r}: chi_b_twisted must be an integer")

    @property
    def contribution(self) -> int:
        return self.index * int(self.chi_b_twisted)


@dataclass(frozen=True)
class HopfReport:
    contributions: tuple[tuple[str, int, int, int], ...]  # (label, index, chi_b_twisted, product)
    hopf_sum: int
    chi_direct: int | None
    verdict: str  # "match" | "mismatch" | "unverified"

    @property
    def ok(self) -> bool:
        return self.verdict != "mismatch"

    def as_dict(self) -> dict:
        return {
            "leaf_closures": [
                {"label": lab, "index": ind, "chi_b_twisted": chi, "contribution": c}
                for lab, ind, chi, c in self.contributions
            ],
            "hopf_sum": self.hopf_sum,
            "chi_direct": self.chi_direct,
            "verdict": self.verdict,
        }


def _records(records: Iterable) -> list[CriticalRecord]:
    out = []
    for k, r in enumerate(records):
        if isinstance(r, CriticalRecord):
            out.append(r)
        else:
            index, chi = r
            out.append(CriticalRecord(label=f"L{k}", index=index, chi_b_twisted=chi))
    return out


def hopf_sum(records: Iterable) -> int:
    """``sum index * chi_b_twisted`` over critical leaf closures (0 if there are none).

    ``records`` holds ``CriticalRecord`` objects or ``(index, chi)`` pairs.
    """
    return sum(r.contribution for r in _records(records))


def verify(records: Iterable, chi_direct: int | None) -> HopfReport:
    recs = _records(records)
    total = sum(r.contribution for r in recs)
    if chi_direct is None:
        verdict = "unverified"
    else:
        verdict = "match" if total == int(chi_direct) else "mismatch"
    return HopfReport(
        contributions=tuple((r.label, r.index, int(r.chi_b_twisted), r.contribution) for r in recs),
        hopf_sum=total,
        chi_direct=None if chi_direct is None else int(chi_direct),
        verdict=verdict,
    )


def simple_form_check(records: Iterable) -> int | None:
    """Plain index count when every orientation-twisted characteristic is 1, else ``None``."""
    recs = _records(records)
    if any(r.chi_b_twisted != 1 for r in recs):
        return None
    return sum(r.index for r in recs)


def lower_bound_check(betti: Sequence[int]) -> int:
    """Euler characteristic of a Betti sequence concentrated in even degrees.

    The sequence runs from degree 0 to the (even) top degree, and the two
    endpoint values must agree as Poincare duality requires.  With
    ``betti[0] == 1`` the result is at least 2, so any nondegenerate basic
    field then needs at least two critical leaf closures.
    """
    b = [int(v) for v in betti]
    if any(v < 0 for v in b):
        raise BettiShapeError("Betti numbers are non-negative")
    if len(b) % 2 == 0:
        raise BettiShapeError(f"expected Betti numbers for degrees 0..2m (odd length), got length {len(b)}")
    odd = [j for j in range(1, len(b), 2) if b[j] != 0]
    if odd:
        raise OddDegreeNonzeroError(f"odd-degree Betti numbers must vanish; nonzero at degrees {odd}")
    if b[0] != b[-1]:
        raise BettiShapeError(f"endpoint Betti numbers differ ({b[0]} vs {b[-1]}); duality fails")
    chi = sum((-1) ** j * v for j, v in enumerate(b))
    if b[0] == 1 and len(b) > 1:
        assert chi >= 2
    return chi
