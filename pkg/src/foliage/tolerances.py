"""Numerical tolerances, overridable through ``FOLIAGE_TOL`` or ``--tol``."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    degeneracy: float = 1e-10  # |det| <= degeneracy * sigma_max**q counts as singular
    minus_one: float = 1e-8  # |lambda + 1| below this counts as eigenvalue -1
    orthogonality: float = 1e-9
    commute: float = 1e-9  # relative commutator norm
    reconstruction: float = 1e-10
    kernel: float = 1e-8  # Laplacian eigenvalues at or below this are harmonic

    def override(self, text: str) -> "Tolerances":
        """Apply ``"1e-9"`` (every field) or ``"degeneracy=1e-9,kernel=1e-7"``."""
        names = {f.name for f in fields(self)}
        text = text.strip()
        if not text:
            return self
        if "=" not in text:
            value = float(text)
            return replace(self, **{n: value for n in names})
        changes = {}
        for part in text.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            if key not in names:
                raise ValueError(f"unknown tolerance {key!r}; known: {', '.join(sorted(names))}")
            changes[key] = float(value)
        return replace(self, **changes)

    @classmethod
    def from_env(cls, extra: str | None = None) -> "Tolerances":
        tol = cls()
        env = os.environ.get("FOLIAGE_TOL")
        if env:
            tol = tol.override(env)
        if extra:
            tol = tol.override(extra)
        return tol


DEFAULT_TOL = Tolerances()
