"""Linear parts of basic vector fields at critical leaf closures.

Covers the index (sign of the determinant), the polar decomposition
``V_L = P @ Theta``, the multiplicity of the eigenvalue -1 of ``Theta`` (the
rank of the subbundle whose orientation bundle twists the local
contribution), compatibility with holonomy, and the two-stage path that
deforms ``V_L`` to a reflection-type orthogonal matrix without changing the
index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateLinearizationError, DimensionMismatchError
from .exact import as_rational
from .tolerances import DEFAULT_TOL, Tolerances


def _as_matrix(entries) -> np.ndarray:
    if isinstance(entries, np.ndarray):
        return np.array(entries, dtype=float)
    return np.array([[float(as_rational(v)) if isinstance(v, str) else float(v) for v in row] for row in entries])


@dataclass(frozen=True)
class Linearization:
    """Matrix of the linear part on the normal space of a critical leaf closure."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError(f"linearization {self.label!r} must be a non-empty square matrix")
        if not np.all(np.isfinite(m)):
            raise ValueError(f"linearization {self.label!r} has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def codim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PolarParts:
    P: np.ndarray
    Theta: np.ndarray
    minus_one_dim: int
    singular_values: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class HolonomyReport:
    commutes: bool
    with_linearization: bool
    with_P: bool
    with_Theta: bool
    max_residual: float


def _check_nondegenerate(matrix: np.ndarray, tol: Tolerances, label: str = "") -> np.ndarray:
    sv = np.linalg.svd(matrix, compute_uv=False)
    q = matrix.shape[0]
    smax = sv[0]
    if smax == 0.0 or np.prod(sv / smax) <= tol.degeneracy:
        raise DegenerateLinearizationError(
            f"linear part {label!r} is degenerate: |det| <= {tol.degeneracy:g} * sigma_max^{q}"
        )
    return sv


def index_of(lin: Linearization, tol: Tolerances = DEFAULT_TOL) -> int:
    """+1 or -1 according to the sign of ``det(V_L)``."""
    _check_nondegenerate(lin.matrix, tol, lin.label)
    sign, _ = np.linalg.slogdet(lin.matrix)
    return 1 if sign > 0 else -1


def _minus_one_multiplicity(theta: np.ndarray, tol: Tolerances) -> int:
    # a rotation by exactly pi contributes two eigenvalues -1, as it should
    eig = np.linalg.eigvals(theta)
    return int(np.sum(np.abs(eig + 1.0) < tol.minus_one))


def polar_decompose(lin: Linearization, tol: Tolerances = DEFAULT_TOL) -> PolarParts:
    """Left polar decomposition ``V_L = P @ Theta``.

    ``P = sqrt(V_L V_L^T)`` is symmetric positive definite and ``Theta`` is
    orthogonal; ``Theta`` coincides with the orthogonal factor of the right
    decomposition ``V_L = Theta @ sqrt(V_L^T V_L)``.
    """
    _check_nondegenerate(lin.matrix, tol, lin.label)
    u, s, vt = np.linalg.svd(lin.matrix)
    p = (u * s) @ u.T
    p = 0.5 * (p + p.T)
    theta = u @ vt
    return PolarParts(P=p, Theta=theta, minus_one_dim=_minus_one_multiplicity(theta, tol), singular_values=s)


def holonomy_commutes(
    lin: Linearization, gens: Sequence, tol: Tolerances = DEFAULT_TOL
) -> HolonomyReport:
    """Check that each holonomy generator commutes with ``V_L``, ``P`` and ``Theta``."""
    q = lin.codim
    mats = [_as_matrix(g) for g in gens]
    for g in mats:
        if g.shape != (q, q):
            raise DimensionMismatchError(f"holonomy element of shape {g.shape} on a {q}-dimensional normal space")
        if np.linalg.norm(g.T @ g - np.eye(q)) > tol.orthogonality * max(1.0, q):
            raise ValueError("holonomy generators must be orthogonal")
    parts = polar_decompose(lin, tol)

    def worst(a: np.ndarray) -> float:
        scale = max(np.linalg.norm(a), 1.0)
        return max((np.linalg.norm(g @ a - a @ g) / scale for g in mats), default=0.0)

    r_v, r_p, r_t = worst(lin.matrix), worst(parts.P), worst(parts.Theta)
    ok_v, ok_p, ok_t = r_v <= tol.commute, r_p <= tol.commute, r_t <= tol.commute
    return HolonomyReport(
        commutes=ok_v and ok_p and ok_t,
        with_linearization=ok_v,
        with_P=ok_p,
        with_Theta=ok_t,
        max_residual=float(max(r_v, r_p, r_t)),
    )


def _rotation_blocks(theta: np.ndarray):
    """Real Schur form ``theta = Z @ T @ Z.T`` with the 2x2 blocks located."""
    t, z = scipy.linalg.schur(theta, output="real")
    q = theta.shape[0]
    blocks = []
    i = 0
    while i < q:
        if i + 1 < q and abs(t[i + 1, i]) > 1e-14:
            blocks.append((i, 2))
            i += 2
        else:
            blocks.append((i, 1))
            i += 1
    return t, z, blocks


def _unwound(theta: np.ndarray, tau: float, tol: Tolerances) -> np.ndarray:
    """Scale every rotation angle of ``theta`` by ``1 - tau``; +-1 eigenvalues stay put."""
    t, z, blocks = _rotation_blocks(theta)
    out = np.zeros_like(t)
    for i, size in blocks:
        if size == 1:
            out[i, i] = -1.0 if t[i, i] < 0 else 1.0
            continue
        blk = t[i:i + 2, i:i + 2]
        # Schur blocks of a normal matrix are [[c, b], [d, c]] with b*d < 0
        c = 0.5 * (blk[0, 0] + blk[1, 1])
        s = np.sign(blk[1, 0]) * np.sqrt(abs(blk[0, 1] * blk[1, 0]))
        angle = (1.0 - tau) * np.arctan2(s, c)
        ca, sa = np.cos(angle), np.sin(angle)
        rot = np.array([[ca, -sa], [sa, ca]])
        out[i:i + 2, i:i + 2] = rot
    return z @ out @ z.T


def deformation_path(lin: Linearization, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Constant-index path from ``V_L`` (``t = 0``) to an orthogonal involution (``t = 1``).

    ``t`` in ``[0, 1/2]``: the eigenvalues of ``P`` move geometrically to 1,
    ``lambda**(1 - 2t)``, while ``Theta`` is held fixed.
    ``t`` in ``[1/2, 1]``: each rotation angle of ``Theta`` (away from 0 and
    pi) is scaled by ``2 - 2t``; eigenvalues +-1 are fixed.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"path parameter {t} outside [0, 1]")
    if t == 0.0:
        _check_nondegenerate(lin.matrix, tol, lin.label)
        return lin.matrix.copy()
    u, s, vt = np.linalg.svd(lin.matrix)
    _check_nondegenerate(lin.matrix, tol, lin.label)
    theta = u @ vt
    if t <= 0.5:
        tau = 2.0 * t
        p_t = (u * s ** (1.0 - tau)) @ u.T
        return p_t @ theta
    return _unwound(theta, 2.0 * t - 1.0, tol)


def path_index_constancy(lin: Linearization, samples: int = 100, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``sign det`` is constant and bounded away from zero along the path."""
    if samples < 2:
        raise ValueError("need at least two samples")
    target = index_of(lin, tol)
    for t in np.linspace(0.0, 1.0, samples):
        m = deformation_path(lin, float(t), tol)
        sv = np.linalg.svd(m, compute_uv=False)
        if np.prod(sv / sv[0]) <= tol.degeneracy:
            return False
        sign, _ = np.linalg.slogdet(m)
        if (1 if sign > 0 else -1) != target:
            return False
    return True
