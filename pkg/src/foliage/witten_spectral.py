"""Galerkin discretization of rotationally reduced basic de Rham complexes.

The transverse geometry handled here is a warped product
``dr^2 + w(r)^2 dtheta^2`` over a one-dimensional leaf-closure space
(the half circle ``[0, pi]`` with reflection conditions at both ends, or a full
circle).  Forms invariant under the angular direction split into two copies of
the 1D complex ``f -> f' dr``::

    degree 0:  f                    (radial family A0)
    degree 1:  a e^r  +  b e^theta  (A1 and a second copy of A1)
    degree 2:  c e^r ^ e^theta      (second copy of A0)

with ``d(b e^theta) = (w b)'/w e^r ^ e^theta``, which is minus the weighted
adjoint of ``d`` on the first copy.  With ``angular=False`` only the first copy
(degrees 0 and 1) is kept.

Each family is a trigonometric basis selected by the reflection parities at the
two endpoints (cos/sin with integer or half-integer frequencies), so ``d`` maps
basis functions to basis functions exactly and ``d o d = 0`` holds without
round-off.  Inner products use the weight ``w`` and Gauss-Legendre quadrature.

All spectral operators are formed in coordinates orthonormal for the weighted
inner product, where adjoints are transposes.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import (
    BadParityError,
    LocalizationPreconditionError,
    NegativeWeightError,
    NonIntegerSupertraceError,
    SpectralGapTooSmallError,
)

DEFAULT_MODES = 64
MIN_MODES = 8
ROUNDING_MARGIN = 0.25
DEFAULT_KERNEL_TOL = 1e-8

_PARITY_WORDS = {"even": 1.0, "odd": -1.0, "+": 1.0, "-": -1.0}


# --------------------------------------------------------------------------- bases


def parity_sign(value) -> float:
    if isinstance(value, str):
        try:
            return _PARITY_WORDS[value.strip().lower()]
        except KeyError:
            raise BadParityError(f"unknown parity {value!r}; use 'even' or 'odd'") from None
    return float(value)


def parity_projector(sign: float, n: int = 8) -> np.ndarray:
    """Projector ``(I + sign * R) / 2`` for the reflection ``R`` of a symmetric ``n``-point grid."""
    r = np.fliplr(np.eye(n))
    return 0.5 * (np.eye(n) + sign * r)


def check_parity(sign: float) -> None:
    p = parity_projector(sign)
    if not np.allclose(p @ p, p, atol=1e-12):
        raise BadParityError(f"parity sign {sign!r} does not give an idempotent projector")


@dataclass(frozen=True)
class Family:
    """Trigonometric family on one interval.

    ``kind`` is ``cos`` or ``sin`` (with ``frequencies`` possibly half-integers)
    or ``fourier`` on the full circle, whose basis is
    ``1, cos x, sin x, cos 2x, sin 2x, ...``.
    """

    kind: str
    frequencies: tuple[float, ...]

    def __len__(self) -> int:
        if self.kind == "fourier":
            return sum(1 if f == 0 else 2 for f in self.frequencies)
        return len(self.frequencies)

    def _terms(self) -> list[tuple[str, float]]:
        if self.kind == "fourier":
            terms = []
            for f in self.frequencies:
                terms.append(("cos", f))
                if f != 0:
                    terms.append(("sin", f))
            return terms
        return [(self.kind, f) for f in self.frequencies]

    def values(self, x: np.ndarray) -> np.ndarray:
        """Basis functions at ``x``, shape ``(len(x), len(self))``."""
        cols = [np.cos(f * x) if k == "cos" else np.sin(f * x) for k, f in self._terms()]
        return np.stack(cols, axis=1) if cols else np.zeros((len(x), 0))

    def derivative_to(self, target: "Family") -> np.ndarray:
        """Exact matrix of ``d/dx`` from this family into ``target``."""
        index = {term: i for i, term in enumerate(target._terms())}
        m = np.zeros((len(target), len(self)))
        for j, (kind, f) in enumerate(self._terms()):
            if f == 0:
                continue
            if kind == "cos":
                m[index[("sin", f)], j] = -f
            else:
                m[index[("cos", f)], j] = f
        return m


def family_for(parity: tuple[float, float] | None, modes: int, interval: str) -> Family:
    """Basis for a coefficient with the given endpoint parities."""
    if interval == "circle":
        return Family("fourier", tuple(float(k) for k in range(modes)))
    left, right = parity
    if left == right:
        kind = "cos" if left > 0 else "sin"
        start = 0 if left > 0 else 1
        return Family(kind, tuple(float(k) for k in range(start, modes)))
    kind = "cos" if left > 0 else "sin"
    return Family(kind, tuple(k + 0.5 for k in range(modes)))


# --------------------------------------------------------------------------- profile


def _example1_field(x):
    v = np.sin(x) * np.cos(x)
    return v, v


def _example2_field(x):
    return np.sin(x), np.zeros_like(x)


def _zero_field(x):
    return np.zeros_like(x), np.zeros_like(x)


FIELD_PRESETS: dict[str, Callable] = {
    "example1": _example1_field,
    "example2": _example2_field,
    "zero": _zero_field,
}
WEIGHT_PRESETS: dict[str, Callable] = {
    "sin": np.sin,
    "one": np.ones_like,
}


@dataclass(frozen=True)
class SpectralProfile:
    """Input for the reduced basic complex.

    ``weight`` and the field components are preset names or samples on the
    uniform grid ``linspace(a, b, m)`` spanning the interval; ``field`` holds
    the radial (``e^r``) and angular (``e^theta``) components of the vector field
    in the orthonormal frame.
    """

    modes: int = DEFAULT_MODES
    interval: str = "half"  # "half" = [0, pi] with reflections, "circle" = [0, 2 pi) periodic
    parity: tuple[tuple, tuple] | None = (("even", "even"), ("odd", "odd"))
    weight: str | tuple[float, ...] = "one"
    field: str | tuple[tuple[float, ...], tuple[float, ...]] = "zero"
    angular: bool = True
    s_values: tuple[float, ...] = (0.0, 1.0, 5.0, 20.0)
    t_values: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0)
    witten_t: float = 0.5
    crit_regions: tuple[float, ...] = ()
    rho: float = 0.25
    kernel_tol: float = DEFAULT_KERNEL_TOL
    name: str = ""

    @property
    def bounds(self) -> tuple[float, float]:
        return (0.0, math.pi) if self.interval == "half" else (0.0, 2.0 * math.pi)

    def parity_signs(self) -> tuple[tuple[float, float], tuple[float, float]] | None:
        if self.interval == "circle":
            return None
        (l0, r0), (l1, r1) = self.parity
        return (parity_sign(l0), parity_sign(r0)), (parity_sign(l1), parity_sign(r1))

    def weight_fn(self) -> Callable:
        if isinstance(self.weight, str):
            try:
                return WEIGHT_PRESETS[self.weight]
            except KeyError:
                raise ValueError(f"unknown weight preset {self.weight!r}") from None
        samples = np.asarray(self.weight, dtype=float)
        grid = np.linspace(*self.bounds, len(samples))
        # shape-preserving, so non-negative samples give a non-negative weight
        return PchipInterpolator(grid, samples)

    def field_fn(self) -> Callable:
        if isinstance(self.field, str):
            try:
                return FIELD_PRESETS[self.field]
            except KeyError:
                raise ValueError(f"unknown field preset {self.field!r}") from None
        radial, angular = (np.asarray(c, dtype=float) for c in self.field)
        grid_r = np.linspace(*self.bounds, len(radial))
        grid_a = np.linspace(*self.bounds, len(angular))
        bc = "periodic" if self.interval == "circle" else "not-a-knot"
        fr = CubicSpline(grid_r, radial, bc_type=bc) if len(radial) > 1 else (lambda x: np.zeros_like(x))
        fa = CubicSpline(grid_a, angular, bc_type=bc) if len(angular) > 1 else (lambda x: np.zeros_like(x))
        return lambda x: (fr(x), fa(x))

    def validate(self, strict: bool = True) -> None:
        if self.interval not in ("half", "circle"):
            raise ValueError(f"interval must be 'half' or 'circle', got {self.interval!r}")
        if not isinstance(self.modes, int) or self.modes < 1:
            raise ValueError("modes must be a positive integer")
        if strict and self.modes < MIN_MODES:
            raise ValueError(f"modes must be at least {MIN_MODES}")
        signs = self.parity_signs()
        if signs is not None:
            for s in (*signs[0], *signs[1]):
                check_parity(s)
            if signs[1] != (-signs[0][0], -signs[0][1]):
                raise BadParityError(
                    "degree-1 parities must be the flips of the degree-0 parities "
                    "(differentiation reverses reflection parity)"
                )
        if any(t <= 0 for t in self.t_values) or self.witten_t <= 0:
            raise ValueError("heat times must be positive")
        if self.rho <= 0:
            raise ValueError("rho must be positive")


def preset_profile(name: str, modes: int = DEFAULT_MODES) -> SpectralProfile:
    """Reductions of the two suspension examples.

    ``example1``: round 2-sphere modulo rotations, coordinate the polar angle
    on ``[0, pi]``, weight ``sin``, field ``cos(phi) d_theta + sin(phi)cos(phi) d_phi``.
    ``example2``: flat torus modulo translations in the first angle and the
    reflection ``theta -> 2 pi - theta`` in the second, which folds the
    circle onto ``[0, pi]``; weight 1, field ``sin(theta) d_theta``.
    """
    if name == "example1":
        return SpectralProfile(
            modes=modes, interval="half", weight="sin", field="example1",
            crit_regions=(0.0, math.pi / 2, math.pi), name="example1",
        )
    if name == "example2":
        return SpectralProfile(
            modes=modes, interval="half", weight="one", field="example2",
            crit_regions=(0.0, math.pi), name="example2",
        )
    raise ValueError(f"unknown spectral preset {name!r}")


# --------------------------------------------------------------------------- assembly


@dataclass(frozen=True)
class Component:
    degree: int
    family: Family
    role: str  # "radial" or "angular"
    offset: int  # start in the total (all-degree) coordinate vector


@dataclass(eq=False)
class BasicComplexMatrices:
    """Discretized basic complex.

    Raw-basis data (``d``, ``delta``, ``gram``) are indexed by degree and act on
    trigonometric coefficients.  ``D``, ``H`` and ``normV2`` act on the total
    space in weighted-orthonormal coordinates, ordered by degree.
    """

    degree_dims: tuple[int, ...]
    components: tuple[Component, ...]
    d: tuple[np.ndarray, ...]
    delta: tuple[np.ndarray, ...]
    gram: tuple[np.ndarray, ...]
    D: np.ndarray
    H: np.ndarray
    normV2: np.ndarray
    nodes: np.ndarray
    quad_weights: np.ndarray  # Gauss-Legendre weights times the density w
    bounds: tuple[float, float]
    interval: str
    kernel_tol: float = DEFAULT_KERNEL_TOL
    orth_values: tuple[np.ndarray, ...] = field(default=(), repr=False)
    field_values: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)
    weight_fn: Callable | None = field(default=None, repr=False)
    field_fn: Callable | None = field(default=None, repr=False)

    @property
    def top_degree(self) -> int:
        return len(self.degree_dims) - 1

    @property
    def total_dim(self) -> int:
        return int(sum(self.degree_dims))

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.degree_dims)), self.degree_dims)

    @cached_property
    def even(self) -> np.ndarray:
        return self.degrees % 2 == 0

    def degree_slice(self, j: int) -> slice:
        start = int(sum(self.degree_dims[:j]))
        return slice(start, start + self.degree_dims[j])

    def deformed(self, s: float) -> np.ndarray:
        """``D_s = D + s H`` in orthonormal coordinates."""
        return self.D + s * self.H

    def squared(self, s: float) -> np.ndarray:
        ds = self.deformed(s)
        q = ds @ ds
        return 0.5 * (q + q.T)

    @cached_property
    def laplacian_spectra(self) -> tuple[np.ndarray, ...]:
        q = self.squared(0.0)
        return tuple(
            np.linalg.eigvalsh(q[self.degree_slice(j), self.degree_slice(j)])
            for j in range(len(self.degree_dims))
        )

    def laplacian(self, j: int) -> np.ndarray:
        sl = self.degree_slice(j)
        return self.squared(0.0)[sl, sl]


def _quadrature(bounds: tuple[float, float], n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    a, b = bounds
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


def _orthonormalize(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    gram = values.T @ (weights[:, None] * values)
    gram = 0.5 * (gram + gram.T)
    if gram.size == 0:
        return gram, np.zeros((0, 0)), values
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise NegativeWeightError("weighted Gram matrix is not positive definite; the weight vanishes on an interval") from None
    orth = scipy.linalg.solve_triangular(chol, values.T, lower=True).T
    return gram, chol, orth


def assemble(profile: SpectralProfile, *, strict: bool = True) -> BasicComplexMatrices:
    """Discretize the basic complex described by ``profile``.

    ``strict=False`` relaxes the minimum basis size (useful for tiny
    hand-checkable complexes).
    """
    profile.validate(strict=strict)
    bounds = profile.bounds
    n_quad = 4 * profile.modes + 32
    nodes, gl_weights = _quadrature(bounds, n_quad)
    weight_fn = profile.weight_fn()
    w = np.asarray(weight_fn(nodes), dtype=float)
    if np.any(w < 0):
        raise NegativeWeightError("weight takes negative values")
    if not np.sum(gl_weights * w) > 0:
        raise NegativeWeightError("weight must have positive integral")
    qw = gl_weights * w

    signs = profile.parity_signs()
    fam0 = family_for(signs[0] if signs else None, profile.modes, profile.interval)
    fam1 = family_for(signs[1] if signs else None, profile.modes, profile.interval)

    b0, b1 = fam0.values(nodes), fam1.values(nodes)
    g0, c0, p0 = _orthonormalize(b0, qw)
    g1, c1, p1 = _orthonormalize(b1, qw)
    n0, n1 = len(fam0), len(fam1)

    d_raw = fam0.derivative_to(fam1)
    # adjoint of d for the weighted inner product, in raw coefficients
    delta_raw = np.linalg.solve(g0, d_raw.T @ g1) if n0 else np.zeros((0, n1))
    # orthonormal d: L1^T d L0^{-T}
    d_orth = c1.T @ scipy.linalg.solve_triangular(c0, d_raw.T, lower=True).T if n0 and n1 else np.zeros((n1, n0))

    field_fn = profile.field_fn()
    vr, va = (np.asarray(v, dtype=float) for v in field_fn(nodes))
    m_r = p1.T @ ((qw * vr)[:, None] * p0)
    m_a = p1.T @ ((qw * va)[:, None] * p0)
    norm2 = vr**2 + va**2
    mult0 = p0.T @ ((qw * norm2)[:, None] * p0)
    mult1 = p1.T @ ((qw * norm2)[:, None] * p1)

    if profile.angular:
        dims = (n0, 2 * n1, n0)
        comps = (
            Component(0, fam0, "radial", 0),
            Component(1, fam1, "radial", n0),
            Component(1, fam1, "angular", n0 + n1),
            Component(2, fam0, "angular", n0 + 2 * n1),
        )
        total = 2 * (n0 + n1)
        o1, o1a, o2 = n0, n0 + n1, n0 + 2 * n1
        D = np.zeros((total, total))
        D[o1:o1a, :n0] = d_orth
        D[o2:, o1a:o2] = -d_orth.T
        D = D + D.T
        H = np.zeros((total, total))
        # V^flat wedge: degree 0 -> 1, and (a, b) -> v_r b - v_a a on degree 1 -> 2
        H[o1:o1a, :n0] = m_r
        H[o1a:o2, :n0] = m_a
        H[o2:, o1:o1a] = -m_a.T
        H[o2:, o1a:o2] = m_r.T
        H = H + H.T  # interior product is the transpose
        normV2 = scipy.linalg.block_diag(mult0, mult1, mult1, mult0)
        zero01 = np.zeros((n1, n0))
        d_list = (
            np.vstack([d_raw, zero01]),
            np.hstack([np.zeros((n0, n1)), -delta_raw]),
        )
        gram = (g0, scipy.linalg.block_diag(g1, g1), g0)
        # delta_j = G_j^{-1} d_j^T G_{j+1}
        delta_list = tuple(
            np.linalg.solve(gram[j], d_list[j].T @ gram[j + 1]) for j in range(2)
        )
        orth_values = (p0, p1, p1, p0)
    else:
        dims = (n0, n1)
        comps = (Component(0, fam0, "radial", 0), Component(1, fam1, "radial", n0))
        total = n0 + n1
        D = np.zeros((total, total))
        D[n0:, :n0] = d_orth
        D = D + D.T
        H = np.zeros((total, total))
        H[n0:, :n0] = m_r
        H = H + H.T
        normV2 = scipy.linalg.block_diag(mult0, mult1)
        d_list = (d_raw,)
        gram = (g0, g1)
        delta_list = (delta_raw,)
        orth_values = (p0, p1)

    return BasicComplexMatrices(
        degree_dims=dims,
        components=comps,
        d=d_list,
        delta=delta_list,
        gram=gram,
        D=D,
        H=H,
        normV2=normV2,
        nodes=nodes,
        quad_weights=qw,
        bounds=bounds,
        interval=profile.interval,
        kernel_tol=profile.kernel_tol,
        orth_values=orth_values,
        field_values=(vr, va),
        weight_fn=weight_fn,
        field_fn=field_fn,
    )


# --------------------------------------------------------------------------- invariants


def betti_numeric(mats: BasicComplexMatrices, tol: float | None = None) -> tuple[int, ...]:
    """Kernel dimension of each basic Laplacian.

    Eigenvalues ``<= tol`` count as kernel.  The split must be clean: no
    eigenvalue in ``(tol/10, 10 tol]`` and the first eigenvalue above the
    kernel at least 100 times the largest kernel eigenvalue.
    """
    tol = mats.kernel_tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    out = []
    for j, ev in enumerate(mats.laplacian_spectra):
        kernel = ev[ev <= tol]
        rest = ev[ev > tol]
        if np.any((ev > tol / 10) & (ev <= 10 * tol)):
            raise SpectralGapTooSmallError(f"degree {j}: eigenvalues within a factor 10 of tol={tol:g}")
        if len(kernel) and len(rest) and rest[0] < 100 * max(kernel.max(), 0.0):
            raise SpectralGapTooSmallError(
                f"degree {j}: kernel cluster up to {kernel.max():.3g} vs first nonzero {rest[0]:.3g}"
            )
        out.append(int(len(kernel)))
    return tuple(out)


def heat_supertrace(mats: BasicComplexMatrices, t: float) -> float:
    """``sum_j (-1)^j tr exp(-t Delta_j)``."""
    if t <= 0:
        raise ValueError("t must be positive")
    return float(sum((-1) ** j * np.sum(np.exp(-t * ev)) for j, ev in enumerate(mats.laplacian_spectra)))


def _parity_spectra(mats: BasicComplexMatrices, s: float) -> tuple[np.ndarray, np.ndarray]:
    q = mats.squared(s)
    ev = mats.even
    return np.linalg.eigvalsh(q[np.ix_(ev, ev)]), np.linalg.eigvalsh(q[np.ix_(~ev, ~ev)])


def witten_supertrace(mats: BasicComplexMatrices, s: float, t: float) -> float:
    """``tr_even exp(-t D_s^2) - tr_odd exp(-t D_s^2)``."""
    if t <= 0:
        raise ValueError("t must be positive")
    lam_even, lam_odd = _parity_spectra(mats, s)
    return float(np.sum(np.exp(-t * lam_even)) - np.sum(np.exp(-t * lam_odd)))


def witten_sweep(
    mats: BasicComplexMatrices,
    s_values: Sequence[float],
    t: float = 0.5,
    *,
    max_workers: int = 1,
) -> list[int]:
    """Rounded Witten supertrace for each deformation parameter, in input order."""
    s_values = [float(s) for s in s_values]
    if max_workers > 1 and len(s_values) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            values = list(pool.map(lambda s: witten_supertrace(mats, s, t), s_values))
    else:
        values = [witten_supertrace(mats, s, t) for s in s_values]
    out = []
    for s, v in zip(s_values, values):
        k = round(v)
        if abs(v - k) > ROUNDING_MARGIN:
            raise NonIntegerSupertraceError(f"s={s:g}: supertrace {v:.6f} is not within {ROUNDING_MARGIN} of an integer")
        out.append(int(k))
    return out


@dataclass(frozen=True)
class MorseReport:
    betti: tuple[int, ...]
    mu: tuple[float, ...]
    inequalities: tuple[tuple[int, float, float, bool], ...]  # (k, lhs, rhs, holds)
    euler_betti: int
    euler_mu: float

    @property
    def all_hold(self) -> bool:
        return all(h for *_, h in self.inequalities)

    @property
    def equality_residual(self) -> float:
        return abs(self.euler_mu - self.euler_betti)


def morse_check(
    mats: BasicComplexMatrices, s: float, t: float, betti: Sequence[int] | None = None
) -> MorseReport:
    """Alternating partial-sum inequalities between Betti numbers and heat traces.

    ``mu_j`` is the trace of the degree-``j`` diagonal block of ``exp(-t D_s^2)``
    (the heat trace of the ``j``-th basic Laplacian when ``s = 0``).  For every
    ``k`` below the top degree,
    ``sum_{i<=k} (-1)^(k-i) beta_i <= sum_{i<=k} (-1)^(k-i) mu_i``;
    at the top degree the two sides must agree.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    b = tuple(betti) if betti is not None else betti_numeric(mats)
    q = mats.squared(s)
    lam, vec = np.linalg.eigh(q)
    heat = (vec * np.exp(-t * lam)) @ vec.T
    mu = tuple(float(np.trace(heat[mats.degree_slice(j), mats.degree_slice(j)])) for j in range(len(mats.degree_dims)))
    ineqs = []
    top = len(mu) - 1
    for k in range(top):
        lhs = sum((-1) ** (k - i) * b[i] for i in range(k + 1))
        rhs = sum((-1) ** (k - i) * mu[i] for i in range(k + 1))
        ineqs.append((k, float(lhs), float(rhs), lhs <= rhs + 1e-12))
    euler_b = sum((-1) ** j * v for j, v in enumerate(b))
    euler_mu = sum((-1) ** j * v for j, v in enumerate(mu))
    return MorseReport(betti=b, mu=mu, inequalities=tuple(ineqs), euler_betti=euler_b, euler_mu=float(euler_mu))


def parity_of_anticommutator(mats: BasicComplexMatrices, atol: float = 1e-10) -> bool:
    """True iff ``H D + D H`` has no even/odd mixing blocks."""
    z = mats.H @ mats.D + mats.D @ mats.H
    ev = mats.even
    scale = max(1.0, float(np.abs(z).max()) if z.size else 0.0)
    mixed = max(
        float(np.abs(z[np.ix_(ev, ~ev)]).max(initial=0.0)),
        float(np.abs(z[np.ix_(~ev, ev)]).max(initial=0.0)),
    )
    return mixed <= atol * scale


# --------------------------------------------------------------------------- localization


def _neighborhood_complement(
    bounds: tuple[float, float], centers: Sequence[float], radius: float, periodic: bool
) -> list[tuple[float, float]]:
    a, b = bounds
    period = b - a
    blocked = []
    for c in centers:
        lo, hi = c - radius, c + radius
        if periodic:
            for shift in (-period, 0.0, period):
                blocked.append((lo + shift, hi + shift))
        else:
            blocked.append((lo, hi))
    blocked = sorted((max(lo, a), min(hi, b)) for lo, hi in blocked if hi > a and lo < b)
    free = []
    cursor = a
    for lo, hi in blocked:
        if lo > cursor:
            free.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < b:
        free.append((cursor, b))
    return free


@dataclass(frozen=True)
class LocalizationReport:
    s: float
    t: float
    outside_ratio: float
    outside_mass: float
    total_mass: float
    min_norm2_outside: float  # C^2 in ||V|| >= C away from the critical set
    region_fractions: tuple[float, ...]  # mass inside each 2 rho-neighborhood


def _region_gram(mats: BasicComplexMatrices, intervals: list[tuple[float, float]]) -> np.ndarray:
    """Weighted Gram matrix of the orthonormal basis restricted to a union of intervals."""
    total = mats.total_dim
    out = np.zeros((total, total))
    if not intervals:
        return out
    # orthonormal basis values at fresh nodes: raw values times L^{-T}
    n_quad = max(64, len(mats.nodes) // 2)
    for lo, hi in intervals:
        x, gw = _quadrature((lo, hi), n_quad)
        qw = gw * mats.weight_fn(x)
        vals = []
        for comp in mats.components:
            raw = comp.family.values(x)
            g = mats.gram[comp.degree]
            # raw Gram of this component is the matching diagonal block of the degree Gram
            start = comp.offset - int(sum(mats.degree_dims[: comp.degree]))
            n = len(comp.family)
            chol = np.linalg.cholesky(g[start:start + n, start:start + n])
            vals.append((comp, scipy.linalg.solve_triangular(chol, raw.T, lower=True).T))
        for comp, v in vals:
            sl = slice(comp.offset, comp.offset + v.shape[1])
            out[sl, sl] += v.T @ (qw[:, None] * v)
    return out


def localization_profile(
    mats: BasicComplexMatrices,
    s: float,
    t: float,
    crit_regions: Sequence[float],
    rho: float = 0.25,
) -> LocalizationReport:
    """Share of the heat-kernel diagonal mass of ``exp(-t D_s^2)`` lying away from the critical set.

    The mass density at ``x`` is ``sum_n exp(-t lambda_n) |psi_n(x)|^2``; it is
    integrated over the complement of the ``2 rho``-neighborhoods of the
    critical leaf-closure coordinates.  Raises if the field vanishes outside
    the ``rho``-neighborhoods (the localization argument needs ``|V| >= C > 0``
    there).
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    periodic = mats.interval == "circle"
    away = _neighborhood_complement(mats.bounds, crit_regions, rho, periodic)
    c2 = math.inf
    for lo, hi in away:
        x = np.linspace(lo, hi, 257)
        vr, va = mats.field_fn(x)
        c2 = min(c2, float(np.min(np.asarray(vr) ** 2 + np.asarray(va) ** 2)))
    if away and not c2 > 0:
        raise LocalizationPreconditionError(
            "the vector field vanishes outside the rho-neighborhoods of the declared critical regions"
        )

    q = mats.squared(s)
    lam, vec = np.linalg.eigh(q)
    heat = (vec * np.exp(-t * lam)) @ vec.T
    total = float(np.trace(heat))
    outside = _neighborhood_complement(mats.bounds, crit_regions, 2 * rho, periodic)
    out_mass = float(np.sum(_region_gram(mats, outside) * heat))
    fractions = []
    for c in crit_regions:
        inside = [
            (max(lo, mats.bounds[0]), min(hi, mats.bounds[1]))
            for lo, hi in ((c - 2 * rho, c + 2 * rho),)
        ]
        fractions.append(float(np.sum(_region_gram(mats, inside) * heat)) / total)
    return LocalizationReport(
        s=float(s),
        t=float(t),
        outside_ratio=out_mass / total,
        outside_mass=out_mass,
        total_mass=total,
        min_norm2_outside=c2 if away else math.nan,
        region_fractions=tuple(fractions),
    )


# --------------------------------------------------------------------------- report


@dataclass(frozen=True)
class SpectralReport:
    betti: tuple[int, ...]
    supertrace: tuple[tuple[float, float], ...]  # (t, value)
    witten_index: tuple[tuple[float, int], ...]  # (s, index)
    witten_t: float
    morse: tuple[tuple[float, MorseReport], ...]  # (s, report)
    localization: tuple[LocalizationReport, ...]

    @property
    def euler(self) -> int:
        return sum((-1) ** j * b for j, b in enumerate(self.betti))

    @property
    def s_independent(self) -> bool:
        return len({k for _, k in self.witten_index}) <= 1


def analyze(profile: SpectralProfile, mats: BasicComplexMatrices | None = None, *, witten: bool = True) -> SpectralReport:
    mats = assemble(profile) if mats is None else mats
    b = betti_numeric(mats)
    sup = tuple((float(t), heat_supertrace(mats, t)) for t in profile.t_values)
    windex: tuple = ()
    morse: tuple = ()
    loc: tuple = ()
    if witten:
        windex = tuple(zip(map(float, profile.s_values), witten_sweep(mats, profile.s_values, profile.witten_t)))
        morse = tuple((float(s), morse_check(mats, s, profile.witten_t, b)) for s in profile.s_values)
        if profile.crit_regions:
            loc = tuple(
                localization_profile(mats, s, profile.witten_t, profile.crit_regions, profile.rho)
                for s in profile.s_values
            )
    else:
        morse = ((0.0, morse_check(mats, 0.0, profile.witten_t, b)),)
    return SpectralReport(
        betti=b, supertrace=sup, witten_index=windex, witten_t=float(profile.witten_t), morse=morse, localization=loc
    )
