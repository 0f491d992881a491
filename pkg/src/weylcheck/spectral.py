"""Counting functions, the Weyl constant, and the exact structural checks:
the counting inequality chain, superadditivity over separated submasks,
and the cube-cover lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import (
    assemble_buckling_pencil,
    assemble_clamped_bilaplacian,
    assemble_dirichlet_laplacian,
)
from .eigensolve import (
    DENSE_LIMIT,
    OperatorPencil,
    ShiftOnEigenvalueError,
    Spectrum,
    SymmetricOperator,
    dense_spectrum,
    generalized_spectrum,
    inertia_count,
)
from .geometry import CubeCover, GeometryError, GridMask
from .oracles import rectangle_spectrum


class InvariantViolation(AssertionError):
    """An exact discrete identity failed; this signals a bug, not noise."""


def gamma_half(two_s: int) -> float:
    """Gamma(s) for 2s = two_s, via the half-integer recursion."""
    if two_s <= 0:
        raise ValueError("argument must be positive")
    if two_s == 1:
        return math.sqrt(math.pi)
    if two_s == 2:
        return 1.0
    return (two_s / 2.0 - 1.0) * gamma_half(two_s - 2)


def weyl_constant(n: int, volume: float) -> float:
    """Leading coefficient (4 pi)^{-n/2} |Omega| / Gamma(n/2 + 1)."""
    if n < 1 or volume <= 0:
        raise ValueError("need n >= 1 and positive volume")
    return (4.0 * math.pi) ** (-n / 2.0) / gamma_half(n + 2) * volume


def counting(spectrum: Spectrum, lam: float) -> int:
    """Strict count #{j : value_j < lam}; refuses lam above the cutoff."""
    if lam > spectrum.cutoff:
        raise ValueError(
            f"lambda={lam} exceeds spectrum cutoff {spectrum.cutoff}"
        )
    return int(np.searchsorted(spectrum.values, lam, side="left"))


@dataclass(frozen=True)
class CountingFunction:
    spectrum: Spectrum

    def __call__(self, lam: float) -> int:
        return counting(self.spectrum, lam)


def robust_count(target, lam: float, dense_limit: int = DENSE_LIMIT) -> int:
    """Inertia count with the strictness-preserving retry: a shift landing
    on an eigenvalue is perturbed by a relative 1e-9 downward first (strict
    counting), then upward."""
    for theta in (lam, lam * (1 - 1e-9), lam * (1 + 1e-9)):
        try:
            return inertia_count(target, theta, dense_limit)
        except ShiftOnEigenvalueError:
            continue
    raise ShiftOnEigenvalueError(
        f"all shifts near {lam} sit on the spectrum"
    )


# -- triple of spectra on one mask ----------------------------------------


@dataclass(frozen=True)
class MaskSpectra:
    """Dense spectra of the three problems on one mask."""

    dirichlet: Spectrum
    buckling: Spectrum
    bilaplacian_root: Spectrum

    def merged_values(self) -> np.ndarray:
        return np.sort(
            np.concatenate(
                [
                    self.dirichlet.values,
                    self.buckling.values,
                    self.bilaplacian_root.values,
                ]
            )
        )


def solve_all_problems(mask: GridMask,
                       dense_limit: int = DENSE_LIMIT) -> MaskSpectra:
    a = assemble_dirichlet_laplacian(mask)
    b = assemble_clamped_bilaplacian(mask)
    pencil = OperatorPencil(b, a)
    lam = dense_spectrum(a, dense_limit, problem="dirichlet")
    omega_sq = dense_spectrum(b, dense_limit, problem="dirichlet")
    omega = Spectrum("bilaplacian_root", np.sqrt(omega_sq.values),
                     source="grid")
    mu = generalized_spectrum(pencil, dense_limit=dense_limit)
    return MaskSpectra(lam, mu, omega)


def eigenvalue_avoiding_grid(values: np.ndarray, count: int) -> np.ndarray:
    """Midpoints between consecutive distinct values: shifts that can never
    collide with the strict-counting convention."""
    distinct = np.unique(values)
    if distinct.size < 2:
        raise ValueError("need at least two distinct values for midpoints")
    # skip numerically split multiplets: a midpoint there sits within
    # factorization tolerance of the spectrum
    wide = np.diff(distinct) > 1e-8 * np.abs(distinct[1:])
    mids = (0.5 * (distinct[:-1] + distinct[1:]))[wide]
    mids = mids[mids > distinct[0]]  # guard against rounding into the floor
    if count >= mids.size:
        return mids
    pick = np.linspace(0, mids.size - 1, count).round().astype(int)
    return mids[np.unique(pick)]


@dataclass(frozen=True)
class ChainReport:
    """Per-lambda triples (N_b, N_bl, N_D); all rows must be ordered."""

    lams: np.ndarray
    n_b: np.ndarray
    n_bl: np.ndarray
    n_d: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(np.all(self.n_b <= self.n_bl) and np.all(self.n_bl <= self.n_d))

    def rows(self):
        return list(zip(self.lams, self.n_b, self.n_bl, self.n_d))


def verify_chain(mask: GridMask, lam_grid, method: str = "dense",
                 dense_limit: int = DENSE_LIMIT) -> ChainReport:
    """Check N_b <= N_bl <= N_D at every lambda, with exact integer counts.

    method 'dense' counts in full spectra; 'inertia' counts through
    symmetric-indefinite factorizations (B - lambda^2 I for the
    bilaplacian roots, pencil inertia for buckling). A violation raises:
    the chain is a theorem of the discretization.
    """
    lam_grid = np.asarray(lam_grid, dtype=float)
    if method == "dense":
        spectra = solve_all_problems(mask, dense_limit)
        n_d = np.array([counting(spectra.dirichlet, l) for l in lam_grid])
        n_bl = np.array([counting(spectra.bilaplacian_root, l) for l in lam_grid])
        n_b = np.array([counting(spectra.buckling, l) for l in lam_grid])
    elif method == "inertia":
        a = assemble_dirichlet_laplacian(mask)
        b = assemble_clamped_bilaplacian(mask)
        pencil = OperatorPencil(b, a)
        n_d = np.array([robust_count(a, l, dense_limit) for l in lam_grid])
        n_bl = np.array([robust_count(b, l * l, dense_limit) for l in lam_grid])
        n_b = np.array([robust_count(pencil, l, dense_limit) for l in lam_grid])
    else:
        raise ValueError(f"unknown counting method {method!r}")
    report = ChainReport(lam_grid, n_b, n_bl, n_d)
    if not report.ok:
        bad = [
            (l, int(b_), int(bl), int(d))
            for l, b_, bl, d in report.rows()
            if not (b_ <= bl <= d)
        ]
        raise InvariantViolation(f"counting chain violated at {bad}")
    return report


# -- superadditivity -------------------------------------------------------


def _dilate(interior: np.ndarray) -> np.ndarray:
    """One step of 4-neighbor dilation (the reach of the Laplacian factor)."""
    out = interior.copy()
    out[1:, :] |= interior[:-1, :]
    out[:-1, :] |= interior[1:, :]
    out[:, 1:] |= interior[:, :-1]
    out[:, :-1] |= interior[:, 1:]
    return out


def check_separated(parts: list[GridMask]) -> None:
    """The quadratic forms of two submasks decouple exactly iff their
    one-step dilations are disjoint (the bilaplacian factor reaches one
    node past the support). Superadditivity is only a discrete theorem
    under that separation."""
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if np.any(_dilate(parts[i].interior) & _dilate(parts[j].interior)):
                raise GeometryError(
                    f"parts {i} and {j} are closer than the stencil width; "
                    "their discrete forms do not decouple"
                )


@dataclass(frozen=True)
class SuperadditivityReport:
    lam: float
    whole: dict[str, int]
    parts: list[dict[str, int]]

    @property
    def ok(self) -> bool:
        return all(
            self.whole[p] >= sum(part[p] for part in self.parts)
            for p in self.whole
        )


def superadditivity_check(whole: GridMask, parts: list[GridMask], lam: float,
                          dense_limit: int = DENSE_LIMIT) -> SuperadditivityReport:
    """Assert N(lam, whole) >= sum of N(lam, part) for all three problems."""
    for k, part in enumerate(parts):
        if not part.is_submask_of(whole):
            raise GeometryError(f"part {k} is not a submask of the whole")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if np.any(parts[i].interior & parts[j].interior):
                raise GeometryError(f"parts {i} and {j} overlap")
    check_separated(parts)

    def triple(mask: GridMask) -> dict[str, int]:
        s = solve_all_problems(mask, dense_limit)
        return {
            "dirichlet": counting(s.dirichlet, lam),
            "buckling": counting(s.buckling, lam),
            "bilaplacian_root": counting(s.bilaplacian_root, lam),
        }

    report = SuperadditivityReport(
        lam, triple(whole), [triple(p) for p in parts if p.n_nodes]
    )
    if not report.ok:
        raise InvariantViolation(
            f"superadditivity violated at lambda={lam}: {report}"
        )
    return report


def split_separated(mask: GridMask, seed: int = 0) -> list[GridMask]:
    """Split a mask into two submasks separated by a two-column (or
    two-row) gap, so all three forms decouple. Either part may be empty."""
    rng = np.random.default_rng(seed)
    nx, ny = mask.dims
    axis = int(rng.integers(2))
    size = mask.dims[axis]
    c = int(rng.integers(1, max(size - 2, 2)))
    coord = np.arange(nx)[:, None] if axis == 0 else np.arange(ny)[None, :]
    left = mask.restrict(np.broadcast_to(coord <= c - 1, mask.dims))
    right = mask.restrict(np.broadcast_to(coord >= c + 2, mask.dims))
    return [left, right]


# -- cube-cover lower bound ------------------------------------------------


def cube_lower_bound(cover: CubeCover, lam: float) -> int:
    """Certified lower bound for N_D(lam, Omega): the analytic count for
    one cube of side eta/sqrt(2), times the number of disjoint cubes."""
    if len(cover.corners) == 0:
        return 0
    per_cube = len(rectangle_spectrum(cover.side, cover.side, lam))
    return per_cube * len(cover.corners)


# -- Weyl ratio ------------------------------------------------------------

GRID_TRUST = 0.25  # lambda * h^2 at most this for trusted grid eigenvalues


@dataclass(frozen=True)
class WeylRatioRow:
    lam: float
    count: int
    ratio: float
    trusted: bool


def weyl_ratio_curve(spectrum: Spectrum, n: int, volume: float, lam_grid,
                     h: float | None = None) -> list[WeylRatioRow]:
    """Rows (lambda, N(lambda), N / (C_W lambda^{n/2})); grid rows outside
    the dispersion trust region are flagged, not dropped."""
    c_w = weyl_constant(n, volume)
    rows = []
    for lam in np.asarray(lam_grid, dtype=float):
        cnt = counting(spectrum, lam)
        trusted = True
        if spectrum.source == "grid":
            if h is None:
                raise ValueError("grid spectra need h for the trust region")
            trusted = lam * h * h <= GRID_TRUST
        rows.append(
            WeylRatioRow(float(lam), cnt, cnt / (c_w * lam ** (n / 2.0)), trusted)
        )
    return rows


def check_ratio_ordering(reports: dict[str, list[WeylRatioRow]]) -> None:
    """The chain implies ratio_b <= ratio_bl <= ratio_D at each lambda."""
    rb = reports["buckling"]
    rbl = reports["bilaplacian_root"]
    rd = reports["dirichlet"]
    for b_, bl, d in zip(rb, rbl, rd):
        if not (b_.ratio <= bl.ratio + 1e-15 and bl.ratio <= d.ratio + 1e-15):
            raise InvariantViolation(
                f"ratio ordering violated at lambda={b_.lam}"
            )
