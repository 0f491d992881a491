"""Closed-form spectra used as grid-independent oracles.

Rectangle and interval spectra come from the classical separated
eigenvalues. Disk eigenvalues are squared Bessel zeros; the zeros are
found by sign-change bracketing of the ascending power series of J_k
(evaluated in extended precision) refined by bisection, so the disk
oracle shares no code with the grid solvers.
"""

from __future__ import annotations

import math

import numpy as np
from mpmath import mp

from .eigensolve import Spectrum

BESSEL_ARG_LIMIT = 60.0  # series validated up to here at 50 digits
_BESSEL_DPS = 50


def rectangle_spectrum(a: float, b: float, lam_max: float) -> Spectrum:
    """All values pi^2 (m^2/a^2 + n^2/b^2) strictly below lam_max."""
    if a <= 0 or b <= 0:
        raise ValueError("rectangle sides must be positive")
    m_max = int(a * math.sqrt(lam_max) / math.pi) + 1
    n_max = int(b * math.sqrt(lam_max) / math.pi) + 1
    m = np.arange(1, m_max + 1)
    n = np.arange(1, n_max + 1)
    vals = math.pi**2 * (
        (m[:, None] / a) ** 2 + (n[None, :] / b) ** 2
    ).ravel()
    return Spectrum("dirichlet", vals[vals < lam_max], cutoff=lam_max,
                    source="analytic")


def interval_spectrum(a: float, lam_max: float) -> Spectrum:
    """All values k^2 pi^2 / a^2 strictly below lam_max (simple)."""
    if a <= 0:
        raise ValueError("interval length must be positive")
    k_max = int(a * math.sqrt(lam_max) / math.pi) + 1
    k = np.arange(1, k_max + 1)
    vals = (k * math.pi / a) ** 2
    return Spectrum("dirichlet", vals[vals < lam_max], cutoff=lam_max,
                    source="analytic")


def bessel_j_series(order: int, x: float):
    """J_order(x) by the ascending power series at extended precision.

    Alternating series with huge intermediate terms; extended precision
    absorbs the cancellation. Valid for 0 <= x <= BESSEL_ARG_LIMIT.
    """
    if x < 0 or x > BESSEL_ARG_LIMIT:
        raise ValueError(f"series argument {x} outside [0, {BESSEL_ARG_LIMIT}]")
    with mp.workdps(_BESSEL_DPS):
        xh = mp.mpf(x) / 2
        term = xh**order / mp.factorial(order)
        total = term
        m = 0
        while True:
            m += 1
            term *= -(xh * xh) / (m * (m + order))
            total += term
            if abs(term) < mp.mpf(10) ** (-_BESSEL_DPS + 5) * (abs(total) + 1):
                break
            if m > 400:
                raise RuntimeError("Bessel series failed to terminate")
        return float(total)


def bessel_zeros(order: int, x_max: float, tol: float = 1e-10) -> list[float]:
    """Positive zeros of J_order up to x_max, by bracketing and bisection.

    Consecutive zeros of J_k are more than pi apart only asymptotically
    from above, so a scan step below pi cannot skip a pair.
    """
    if x_max > BESSEL_ARG_LIMIT:
        raise ValueError(
            f"x_max={x_max} beyond validated series range {BESSEL_ARG_LIMIT}"
        )
    zeros = []
    step = 0.5
    x = max(order * 0.5, step)  # J_k > 0 on (0, j_{k,1}) and j_{k,1} > k
    f_prev = bessel_j_series(order, x)
    while x < x_max:
        x_next = min(x + step, x_max)
        f_next = bessel_j_series(order, x_next)
        if f_prev == 0.0:
            zeros.append(x)
        elif f_prev * f_next < 0:
            lo, hi = x, x_next
            flo = f_prev
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = bessel_j_series(order, mid)
                if fm == 0.0:
                    lo = hi = mid
                elif flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
        x, f_prev = x_next, f_next
    return zeros


def disk_spectrum(r: float, lam_max: float) -> Spectrum:
    """Dirichlet disk eigenvalues j_{k,l}^2 / r^2 below lam_max;
    multiplicity 2 for angular order k >= 1."""
    if r <= 0:
        raise ValueError("disk radius must be positive")
    x_max = math.sqrt(lam_max) * r
    if x_max > BESSEL_ARG_LIMIT:
        raise ValueError(
            f"lam_max={lam_max} needs Bessel arguments up to {x_max:.1f} > "
            f"{BESSEL_ARG_LIMIT}; restrict lam_max"
        )
    vals = []
    k = 0
    while True:
        zk = bessel_zeros(k, x_max)
        if not zk:
            break
        mult = 1 if k == 0 else 2
        for z in zk:
            vals.extend([(z / r) ** 2] * mult)
        k += 1
    return Spectrum("dirichlet", np.array(vals), cutoff=lam_max,
                    source="analytic")
