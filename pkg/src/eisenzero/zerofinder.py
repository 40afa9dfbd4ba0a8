"""Zero location inside translates of the fundamental domain.

Zeros of f|gamma are found in standard-domain coordinates w and mapped
forward to gamma(w).  Seeds come from the four-term approximation: on the
arc the oscillatory term's sign crossings, near the corners a couple of
extra candidates (the table's middle column differs from its neighbours by
a zero that hugs a corner), and on the right vertical the sign-lattice
brackets for the divisor-sum series.  Newton does the rest; bisection is
used where a restriction is exactly real (vertical and arc boundary zeros),
because zeros sitting on a contour are hostile to complex iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .eisenstein import (
    AccuracyError,
    EvalParams,
    SeriesKind,
    SlashedSeries,
    fourier_constant,
)
from .moebius import (
    CUSP_INFINITY,
    Cusp,
    ExtendedRational,
    INFINITY,
    UniModularMatrix,
    _coerce_lambda,
    apply_moebius,
    gamma_for_lambda,
    slash_representative,
)
from .winding import (
    CountMismatch,
    CountOptions,
    DEFAULT_COUNT_OPTIONS,
    WeightedCount,
    count_zeros,
    vertical_zero_brackets,
)

PI = math.pi


class NonConvergence(RuntimeError):
    pass


class EscapedDomain(RuntimeError):
    pass


@dataclass
class LocatedZero:
    """A refined zero: point in the translate, w its standard-domain pullback."""

    point: object  # complex or Cusp
    w: Optional[complex]
    residual: float
    lam: ExtendedRational
    multiplicity: int = 1
    is_cusp: bool = False
    weight: Fraction = Fraction(1)
    derivative_scale: float = 0.0
    domain_tag: str = ""

    def csv_row(self, kind: str, k: int) -> dict:
        if self.is_cusp:
            re_s, im_s = "0", "inf"
        else:
            re_s = repr(float(self.point.real))
            im_s = repr(float(self.point.imag))
        return {
            "kind": kind,
            "k": k,
            "lambda": str(self.lam),
            "re": re_s,
            "im": im_s,
            "residual": repr(self.residual),
            "is_cusp": int(self.is_cusp),
            "domain_tag": self.domain_tag or f"lambda={self.lam}",
        }


def newton_refine(f, fprime, z0: complex, tol: float = 1e-12, max_iter: int = 50) -> complex:
    """Standard complex Newton iteration; rejects escape from the half plane."""
    z = complex(z0)
    for _ in range(max_iter):
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise NonConvergence(f"iteration from {z0} diverged")
        if z.imag <= 0:
            raise EscapedDomain(f"iterate {z} left the upper half plane")
        fv = complex(f(z))
        fp = complex(fprime(z))
        if fp == 0:
            raise NonConvergence(f"vanishing derivative at {z}")
        step = fv / fp
        z = z - step
        if abs(step) < tol:
            if z.imag <= 0:
                raise EscapedDomain(f"iterate {z} left the upper half plane")
            return z
    raise NonConvergence(f"no convergence from {z0} within {max_iter} steps")


# ---------------------------------------------------------------------------
# seeds


def _arc_crossings(k: int, oscillator: str) -> List[float]:
    """Angles in (pi/3, 2pi/3) where cos(k theta/2) resp. sin(k theta/2) cross."""
    out = []
    if oscillator == "cos":
        j = 0
        while (2 * j + 1) * PI / k <= 2 * PI / 3:
            theta = (2 * j + 1) * PI / k
            if theta > PI / 3:
                out.append(theta)
            j += 1
    else:
        j = 1
        while 2 * j * PI / k <= 2 * PI / 3:
            theta = 2 * j * PI / k
            if PI / 3 < theta < 2 * PI / 3:
                out.append(theta)
            j += 1
    return out


def seed_zeros(kind, k: int, lam) -> List[complex]:
    """Analytically motivated starting points for the zeros of f|gamma in F.

    For lambda = oo the list is exact: the parity-filtered arc crossings for
    E (their count is the table value), the sign-lattice bracket midpoints
    for GG.  For finite lambda a superset is returned (all crossings of the
    leading oscillation plus corner candidates); refinement filters it.
    """
    kind = SeriesKind.parse(kind)
    lam = _coerce_lambda(lam)
    if k < 3 or k % 2 == 0:
        raise ValueError("seeds are defined for odd k >= 3")
    if lam.is_infinite:
        if kind == SeriesKind.GG:
            return [complex(0.5, 0.5 * (a + b))
                    for a, b in vertical_zero_brackets(k)]
        # keep the crossings whose local imaginary sign admits a zero with
        # radius > 1: sin(k theta_j / 2) = (-1)^j must oppose the constant
        # sign (-1)^{(k+1)/2} of Im on the arc
        want = -((-1) ** (((k + 1) // 2) % 2))
        seeds = []
        j = 0
        while (2 * j + 1) * PI / k < 2 * PI / 3:
            theta = (2 * j + 1) * PI / k
            if theta > PI / 3 and (-1) ** (j % 2) == want:
                seeds.append(np.exp(1j * theta))
            j += 1
        return seeds
    sgn_lam = 1 if lam > 0 else -1
    osc = "cos" if sgn_lam > 0 else "sin"
    seeds = [complex(np.exp(1j * th)) for th in _arc_crossings(k, osc)]
    inset = 0.1 / k
    for side in (1.0, -1.0):
        for frac in (0.25, 0.75):
            seeds.append(complex(side * (0.5 - inset),
                                 math.sqrt(3.0) / 2.0 + frac * PI / k))
    return seeds


# ---------------------------------------------------------------------------
# location


def _bisect_real(fn, lo: float, hi: float, iters: int = 60) -> float:
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _locate_params(k: int) -> EvalParams:
    return EvalParams(target_abs_err=1e-12 if k >= 11 else 1e-10)


def locate_zeros(kind, k: int, lam, opts: CountOptions = DEFAULT_COUNT_OPTIONS,
                 count: Optional[WeightedCount] = None) -> List[LocatedZero]:
    """All zeros of f in the translate indexed by lam, refined and verified.

    The weighted sum over the returned list (cusp zeros included) must
    reproduce count_zeros; any discrepancy raises CountMismatch.
    """
    kind = SeriesKind.parse(kind)
    lam = _coerce_lambda(lam)
    if k < 3 or k % 2 == 0:
        raise ValueError("zero location supports odd k >= 3")
    if count is None:
        count = count_zeros(kind, k, lam, opts)
    gamma_map = gamma_for_lambda(lam)
    tag = f"lambda={lam}"
    params = _locate_params(k)

    zeros: List[LocatedZero] = []
    if kind == SeriesKind.GG and lam.is_infinite:
        series = SlashedSeries(kind, k, UniModularMatrix.identity(), params)

        def g(t):
            return float(series.values(np.array([0.5 + 1j * t]))[0].real)

        for lo, hi in vertical_zero_brackets(k):
            t_star = _bisect_real(g, lo, hi)
            w = complex(0.5, t_star)
            fv = complex(series.values(np.array([w]))[0])
            fp = complex(series.derivative_values(np.array([w]))[0])
            zeros.append(LocatedZero(
                point=w, w=w, residual=abs(fv), lam=lam,
                weight=Fraction(1, 2), derivative_scale=abs(fp), domain_tag=tag,
            ))
        zeros.append(LocatedZero(
            point=CUSP_INFINITY, w=None, residual=0.0, lam=lam,
            is_cusp=True, weight=Fraction(1), domain_tag=tag,
        ))
        # each vertical zero appears on both verticals with weight 1/2
        total = Fraction(1) + Fraction(len(zeros) - 1)
        if total != count.value:
            raise CountMismatch(
                f"GG_{k} at oo: located weight {total} != counted {count.value}"
            )
        return zeros

    if kind == SeriesKind.GG and not lam.is_infinite and abs(lam) == 1:
        return _locate_arc_zeros(k, lam, count, opts, tag)

    rep = UniModularMatrix.identity() if lam.is_infinite else slash_representative(lam)
    series = SlashedSeries(kind, k, rep, params)

    def f(z):
        try:
            return series.values(np.array([z], dtype=complex))[0]
        except AccuracyError as exc:  # iterate wandered out of the usable region
            raise NonConvergence(str(exc)) from None

    def fp(z):
        try:
            return series.derivative_values(np.array([z], dtype=complex))[0]
        except AccuracyError as exc:
            raise NonConvergence(str(exc)) from None

    found: List[complex] = []
    for seed in seed_zeros(kind, k, lam):
        try:
            w = newton_refine(f, fp, seed)
        except (NonConvergence, EscapedDomain):
            continue
        if not (abs(w) >= 1.0 and abs(w.real) <= 0.5 + 1e-9):
            continue
        if any(abs(w - other) < 1e-8 for other in found):
            continue
        found.append(w)
    for w in sorted(found, key=lambda z: (z.real, z.imag)):
        fv, fpv = complex(f(w)), complex(fp(w))
        weight = Fraction(1)
        if kind == SeriesKind.GG and abs(abs(w.real) - 0.5) <= 1e-9:
            weight = Fraction(1, 2)
        zeros.append(LocatedZero(
            point=apply_moebius(gamma_map, w), w=w, residual=abs(fv), lam=lam,
            weight=weight, derivative_scale=abs(fpv), domain_tag=tag,
        ))
    total = sum((z.weight * z.multiplicity for z in zeros), Fraction(0))
    if total != count.value:
        raise CountMismatch(
            f"{kind.value}_{k} at {lam}: located weight {total} != counted {count.value}"
        )
    return zeros


def _locate_arc_zeros(k: int, lam, count, opts, tag) -> List[LocatedZero]:
    """GG at lambda = +-1: zeros lie on the arc; the prenormalized
    restriction is exactly real for the lambda = 1 representative."""
    params = _locate_params(k)
    series = SlashedSeries(SeriesKind.GG, k, slash_representative(ExtendedRational(1)),
                           params)
    ck = fourier_constant(k)

    def u(theta):
        return float((series.hat_values(np.array([theta]))[0] * ck).real)

    eps = 1e-5
    grid = np.linspace(PI / 3 + eps, 2 * PI / 3 - eps, max(64, 32 * k + 1))
    vals = (series.hat_values(grid) * ck).real
    mirror = lam == -1
    gamma_map = gamma_for_lambda(lam)
    zeros: List[LocatedZero] = []
    for i in range(len(grid) - 1):
        if vals[i] == 0 or vals[i] * vals[i + 1] >= 0:
            continue
        theta = _bisect_real(u, float(grid[i]), float(grid[i + 1]))
        w = complex(np.exp(1j * theta))
        if mirror:
            w = complex(-w.conjugate())
        fv = series.values(np.array([w if not mirror else complex(np.exp(1j * theta))]))[0]
        zeros.append(LocatedZero(
            point=apply_moebius(gamma_map, w), w=w, residual=abs(complex(fv)),
            lam=lam, weight=Fraction(1, 2), domain_tag=tag,
        ))
    total = sum((z.weight for z in zeros), Fraction(0))
    if total != count.value:
        raise CountMismatch(
            f"GG_{k} at {lam}: located weight {total} != counted {count.value}"
        )
    return zeros


# ---------------------------------------------------------------------------
# datasets


def figure_dataset(kind, k: int, lambdas, opts: CountOptions = DEFAULT_COUNT_OPTIONS,
                   strip_translates: int = 0) -> List[dict]:
    """Concatenated located zeros across translates, as CSV-ready rows.

    strip_translates > 0 additionally copies every domain's zeros to the
    horizontal integer translates n + gamma(F) for |n| <= strip_translates
    (legitimate by 1-periodicity of the series).
    """
    kind = SeriesKind.parse(kind)
    rows: List[dict] = []
    for lam in lambdas:
        lam = _coerce_lambda(lam)
        located = locate_zeros(kind, k, lam, opts)
        shifts = range(-strip_translates, strip_translates + 1) if strip_translates else (0,)
        for n in shifts:
            for z in located:
                row = z.csv_row(kind.value, k)
                if n != 0:
                    if not z.is_cusp:
                        row["re"] = repr(float(z.point.real) + n)
                    row["domain_tag"] = f"lambda={lam}+{n:+d}"
                rows.append(row)
    return rows


CSV_FIELDS = ["kind", "k", "lambda", "re", "im", "residual", "is_cusp", "domain_tag"]
