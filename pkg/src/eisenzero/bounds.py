"""Closed-form oracles: count tables, sign lattices, and inequality bounds.

Everything here is a direct formula — the theoretical side of the property
tests.  Counts carry a provenance tag because the divisor-sum series' values
at lambda in {0, +-1} are conjectural while everything else is a theorem.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .eisenstein import SeriesKind, hat_eval
from .moebius import ExtendedRational, UniModularMatrix, _coerce_lambda

PI = math.pi


class Provenance(enum.Enum):
    THEOREM = "theorem"
    CONJECTURE = "conjecture"


@dataclass(frozen=True)
class ExpectedCount:
    kind: str
    k: int
    lambda_class: str
    value: Fraction
    provenance: Provenance


def _ceil_k12(k: int) -> Fraction:
    return Fraction(math.ceil(Fraction(k, 12)))


def _floor_k12(k: int) -> Fraction:
    return Fraction(math.floor(Fraction(k, 12)))


#: per k mod 12: whether each |lambda| column of the count table rounds up
_TABLE_CEIL = {
    1: (False, False, False),
    3: (True, False, False),
    5: (True, True, False),
    7: (False, False, True),
    9: (False, True, True),
    11: (True, True, True),
}


def round_half_up(x: Fraction) -> int:
    """Nearest integer, half-integers rounded up."""
    return math.floor(x + Fraction(1, 2))


def _lambda_class(lam: ExtendedRational) -> int:
    if lam.is_infinite:
        return 2
    a = abs(lam).as_fraction()
    if a <= Fraction(1, 2):
        return 0
    if a <= 1:
        return 1
    return 2


_CLASS_NAMES = ("|lambda|<=1/2", "1/2<|lambda|<=1", "|lambda|>1")


def expected_count(kind, k: int, lam) -> ExpectedCount:
    """Theoretical weighted zero count for the translate indexed by lam.

    Kind E: the count table by k mod 12 and |lambda| (even k: the valence
    value k/12).  Kind GG: the vertical-boundary formula at lambda = oo,
    the E value away from {0, +-1, oo}, and the conjectural special values
    at 0 and +-1.
    """
    kind = SeriesKind.parse(kind)
    lam = _coerce_lambda(lam)
    if kind == SeriesKind.E:
        if k % 2 == 0:
            if k < 4:
                raise ValueError("even weight needs k >= 4")
            return ExpectedCount("E", k, "any (valence)", Fraction(k, 12),
                                 Provenance.THEOREM)
        if k < 3:
            raise ValueError("odd weight needs k >= 3")
        col = _lambda_class(lam)
        value = _ceil_k12(k) if _TABLE_CEIL[k % 12][col] else _floor_k12(k)
        return ExpectedCount("E", k, _CLASS_NAMES[col], value, Provenance.THEOREM)
    if kind != SeriesKind.GG:
        raise ValueError("expected_count covers kinds E and GG")
    if k < 3 or k % 2 == 0:
        raise ValueError("kind GG needs odd k >= 3")
    if lam.is_infinite:
        value = Fraction(math.ceil(Fraction(k, 6)) if k % 12 in (3, 5, 11)
                         else math.floor(Fraction(k, 6)))
        return ExpectedCount("GG", k, "lambda=oo", value, Provenance.THEOREM)
    if lam == 0:
        return ExpectedCount("GG", k, "lambda=0", Fraction(0), Provenance.CONJECTURE)
    if abs(lam) == 1:
        r = k % 12
        if r in (1, 3):
            value = _floor_k12(k)
        elif r == 5:
            value = Fraction(k + 1, 12)
        elif r == 7:
            value = Fraction(k - 1, 12)
        else:  # 9, 11
            value = _ceil_k12(k)
        return ExpectedCount("GG", k, "lambda=+-1", value, Provenance.CONJECTURE)
    inner = expected_count(SeriesKind.E, k, lam)
    return ExpectedCount("GG", k, inner.lambda_class, inner.value, Provenance.THEOREM)


def chi3(k: int) -> int:
    """Primitive Dirichlet character mod 3."""
    r = k % 3
    return 1 if r == 1 else (-1 if r == 2 else 0)


# ---------------------------------------------------------------------------
# remainder and non-vanishing bounds


def rsd_bound(k: int) -> float:
    """Classical remainder bound for the prenormalized arc expansion, k > 3."""
    if k <= 3:
        raise ValueError("the remainder bound needs k > 3")
    return 4.0 * (5.0 / 2.0) ** (-k / 2.0) + (20.0 * math.sqrt(2.0) / (k - 3.0)) * (
        4.5 ** ((3.0 - k) / 2.0)
    )


def ik_bound(k: int, theta: float) -> float:
    """Bound for the mixed-sign coprime sum I_k on the arc, k >= 9."""
    if k < 9:
        raise ValueError("ik_bound is certified for k >= 9")
    if not (PI / 3 - 1e-12 <= theta <= 2 * PI / 3 + 1e-12):
        raise ValueError("theta outside [pi/3, 2pi/3]")
    base = 4.0 * math.sqrt(10.0) * 5.0 ** (-k / 2.0)
    if theta <= PI / 2:
        return base + 2.0 * 3.0 ** (-k / 2.0)
    return base + 2.0 * 5.0 ** (-k / 2.0)


def im_hat_lower_bound(k: int, theta: float) -> float:
    """Lower bound for |Im of the prenormalized series| on the arc, odd k."""
    if theta <= PI / 2:
        return 2.0 ** (-k / 2.0) - 2.0 * 3.0 ** (-k / 2.0) - 4.0 * math.sqrt(10.0) * 5.0 ** (-k / 2.0)
    return 3.0 ** (-k / 2.0) - (4.0 * math.sqrt(10.0) + 2.0) * 5.0 ** (-k / 2.0)


def ek_rho_bound(k: int) -> float:
    """Bound for |E_k(rho) - (1 - chi(k) i sqrt(3))|, odd k > 3."""
    return 3.0 ** (-k / 2.0) + rsd_bound(k)


def slashed_remainder_bound(k: int) -> float:
    """Uniform bound 6 sqrt(5) (5/2)^{-k/2} for the slashed remainder, k >= 11."""
    if k < 11:
        raise ValueError("the slashed remainder bound needs k >= 11")
    return 6.0 * math.sqrt(5.0) * (2.5) ** (-k / 2.0)


def re_nonvanishing_margin(k: int, r: float) -> float:
    """Margin forcing Re E_k != 0 at radius r on the wedge, k >= 11.

    Positive whenever r >= 4^{1/k}: then no zeros at radius r or beyond,
    which is the outer half of the zero-confinement theorem.
    """
    return (
        1.0
        - r ** (-float(k))
        - 3.0 ** (-k / 2.0)
        - r ** (-k / 2.0)
        - 6.0 * math.sqrt(5.0) * (2.5) ** (-k / 2.0)
    )


# ---------------------------------------------------------------------------
# sign lattice on the right vertical


def z_ell(k: int, ell: int) -> complex:
    """Sign-lattice point 1/2 + (i/2) cot(pi ell / k), 1 <= ell <= floor(k/6)."""
    if not 1 <= ell <= k // 6:
        raise ValueError(f"ell must lie in [1, {k // 6}] for k = {k}")
    return complex(0.5, 0.5 / math.tan(PI * ell / k))


def expected_sign(ell: int) -> int:
    """Sign of the divisor-sum series at the ell-th lattice point."""
    return -1 if ell % 2 else 1


# ---------------------------------------------------------------------------
# the convex comparison function on the arc


def hk_eval(k: int, theta: float) -> float:
    """H_k(theta) = i^{k+1} Im of the prenormalized series on the arc (odd k)."""
    if k % 2 == 0:
        raise ValueError("H_k is defined for odd k")
    val = hat_eval(SeriesKind.E, k, UniModularMatrix.identity(), theta).value
    sign = (-1.0) ** (((k + 1) // 2) % 2)
    return sign * val.imag


def convexity_margin(k: int, theta: float) -> float:
    """Closed-form lower bound for H_k''(theta); positive for k >= 17.

    Two branches split at pi/2.  The leading term is the (1,-1) lattice
    point's second derivative minimized over the branch; the remainder
    collects the m^2+n^2 = 5 points and the integral tail.
    """
    common_tail = (k * (k + 1) / 2.0) * 4.0 * math.sqrt(10.0) * 5.0 ** (-k / 2.0)
    if theta <= PI / 2:
        lead = k * (2.0 * k + 4.0) / 2.0 ** (k / 2.0 + 3.0)
        near = (k / 2.0) * (49.0 * k + 8.0) / 3.0 ** (k + 2)
    else:
        lead = 0.25 * k * (k + 4.0) / 3.0 ** (k / 2.0 + 1.0)
        near = (k / 2.0) * (25.0 * k + 8.0) / 5.0 ** (k + 2)
    return lead - near - common_tail


# ---------------------------------------------------------------------------
# sine-plus-convex zero caps


def interval_counts(k: int):
    """(|I+|, |I-|): maximal intervals where sin(k theta/2) is >= 0 / <= 0
    on [pi/3, 2pi/3], for odd k."""
    if k < 1 or k % 2 == 0:
        raise ValueError("odd k >= 1 required")
    plus = k // 12 + 1
    minus = (k + 5) // 12 + (1 if k % 6 == 5 else 0)
    return plus, minus


def sine_plus_convex_caps(k: int):
    """(cap_plus, cap_minus): max zero counts of sin(k theta/2) +- h(theta)
    for positive strictly convex h with h(2pi/3) < sqrt(3)/2."""
    if k < 1 or k % 2 == 0:
        raise ValueError("odd k >= 1 required")
    cap_plus = 2 * ((k + 5) // 12) + (1 if k % 6 == 5 else 0)
    cap_minus = 2 * (k // 12) + 2 - (1 if k % 6 == 1 else 0)
    return cap_plus, cap_minus


# ---------------------------------------------------------------------------
# elementary angle estimates


def _angle_dist(x: float) -> float:
    """min over integers n of |x + 2 pi n|."""
    y = math.fmod(x, 2.0 * PI)
    if y > PI:
        y -= 2.0 * PI
    if y < -PI:
        y += 2.0 * PI
    return abs(y)


def angle_bounds(z: complex, z0: complex, r: float) -> bool:
    """Arguments of points in the r-ball around z0 stay within 2r/|z0|.

    Vacuously true outside the ball; requires r <= |z0|.
    """
    if abs(z0) == 0 or r <= 0:
        raise ValueError("need |z0| > 0 and r > 0")
    if abs(z - z0) >= r:
        return True
    return _angle_dist(cmath.phase(z) - cmath.phase(z0)) < 2.0 * r / abs(z0)


def angle_bound_box(z: complex, a: float, b: float) -> bool:
    """Arguments in the half-strip Re z > a > 0, |Im z| < b stay below b/a."""
    if a <= 0 or b <= 0:
        raise ValueError("need A, B > 0")
    if not (z.real > a and abs(z.imag) < b):
        return True
    return _angle_dist(cmath.phase(z)) < b / a
