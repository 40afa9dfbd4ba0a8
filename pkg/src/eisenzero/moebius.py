"""SL2(Z) arithmetic, Moebius action and fundamental-domain geometry.

The closed fundamental domain F is {|z| >= 1, |Re z| <= 1/2} together with
the cusp at infinity.  Its boundary splits into the circular arc C and the
two vertical half-lines L (Re = -1/2) and R (Re = +1/2); for contour work we
truncate the verticals at a finite height and close the contour with a top
edge.  Points of F carry weights 1/6 (corners rho, rho+1), 1/2 (rest of the
boundary) and 1 (interior and the cusp).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

RHO = complex(-0.5, math.sqrt(3.0) / 2.0)
SQRT3_HALF = math.sqrt(3.0) / 2.0

#: default absolute tolerance for boundary membership snapping
BOUNDARY_SNAP_TOL = 1e-9


class ExtendedRational:
    """Exact element of P^1(Q): a reduced fraction p/q or the point oo.

    Infinity is encoded by a zero denominator.  Instances are immutable and
    hashable, so they can key dictionaries of per-domain results.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if isinstance(num, Fraction) and den == 1:
            num, den = num.numerator, num.denominator
        num = int(num)
        den = int(den)
        if den == 0:
            if num == 0:
                raise ValueError("0/0 is not a point of P^1(Q)")
            num = 1
        else:
            g = math.gcd(num, den)
            num //= g
            den //= g
            if den < 0:
                num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("ExtendedRational is immutable")

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinite:
            raise ValueError("infinity has no Fraction value")
        return Fraction(self.num, self.den)

    def __neg__(self) -> "ExtendedRational":
        if self.is_infinite:
            return self
        return ExtendedRational(-self.num, self.den)

    def __abs__(self) -> "ExtendedRational":
        return ExtendedRational(abs(self.num), self.den)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtendedRational):
            return self.num == other.num and self.den == other.den
        if self.is_infinite:
            return other == math.inf
        return self.as_fraction() == other

    def __hash__(self):
        return hash((self.num, self.den))

    def __lt__(self, other):
        if self.is_infinite:
            return False
        if isinstance(other, ExtendedRational):
            if other.is_infinite:
                return True
            other = other.as_fraction()
        return self.as_fraction() < other

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __float__(self) -> float:
        return math.inf if self.is_infinite else self.num / self.den

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    __repr__ = __str__


INFINITY = ExtendedRational(1, 0)


def parse_extended_rational(text: str, max_den: int = 10 ** 6) -> ExtendedRational:
    """Parse 'p/q', an integer, a decimal, or 'inf'/'oo' into P^1(Q).

    Decimals are converted exactly and then reduced with a continued-fraction
    denominator bound, so "0.5" and "1/2" agree.
    """
    text = text.strip()
    if text.lower() in ("inf", "+inf", "oo", "infinity"):
        return INFINITY
    if text.lower() in ("-inf", "-oo"):
        return INFINITY
    if "/" in text:
        p, q = text.split("/")
        return ExtendedRational(int(p), int(q))
    if "." in text or "e" in text.lower():
        frac = Fraction(text).limit_denominator(max_den)
        return ExtendedRational(frac)
    return ExtendedRational(int(text))


RationalLike = Union[ExtendedRational, Fraction, int]


def _coerce_lambda(lam: RationalLike) -> ExtendedRational:
    if isinstance(lam, ExtendedRational):
        return lam
    if lam == math.inf:
        return INFINITY
    return ExtendedRational(Fraction(lam))


@dataclass(frozen=True)
class UniModularMatrix:
    """Integer 2x2 matrix (a b; c d) with determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant != 1 for {(self.a, self.b, self.c, self.d)}")

    @staticmethod
    def identity() -> "UniModularMatrix":
        return UniModularMatrix(1, 0, 0, 1)

    @staticmethod
    def translation(n: int) -> "UniModularMatrix":
        return UniModularMatrix(1, n, 0, 1)

    @staticmethod
    def inversion() -> "UniModularMatrix":
        """The order-four element S: tau -> -1/tau."""
        return UniModularMatrix(0, -1, 1, 0)

    def __mul__(self, other: "UniModularMatrix") -> "UniModularMatrix":
        return UniModularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "UniModularMatrix":
        return UniModularMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "UniModularMatrix":
        return UniModularMatrix(self.d, -self.b, -self.c, self.a)

    def lam(self) -> ExtendedRational:
        """The cusp lambda = -d/c = gamma^{-1}(oo) indexing the translate."""
        if self.c == 0:
            return INFINITY
        return ExtendedRational(-self.d, self.c)

    def as_json(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def lambda_of(gamma: UniModularMatrix) -> ExtendedRational:
    return gamma.lam()


def gamma_for_lambda(lam: RationalLike) -> UniModularMatrix:
    """Canonical gamma with lambda(gamma) = lam.

    For finite lam = p/q in lowest terms the representative has c = q > 0,
    d = -p, and (a, b) is the extended-Euclid completion with the least
    non-negative a.  lam = oo yields the identity.
    """
    lam = _coerce_lambda(lam)
    if lam.is_infinite:
        return UniModularMatrix.identity()
    p, q = lam.num, lam.den
    c, d = q, -p
    if d == 0:
        # lam = 0: a*0 - b*1 = 1 forces b = -1; take a = 0
        return UniModularMatrix(0, -1, 1, 0)
    # solve a*d - b*c = 1: a = d^{-1} mod c, least non-negative
    a = pow(d % c, -1, c)
    b = (a * d - 1) // c
    return UniModularMatrix(a, b, c, d)


def slash_representative(lam: RationalLike) -> UniModularMatrix:
    """Representative with c < 0 (c = 0 for lam = oo).

    This is the sign convention under which the slashed series has the
    four-term expansion with leading coefficient +1.
    """
    gamma = gamma_for_lambda(lam)
    if gamma.c > 0:
        gamma = -gamma
    return gamma


def gamma_for_cusp(alpha: RationalLike) -> UniModularMatrix:
    """Some gamma with gamma(oo) = alpha, i.e. first column (p, q)."""
    alpha = _coerce_lambda(alpha)
    if alpha.is_infinite:
        return UniModularMatrix.identity()
    p, q = alpha.num, alpha.den
    if q == 0:
        return UniModularMatrix.identity()
    # p*d - b*q = 1
    if p == 0:
        return UniModularMatrix(0, -1, 1, 0)
    d = pow(p % q, -1, q) if q > 1 else 0
    b = (p * d - 1) // q
    return UniModularMatrix(p, b, q, d)


class Cusp:
    """Marker wrapper distinguishing cusps from finite points."""

    __slots__ = ("value",)

    def __init__(self, value: RationalLike):
        self.value = _coerce_lambda(value)

    def __eq__(self, other):
        return isinstance(other, Cusp) and self.value == other.value

    def __hash__(self):
        return hash(("cusp", self.value))

    def __repr__(self):
        return f"Cusp({self.value})"


#: the cusp at infinity
CUSP_INFINITY = Cusp(INFINITY)

HalfPlanePoint = Union[complex, Cusp]


def as_half_plane_point(tau) -> HalfPlanePoint:
    if isinstance(tau, Cusp):
        return tau
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError(f"point {tau} is not in the upper half plane")
    return tau


def apply_moebius(gamma: UniModularMatrix, tau: HalfPlanePoint) -> HalfPlanePoint:
    """gamma acting by (a tau + b)/(c tau + d); cusps map projectively."""
    if isinstance(tau, Cusp):
        lam = tau.value
        if lam.is_infinite:
            return Cusp(ExtendedRational(gamma.a, gamma.c) if gamma.c != 0 else INFINITY)
        p, q = lam.num, lam.den
        num = gamma.a * p + gamma.b * q
        den = gamma.c * p + gamma.d * q
        if den == 0:
            return CUSP_INFINITY
        return Cusp(ExtendedRational(num, den))
    tau = complex(tau)
    return (gamma.a * tau + gamma.b) / (gamma.c * tau + gamma.d)


class ReductionError(RuntimeError):
    pass


def reduce_to_fundamental(tau: complex, max_iter: int = 512):
    """Map tau into the closed fundamental domain.

    Returns (tau', gamma) with tau' = gamma(tau), |tau'| >= 1 and
    |Re tau'| <= 1/2.  Boundary ties are resolved toward Re <= 0: points with
    Re = +1/2 move to Re = -1/2 and points on |tau| = 1 with Re > 0 are
    replaced by their inversion image.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("reduce_to_fundamental needs Im tau > 0")
    gamma = UniModularMatrix.identity()
    z = tau
    for _ in range(max_iter):
        n = round(z.real)
        if n != 0:
            z = z - n
            gamma = UniModularMatrix.translation(-n) * gamma
        if abs(z) < 1.0 - 1e-15:
            z = -1.0 / z
            gamma = UniModularMatrix.inversion() * gamma
        else:
            break
    else:
        raise ReductionError(f"reduction did not terminate for {tau}")
    # boundary tie-breaks
    if abs(z.real - 0.5) < 1e-15:
        z = z - 1.0
        gamma = UniModularMatrix.translation(-1) * gamma
    if abs(abs(z) - 1.0) < 1e-15 and z.real > 1e-15:
        z = -1.0 / z
        gamma = UniModularMatrix.inversion() * gamma
        if abs(z.real - 0.5) < 1e-15:
            z = z - 1.0
            gamma = UniModularMatrix.translation(-1) * gamma
    return z, gamma


def in_fundamental_domain(tau: complex, tol: float = BOUNDARY_SNAP_TOL) -> bool:
    tau = complex(tau)
    return (
        tau.imag > 0
        and abs(tau.real) <= 0.5 + tol
        and abs(tau) >= 1.0 - tol
    )


def boundary_weight(tau: HalfPlanePoint, tol: float = BOUNDARY_SNAP_TOL) -> Fraction:
    """Weight of a point of the closed fundamental domain.

    1/6 at the corners rho and rho+1, 1/2 elsewhere on the boundary, 1 in
    the interior and at the cusp at infinity.  Raises ValueError for points
    outside the domain (beyond the snap tolerance).
    """
    if isinstance(tau, Cusp):
        if tau.value.is_infinite:
            return Fraction(1)
        raise ValueError("finite cusps do not belong to the closed domain")
    tau = complex(tau)
    if not in_fundamental_domain(tau, tol):
        raise ValueError(f"{tau} lies outside the fundamental domain")
    if abs(tau - RHO) <= tol or abs(tau - (RHO + 1)) <= tol:
        return Fraction(1, 6)
    on_circle = abs(abs(tau) - 1.0) <= tol
    on_vertical = abs(abs(tau.real) - 0.5) <= tol
    if on_circle or on_vertical:
        return Fraction(1, 2)
    return Fraction(1)


# ---------------------------------------------------------------------------
# oriented boundary segments


@dataclass(frozen=True)
class BoundarySegment:
    """One piece of the positively oriented truncated boundary of F.

    tags: 'C' (arc rho -> rho+1), 'R' (rho+1 -> 1/2+iT), 'TOP'
    (1/2+iT -> -1/2+iT) and 'L' (-1/2+iT -> rho).  The top edge closes the
    contour at the truncation height.
    """

    tag: str
    top_height: float = 8.0

    def points(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        T = self.top_height
        if self.tag == "C":
            theta = 2.0 * math.pi / 3.0 - ts * (math.pi / 3.0)
            return np.exp(1j * theta)
        if self.tag == "R":
            return 0.5 + 1j * (SQRT3_HALF + ts * (T - SQRT3_HALF))
        if self.tag == "TOP":
            return (0.5 - ts) + 1j * T
        if self.tag == "L":
            return -0.5 + 1j * (T - ts * (T - SQRT3_HALF))
        raise ValueError(f"unknown segment tag {self.tag!r}")

    def point(self, t: float) -> complex:
        return complex(self.points(np.array([t]))[0])


def standard_contour(top_height: float = 8.0):
    """The four segments of the truncated positively oriented boundary."""
    return [
        BoundarySegment("C", top_height),
        BoundarySegment("R", top_height),
        BoundarySegment("TOP", top_height),
        BoundarySegment("L", top_height),
    ]


def circle_arc_theta(ts: np.ndarray) -> np.ndarray:
    """Angles traversed by the arc segment: 2pi/3 down to pi/3."""
    ts = np.asarray(ts, dtype=float)
    return 2.0 * math.pi / 3.0 - ts * (math.pi / 3.0)


def random_matrix(rng: np.random.Generator, length: int = 12) -> UniModularMatrix:
    """Random word in S and T; used by tests."""
    gamma = UniModularMatrix.identity()
    for _ in range(int(rng.integers(1, length))):
        if rng.random() < 0.5:
            gamma = gamma * UniModularMatrix.inversion()
        gamma = gamma * UniModularMatrix.translation(int(rng.integers(-3, 4)))
    return gamma
