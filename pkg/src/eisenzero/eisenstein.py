"""Evaluation engines for the even- and odd-weight Eisenstein-type series.

Three series are supported, indexed by SeriesKind:

  E   normalized series with constant term 1 and q-expansion
      1 + c_k * sum_n sigma_{k-1}(n) q^n,  c_k = (-2 pi i)^k / (zeta(k) (k-1)!)
  G   zeta(k) * E
  GG  divisor-sum series -B_k/(2k) + sum_n sigma_{k-1}(n) q^n

Two engines are available: the q-expansion (fast for Im tau >= 0.6) and a
truncated coprime lattice sum (needed for the slashed series E|gamma, which
for odd k is not expressible through the unslashed series).  For a matrix
gamma = (a b; c d) with c != 0 the slashed series is

  E|gamma(tau) = (c tau + d)^{-k} + sum_{(m,n)=1, dm > cn} (m tau + n)^{-k}

which converges absolutely for k >= 3; the tail over m^2 + n^2 > M is
certified by an integral estimate.  GG|gamma drops the (c tau + d)^{-k}
prefix and rescales by 1/c_k.

All evaluators report an absolute error budget alongside the value.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from ._backend import pow_sum_batch, pow_sum_deriv_batch
from .moebius import Cusp, UniModularMatrix

EPS = float(np.finfo(np.float64).eps)
TWO_PI = 2.0 * math.pi


class AccuracyError(RuntimeError):
    """Requested accuracy is unreachable with the configured truncations."""


class SeriesKind(enum.Enum):
    E = "E"
    G = "G"
    GG = "GG"

    @staticmethod
    def parse(text) -> "SeriesKind":
        if isinstance(text, SeriesKind):
            return text
        return SeriesKind(str(text).upper())


class EvalMode(enum.Enum):
    AUTO = "auto"
    Q_EXPANSION = "q_expansion"
    LATTICE = "lattice"


#: q-expansion is preferred above this height (geometric ratio ~ e^{-2 pi 0.6})
AUTO_IM_THRESHOLD = 0.6


@dataclass(frozen=True)
class EvalParams:
    q_terms: int = 512
    lattice_radius: Optional[int] = None
    lattice_cap: int = 10 ** 6
    target_abs_err: float = 1e-10
    mode: EvalMode = EvalMode.AUTO

    def with_target(self, target: float) -> "EvalParams":
        return replace(self, target_abs_err=target)


DEFAULT_PARAMS = EvalParams()


class EvalResult(NamedTuple):
    value: complex
    abs_err_bound: float


# ---------------------------------------------------------------------------
# number-theoretic constants


_BERNOULLI: list = [Fraction(1)]


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k with the B_1 = -1/2 convention."""
    if k < 0:
        raise ValueError("k must be >= 0")
    while len(_BERNOULLI) <= k:
        n = len(_BERNOULLI)
        acc = Fraction(0)
        for j, bj in enumerate(_BERNOULLI):
            acc += math.comb(n + 1, j) * bj
        _BERNOULLI.append(-acc / (n + 1))
    return _BERNOULLI[k]


@lru_cache(maxsize=None)
def zeta_value(k: int) -> float:
    """zeta(k) for integer k >= 2, accurate to well below 1e-14.

    Even k uses the closed Bernoulli form; odd k uses Euler-Maclaurin
    acceleration of the defining sum.
    """
    if k < 2:
        raise ValueError("zeta_value needs k >= 2")
    if k % 2 == 0:
        b = bernoulli(k)
        # zeta(k) = |B_k| (2 pi)^k / (2 k!)
        try:
            return abs(float(b)) * TWO_PI ** k / (2.0 * math.factorial(k))
        except OverflowError:
            log_val = (
                math.log(abs(b.numerator)) - math.log(b.denominator)
                + k * math.log(TWO_PI) - math.log(2) - math.lgamma(k + 1)
            )
            return math.exp(log_val)
    n_cut = 32
    total = sum(n ** (-float(k)) for n in range(1, n_cut))
    total += 0.5 * n_cut ** (-float(k))
    total += n_cut ** (1.0 - k) / (k - 1)
    rising = float(k)
    power = n_cut ** (-float(k) - 1)
    for j in range(1, 7):
        b2j = bernoulli(2 * j)
        total += float(b2j) / math.factorial(2 * j) * rising * power
        rising *= (k + 2 * j - 1) * (k + 2 * j)
        power /= n_cut * n_cut
    return total


_I_POWERS = (1.0 + 0j, -1j, -1.0 + 0j, 1j)


def minus_i_to(k: int) -> complex:
    """(-i)^k as an exact unit."""
    return _I_POWERS[k % 4]


def i_to_minus(k: int) -> complex:
    """i^{-k} as an exact unit."""
    return _I_POWERS[k % 4]


@lru_cache(maxsize=None)
def fourier_constant(k: int) -> complex:
    """c_k = (-2 pi i)^k / (zeta(k) (k-1)!); c_1 = 0 so that E_1 == 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return 0j
    log_mag = k * math.log(TWO_PI) - math.lgamma(k) - math.log(zeta_value(k))
    return math.exp(log_mag) * minus_i_to(k)


_SIGMA_TABLES: dict = {}


def divisor_sums(power: int, n_max: int):
    """Exact sigma_power(1..n_max) as a list (index 0 unused)."""
    table = _SIGMA_TABLES.get(power)
    if table is None or len(table) <= n_max:
        size = max(64, 1 << (n_max - 1).bit_length())
        table = [0] * (size + 1)
        for d in range(1, size + 1):
            dp = d ** power
            for mult in range(d, size + 1, d):
                table[mult] += dp
        _SIGMA_TABLES[power] = table
    return table


def constant_term(kind: SeriesKind, k: int) -> complex:
    kind = SeriesKind.parse(kind)
    if kind == SeriesKind.E:
        return 1.0 + 0j
    if kind == SeriesKind.G:
        return zeta_value(k) + 0j
    return complex(-bernoulli(k) / (2 * k))


# ---------------------------------------------------------------------------
# q-expansion engine


def _coefficient_bound(k: int, n: float) -> float:
    # sigma_{k-1}(n) <= zeta(k-1) n^{k-1} for k >= 3; sigma_1(n) < n^2
    if k >= 3:
        return zeta_value(k - 1) * n ** (k - 1)
    return n ** 2


def _fourier_batch_full(kind: SeriesKind, k: int, taus: np.ndarray, params: EvalParams):
    """q-expansion core: returns (values, per-point error bound array)."""
    kind = SeriesKind.parse(kind)
    if k < 1:
        raise ValueError("k must be >= 1")
    taus = np.asarray(taus, dtype=np.complex128)
    if kind == SeriesKind.G:
        vals, errs = _fourier_batch_full(SeriesKind.E, k, taus, params)
        z = zeta_value(k)
        return z * vals, z * errs + 1e-15 * z
    scale = fourier_constant(k) if kind == SeriesKind.E else 1.0 + 0j
    const = constant_term(kind, k)
    vals = np.full(taus.shape, const, dtype=np.complex128)
    if scale == 0:  # E_1 == 1
        return vals, np.zeros(taus.shape)
    q = np.exp(2j * math.pi * taus)
    qabs = np.abs(q)
    x = float(qabs.max())
    if x >= 0.999:
        raise AccuracyError("q-expansion does not converge this close to the real axis")
    smag = abs(scale)
    target = params.target_abs_err
    sigma = divisor_sums(k - 1, 64)
    qp = q.copy()
    qp_abs = qabs.copy()
    sum_abs = np.full(taus.shape, abs(const))
    tail = math.inf
    n = 0
    while n < params.q_terms:
        n += 1
        if n >= len(sigma):
            sigma = divisor_sums(k - 1, 2 * len(sigma))
        coef = scale * float(sigma[n])
        vals += coef * qp
        sum_abs += abs(coef) * qp_abs
        qp *= q
        qp_abs *= qabs
        # conservative geometric tail once past the term-size peak
        ratio = ((n + 2) / (n + 1)) ** max(k - 1, 2) * x
        if ratio < 1.0:
            tail = smag * _coefficient_bound(k, n + 1) * x ** (n + 1) / (1.0 - ratio)
            if tail < target / 16.0 or tail < float(sum_abs.max()) * EPS:
                break
    else:
        if tail > target:
            raise AccuracyError(
                f"q-expansion tail {tail:.3g} above target {target:.3g} at the "
                f"q_terms cap ({params.q_terms})"
            )
    # per-point truncation: the tail scales with |q|^{n+1} relative to the worst
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(qabs > 0, (qabs / x) ** (n + 1), 0.0) if x > 0 else np.zeros_like(qabs)
    errs = tail * rel + 8.0 * EPS * sum_abs
    return vals, errs


def fourier_batch(kind: SeriesKind, k: int, taus: np.ndarray, params: EvalParams):
    """q-expansion values at an array of points, with an error budget.

    Returns (values, abs_err_bound); the budget covers truncation and
    floating-point accumulation at the worst point of the batch.
    """
    vals, errs = _fourier_batch_full(kind, k, taus, params)
    return vals, float(errs.max()) if errs.size else 0.0


# ---------------------------------------------------------------------------
# lattice enumeration and tail bounds


@lru_cache(maxsize=48)
def half_lattice(c: int, d: int, radius: int, min_norm: int = 0):
    """Coprime pairs (m, n) with m^2+n^2 <= radius, d m > c n, m^2+n^2 >= min_norm.

    Returned as a pair of readonly int64 arrays ordered by (m, n).
    """
    mmax = math.isqrt(radius)
    ms_parts = []
    ns_parts = []
    for m in range(-mmax, mmax + 1):
        nmax = math.isqrt(radius - m * m)
        n = np.arange(-nmax, nmax + 1, dtype=np.int64)
        mask = np.gcd(abs(m), np.abs(n)) == 1
        mask &= (d * m) > (c * n)
        if min_norm > 0:
            mask &= (m * m + n * n) >= min_norm
        n = n[mask]
        if n.size:
            ms_parts.append(np.full(n.size, m, dtype=np.int64))
            ns_parts.append(n)
    ms = np.concatenate(ms_parts) if ms_parts else np.empty(0, dtype=np.int64)
    ns = np.concatenate(ns_parts) if ns_parts else np.empty(0, dtype=np.int64)
    ms.setflags(write=False)
    ns.setflags(write=False)
    return ms, ns


def quad_form_min(tau: complex) -> float:
    """Least eigenvalue of the form |m tau + n|^2 over unit (m, n).

    Equals 1/2 or more everywhere in the fundamental domain; degrades for
    low-imaginary points, which the tail estimate accounts for.
    """
    t = abs(tau) ** 2
    r = tau.real
    disc = math.sqrt((t - 1.0) ** 2 + 4.0 * r * r)
    return max((t + 1.0 - disc) / 2.0, 1e-300)


def lattice_tail_estimate(k: int, radius: float, lam_min: float = 0.5) -> float:
    """Upper estimate for the omitted coprime tail over m^2+n^2 > radius.

    Certified (integral comparison, at most 2 sqrt(N) coprime points per
    circle) for k > 3; for k = 3 a density heuristic is used and the caller
    should treat the budget as empirical.
    """
    lam_min = max(lam_min, 1e-12)
    try:
        if k > 3:
            return (
                2.0
                * lam_min ** (-k / 2.0)
                * (radius ** ((1.0 - k) / 2.0) + 2.0 / (k - 3.0) * radius ** ((3.0 - k) / 2.0))
            )
        return (6.0 / math.pi) * lam_min ** (-1.5) / math.sqrt(radius)
    except OverflowError:
        return math.inf


def tail_bound(k: int, radius: float) -> float:
    """Certified pure-power tail bound const(k) * radius^{(3-k)/2}.

    Valid for k >= 9, radius >= 5, for points with |m tau + n|^2 >=
    (m^2+n^2)/2 (all of the fundamental domain and the half-lattice sums).
    """
    if k < 9:
        raise ValueError("pure-power tail bound is certified for k >= 9 only")
    if radius < 5:
        raise ValueError("tail bound needs radius >= 5")
    return 2.0 ** (k / 2.0 + 1.0) * (0.2 + 2.0 / (k - 3.0)) * radius ** ((3.0 - k) / 2.0)


def radius_for_target(k: int, target: float, cap: int) -> int:
    """Smallest truncation radius meeting the target, clipped at the cap."""
    if k == 3:
        need = (lattice_tail_estimate(3, 1.0) / target) ** 2
        return int(min(cap, max(25.0, need)))
    lo, hi = 25, cap
    if lattice_tail_estimate(k, hi) > target:
        return cap
    while lo < hi:
        mid = (lo + hi) // 2
        if lattice_tail_estimate(k, mid) <= target:
            hi = mid
        else:
            lo = mid + 1
    return max(lo, 25)


def _lattice_rounding(k: int) -> float:
    """Rounding budget of the compensated half-lattice sum on the contour.

    Unit lattice points contribute |term| <= 1 and everything else is tiny,
    so the absolute sum is a few units; each term costs ~log2(k) multiplies.
    """
    sum_abs = 6.0 + min(lattice_tail_estimate(k, 4.0, 0.5), 100.0)
    return EPS * (2.0 * k.bit_length() + 6.0) * sum_abs


def _prefix_pow(c: int, d: int, taus: np.ndarray, k: int) -> np.ndarray:
    w = 1.0 / (c * taus + d)
    out = np.ones_like(w)
    base = w
    kk = k
    while kk:
        if kk & 1:
            out = out * base
        kk >>= 1
        if kk:
            base = base * base
    return out


# ---------------------------------------------------------------------------
# the slashed-series engine


class SlashedSeries:
    """Evaluator for f|gamma with f one of the series kinds.

    gamma with c == 0 routes through the q-expansion (the series are
    1-periodic); c != 0 routes through the half-lattice sum.  Batch methods
    accept numpy arrays and report a shared absolute error budget via
    ``abs_err_bound``.
    """

    def __init__(self, kind, k: int, gamma: UniModularMatrix,
                 params: EvalParams = DEFAULT_PARAMS):
        self.kind = SeriesKind.parse(kind)
        self.k = int(k)
        self.gamma = gamma
        self.params = params
        if self.kind == SeriesKind.G and gamma != UniModularMatrix.identity():
            raise ValueError("slashed evaluation supports kinds E and GG")
        if gamma.c == 0:
            self.route = "fourier"
            # gamma = (±1, b; 0, ±1): f|gamma = d^{-k} f(tau + b d)
            self.sign = 1.0 if gamma.d == 1 else (-1.0) ** (self.k % 2)
            self.radius = 0
        else:
            if self.k < 3:
                raise ValueError("lattice evaluation needs k >= 3")
            # Small weights have fat lattice tails; there the defining slash
            # (c tau + d)^{-k} f(gamma tau) through the q-expansion is both
            # cheaper and far more accurate, because Im(gamma tau) stays
            # bounded below on the truncated contour region -- provided the
            # cusp a/c is shallow (small c^2+d^2), else q at gamma tau
            # approaches the unit circle near the top edge.  For larger k
            # the q-expansion at gamma tau cancels catastrophically and the
            # lattice route wins.
            shallow = gamma.c ** 2 + gamma.d ** 2 <= 130
            self.route = "slash_fourier" if (self.k <= 9 and shallow) else "lattice"
            self.sign = 1.0
            self.radius = params.lattice_radius or radius_for_target(
                self.k, params.target_abs_err, params.lattice_cap
            )
        self._last_err = 0.0

    # -- plain values -------------------------------------------------------

    def _slash_fourier(self, taus: np.ndarray, want_derivative: bool = False):
        """f|gamma via the defining slash and the q-expansion at gamma tau."""
        g = self.gamma
        k = self.k
        jden = g.c * taus + g.d
        gtaus = (g.a * taus + g.b) / jden
        cocycle = _prefix_pow(g.c, g.d, taus, k)
        coc_abs = np.abs(cocycle)
        loose = replace(self.params, q_terms=16384, target_abs_err=1e-13)
        evals, e_errs = _fourier_batch_full(SeriesKind.E, k, gtaus, loose)
        if not want_derivative:
            # pair each point's cocycle with its own q-expansion budget
            err = float((coc_abs * e_errs).max()) if e_errs.size else 0.0
            if self.kind == SeriesKind.E:
                self._last_err = err
                return cocycle * evals
            ck = fourier_constant(k)
            self._last_err = err / abs(ck)
            return cocycle * (evals - 1.0) / ck
        dvals, d_err = _fourier_derivative_batch(SeriesKind.E, k, gtaus, loose)
        dcoc = -k * g.c * _prefix_pow(g.c, g.d, taus, k + 1)
        inner = dvals / (jden * jden)
        err = float((coc_abs * (d_err * np.abs(1.0 / (jden * jden)) + k * e_errs)).max())
        if self.kind == SeriesKind.E:
            self._last_err = err
            return dcoc * evals + cocycle * inner
        ck = fourier_constant(k)
        self._last_err = err / abs(ck)
        return (dcoc * (evals - 1.0) + cocycle * inner) / ck

    def values(self, taus) -> np.ndarray:
        taus = np.asarray(taus, dtype=np.complex128)
        if self.route == "fourier":
            vals, err = fourier_batch(self.kind, self.k, taus, self.params)
            self._last_err = err
            return self.sign * vals
        if self.route == "slash_fourier":
            return self._slash_fourier(taus)
        c, d, k = self.gamma.c, self.gamma.d, self.k
        ms, ns = half_lattice(c, d, self.radius)
        vals = pow_sum_batch(ms, ns, taus, k)
        if self.kind == SeriesKind.E:
            vals = vals + _prefix_pow(c, d, taus, k)
        lam_min = min(quad_form_min(complex(t)) for t in taus.ravel()) if taus.size else 0.5
        err = lattice_tail_estimate(k, self.radius, lam_min) + _lattice_rounding(k)
        if self.kind == SeriesKind.GG:
            ck = fourier_constant(k)
            vals = vals / ck
            err /= abs(ck)
        self._last_err = err
        return vals

    def derivative_values(self, taus) -> np.ndarray:
        taus = np.asarray(taus, dtype=np.complex128)
        k = self.k
        if self.route == "fourier":
            vals, err = _fourier_derivative_batch(self.kind, k, taus, self.params)
            self._last_err = err
            return self.sign * vals
        if self.route == "slash_fourier":
            return self._slash_fourier(taus, want_derivative=True)
        c, d = self.gamma.c, self.gamma.d
        ms, ns = half_lattice(c, d, self.radius)
        vals = pow_sum_deriv_batch(ms, ns, taus, k)
        if self.kind == SeriesKind.E:
            vals = vals + c * _prefix_pow(c, d, taus, k + 1)
        vals = -k * vals
        lam_min = min(quad_form_min(complex(t)) for t in taus.ravel()) if taus.size else 0.5
        err = k * (math.sqrt(self.radius) * lattice_tail_estimate(k, self.radius, lam_min)
                   + _lattice_rounding(k))
        if self.kind == SeriesKind.GG:
            ck = fourier_constant(k)
            vals = vals / ck
            err /= abs(ck)
        self._last_err = err
        return vals

    # -- values on the unit arc, prenormalized by e^{ik theta/2} ------------

    def hat_values(self, thetas) -> np.ndarray:
        """e^{ik theta/2} * (f|gamma)(e^{i theta}) for theta in [pi/3, 2pi/3].

        Computed in a cancellation-free split: the lattice points with
        m^2 + n^2 < 5 contribute closed trigonometric terms, the rest a
        uniformly small folded sum, so the tiny imaginary parts that control
        zero locations near the arc survive in double precision.
        """
        thetas = np.real(np.asarray(thetas)).astype(float)
        k = self.k
        if self.route == "fourier" and k < 11:
            taus = np.exp(1j * thetas)
            vals, err = fourier_batch(self.kind, k, taus, self.params)
            self._last_err = err
            return self.sign * np.exp(0.5j * k * thetas) * vals
        if self.route == "slash_fourier":
            # small k: no cancellation risk, prenormalize directly
            return np.exp(0.5j * k * thetas) * self._slash_fourier(np.exp(1j * thetas))
        gamma = self.gamma
        c, d = gamma.c, gamma.d
        sgn_k = (-1.0) ** (k % 2)

        def in_domain(m, n):
            return d * m > c * n

        u_plus = 0.0   # coefficient of e^{+ik theta/2}   (terms (0, +-1))
        u_minus = 0.0  # coefficient of e^{-ik theta/2}   (terms (+-1, 0))
        s_plus1 = 0.0  # coefficient of (2 cos theta/2)^{-k}  (terms +-(1, 1))
        s_minus1 = 0.0  # coefficient of i^{-k} (2 sin theta/2)^{-k} (terms +-(1,-1))
        if in_domain(0, 1):
            u_plus += 1.0
        if in_domain(0, -1):
            u_plus += sgn_k
        if in_domain(1, 0):
            u_minus += 1.0
        if in_domain(-1, 0):
            u_minus += sgn_k
        if in_domain(1, 1):
            s_plus1 += 1.0
        if in_domain(-1, -1):
            s_plus1 += sgn_k
        if in_domain(1, -1):
            s_minus1 += 1.0
        if in_domain(-1, 1):
            s_minus1 += sgn_k
        prefix_small = None
        if self.kind == SeriesKind.E:
            # (c tau + d)^{-k} joins a closed-form slot when it sits on a
            # unit lattice point, otherwise it is uniformly small on the arc
            if (c, d) == (1, 0):
                u_minus += 1.0
            elif (c, d) == (-1, 0):
                u_minus += sgn_k
            elif (c, d) == (1, 1):
                s_plus1 += 1.0
            elif (c, d) == (-1, -1):
                s_plus1 += sgn_k
            elif (c, d) == (1, -1):
                s_minus1 += 1.0
            elif (c, d) == (-1, 1):
                s_minus1 += sgn_k
            elif (c, d) == (0, 1):
                u_plus += 1.0
            elif (c, d) == (0, -1):
                u_plus += sgn_k
            else:
                prefix_small = (c, d)

        half = 0.5 * k * thetas
        vals = (u_plus + u_minus) * np.cos(half) + 1j * (u_plus - u_minus) * np.sin(half)
        vals = vals.astype(np.complex128)
        vals += s_plus1 * (2.0 * np.cos(0.5 * thetas)) ** (-float(k))
        vals += (s_minus1 * i_to_minus(k)) * (2.0 * np.sin(0.5 * thetas)) ** (-float(k))
        taus = np.exp(1j * thetas)
        hat_rot = np.exp(0.5j * k * thetas)
        if prefix_small is not None:
            vals += hat_rot * _prefix_pow(c, d, taus, k)
        if self.route == "lattice":
            radius = self.radius
            ms, ns = half_lattice(c, d, radius, min_norm=5)
            vals += hat_rot * pow_sum_batch(ms, ns, taus, k)
            err = lattice_tail_estimate(k, radius, 0.5)
        else:
            # unslashed, k >= 11: the folded tail is certified at tiny radii
            radius = self.params.lattice_radius or radius_for_target(
                k, self.params.target_abs_err, self.params.lattice_cap
            )
            ms, ns = half_lattice(0, 1, radius, min_norm=5)
            vals += hat_rot * pow_sum_batch(ms, ns, taus, k)
            err = lattice_tail_estimate(k, radius, 0.5)
        # rounding: slot trig terms plus the k theta/2 argument reduction
        err += EPS * (8.0 + 2.0 * k) + 16.0 * EPS * (2.5) ** (-k / 2.0) * len(ms)
        if self.kind == SeriesKind.GG:
            ck = fourier_constant(k)
            vals = vals / ck
            err /= abs(ck)
        vals *= self.sign
        self._last_err = err
        return vals

    @property
    def abs_err_bound(self) -> float:
        return self._last_err


def _fourier_derivative_batch(kind, k, taus, params):
    """Termwise d/dtau of the q-expansion: 2 pi i sum n a_n q^n."""
    kind = SeriesKind.parse(kind)
    taus = np.asarray(taus, dtype=np.complex128)
    if kind == SeriesKind.G:
        vals, err = _fourier_derivative_batch(SeriesKind.E, k, taus, params)
        z = zeta_value(k)
        return z * vals, z * err
    scale = fourier_constant(k) if kind == SeriesKind.E else 1.0 + 0j
    if scale == 0:
        return np.zeros_like(taus), 0.0
    q = np.exp(2j * math.pi * taus)
    x = float(np.abs(q).max())
    if x >= 0.999:
        raise AccuracyError("q-expansion derivative near the real axis")
    sigma = divisor_sums(k - 1, 64)
    vals = np.zeros_like(taus)
    qp = q.copy()
    sum_abs = 0.0
    target = params.target_abs_err
    tail = math.inf
    n = 0
    while n < params.q_terms:
        n += 1
        if n >= len(sigma):
            sigma = divisor_sums(k - 1, 2 * len(sigma))
        coef = scale * (n * float(sigma[n]))
        vals += coef * qp
        sum_abs += abs(coef) * x ** n
        qp *= q
        ratio = ((n + 2) / (n + 1)) ** max(k, 3) * x
        if ratio < 1.0:
            tail = abs(scale) * (n + 1) * _coefficient_bound(k, n + 1) * x ** (n + 1) / (1.0 - ratio)
            if tail < target / 16.0 or tail < sum_abs * EPS:
                break
    vals *= 2j * math.pi
    err = TWO_PI * (tail + 8.0 * EPS * sum_abs)
    return vals, err


# ---------------------------------------------------------------------------
# public single-point operations


def _is_cusp(tau) -> bool:
    return isinstance(tau, Cusp) or tau == math.inf


def eval_series(kind, k: int, tau, params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """q-expansion evaluation; at the cusp at infinity returns the constant."""
    kind = SeriesKind.parse(kind)
    if _is_cusp(tau):
        return EvalResult(constant_term(kind, k), 0.0)
    vals, err = fourier_batch(kind, k, np.array([tau], dtype=complex), params)
    return EvalResult(complex(vals[0]), err)


def eval_lattice(kind, k: int, tau, params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """Truncated coprime lattice-sum evaluation (k >= 3)."""
    kind = SeriesKind.parse(kind)
    if k == 2:
        raise ValueError("conditionally convergent weight-2 lattice sums are not supported")
    if k < 3:
        raise ValueError("lattice evaluation needs k >= 3")
    if _is_cusp(tau):
        return EvalResult(constant_term(kind, k), 0.0)
    tau = complex(tau)
    # the series are 1-periodic; recentre for a better-conditioned sum
    shift = round(tau.real)
    tau -= shift
    if kind == SeriesKind.G:
        inner = eval_lattice(SeriesKind.E, k, tau, params)
        z = zeta_value(k)
        return EvalResult(z * inner.value, z * inner.abs_err_bound)
    radius = params.lattice_radius or radius_for_target(k, params.target_abs_err, params.lattice_cap)
    ms, ns = half_lattice(0, 1, radius)
    val = complex(pow_sum_batch(ms, ns, np.array([tau], dtype=complex), k)[0])
    err = lattice_tail_estimate(k, radius, quad_form_min(tau)) + 32.0 * EPS * (4.0 + k)
    if kind == SeriesKind.E:
        return EvalResult(1.0 + val, err)
    ck = fourier_constant(k)
    return EvalResult(val / ck, err / abs(ck))


def eval_slashed(kind, k: int, gamma: UniModularMatrix, tau,
                 params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """(c tau + d)^{-k} f(gamma tau) for the given matrix, via its own series."""
    series = SlashedSeries(kind, k, gamma, params)
    vals = series.values(np.array([tau], dtype=complex))
    return EvalResult(complex(vals[0]), series.abs_err_bound)


def hat_eval(kind, k: int, gamma: UniModularMatrix, theta: float,
             params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """e^{ik theta/2} (f|gamma)(e^{i theta}); theta in [pi/3, 2pi/3]."""
    if not (math.pi / 3 - 1e-12 <= theta <= 2 * math.pi / 3 + 1e-12):
        raise ValueError("theta outside [pi/3, 2pi/3]")
    series = SlashedSeries(kind, k, gamma, params)
    vals = series.hat_values(np.array([theta], dtype=float))
    return EvalResult(complex(vals[0]), series.abs_err_bound)


def derivative(kind, k: int, gamma: UniModularMatrix, tau,
               params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """Termwise analytic derivative of the (possibly slashed) series."""
    series = SlashedSeries(kind, k, gamma, params)
    vals = series.derivative_values(np.array([tau], dtype=complex))
    return EvalResult(complex(vals[0]), series.abs_err_bound)


def evaluate(kind, k: int, tau, params: EvalParams = DEFAULT_PARAMS) -> EvalResult:
    """Mode dispatcher: AUTO picks the q-expansion for Im tau >= 0.6."""
    if _is_cusp(tau):
        return eval_series(kind, k, tau, params)
    mode = params.mode
    if mode == EvalMode.AUTO:
        use_q = complex(tau).imag >= AUTO_IM_THRESHOLD or k < 3
        mode = EvalMode.Q_EXPANSION if use_q else EvalMode.LATTICE
    if mode == EvalMode.Q_EXPANSION:
        result = eval_series(kind, k, tau, params)
    else:
        result = eval_lattice(kind, k, tau, params)
    if result.abs_err_bound > params.target_abs_err:
        raise AccuracyError(
            f"achievable error {result.abs_err_bound:.3g} exceeds target "
            f"{params.target_abs_err:.3g} (kind={SeriesKind.parse(kind).value}, k={k})"
        )
    return result
