"""Verification matrices: every theorem, table and inequality at desk scale.

Each suite returns a list of cell dicts {"suite", "cell", "ok", "gating",
"detail"}; a suite passes when every gating cell does.  Conjectural cells
(the divisor-sum series at lambda in {0, +-1}) are reported but never gate.
Cells are independent pure jobs, so the caller may fan them out to a
process pool; results are assembled in deterministic order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from . import bounds as B
from .eisenstein import (
    EvalParams,
    SeriesKind,
    SlashedSeries,
    divisor_sums,
    eval_series,
    fourier_constant,
    half_lattice,
    hat_eval,
    zeta_value,
)
from .moebius import (
    ExtendedRational,
    INFINITY,
    RHO,
    UniModularMatrix,
    parse_extended_rational,
    slash_representative,
)
from .winding import CountOptions, count_zeros, vertical_sign_changes
from .zerofinder import locate_zeros

PI = math.pi

#: the lambda grid of the main count-table reproduction
TABLE1_LAMBDAS = [
    "0", "1/5", "-1/5", "2/5", "-2/5", "1/2", "-1/2", "3/5", "-3/5",
    "4/5", "-4/5", "1", "-1", "3/2", "-3/2", "2", "-2", "7/3", "-7/3", "inf",
]

#: lambda values for the E-vs-GG count comparison (specials excluded)
THM3_LAMBDAS = [
    "1/5", "-1/5", "2/5", "-2/5", "3/5", "-3/5", "4/5", "-4/5",
    "3/2", "-3/2", "2", "-2", "7/3", "-7/3",
]


def _cell(suite: str, cell: str, ok: bool, detail: str = "", gating: bool = True) -> Dict:
    return {"suite": suite, "cell": cell, "ok": bool(ok), "gating": gating,
            "detail": detail}


def _run_cells(jobs: List, workers: int = 1) -> List[Dict]:
    """Evaluate cell jobs (fn, args) deterministically, optionally pooled."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, *args) for fn, args in jobs]
            results = [f.result() for f in futures]
    else:
        results = [fn(*args) for fn, args in jobs]
    out = []
    for r in results:
        out.extend(r if isinstance(r, list) else [r])
    return out


# ---------------------------------------------------------------------------
# table-count suites


def _table1_cell(k: int, lam_str: str) -> Dict:
    lam = parse_extended_rational(lam_str)
    want = B.expected_count(SeriesKind.E, k, lam)
    got = count_zeros(SeriesKind.E, k, lam)
    ok = got.value == want.value and got.snap_dist < 0.05 and got.reliable
    return _cell("table1", f"k={k} lambda={lam}", ok,
                 f"count={got.value} expected={want.value} snap={got.snap_dist:.2e}")


def verify_table1(k_max: int = 51, workers: int = 1) -> List[Dict]:
    jobs = [(_table1_cell, (k, lam)) for k in range(3, k_max + 1, 2)
            for lam in TABLE1_LAMBDAS]
    return _run_cells(jobs, workers)


def _thm3_cell(k: int, lam_str: str) -> Dict:
    lam = parse_extended_rational(lam_str)
    got_gg = count_zeros(SeriesKind.GG, k, lam)
    got_e = count_zeros(SeriesKind.E, k, lam)
    ok = (got_gg.value == got_e.value and got_gg.snap_dist < 0.05
          and got_e.snap_dist < 0.05)
    return _cell("thm3", f"k={k} lambda={lam}", ok,
                 f"GG={got_gg.value} E={got_e.value}")


def verify_thm3(k_max: int = 51, workers: int = 1) -> List[Dict]:
    jobs = [(_thm3_cell, (k, lam)) for k in range(3, k_max + 1, 2)
            for lam in THM3_LAMBDAS]
    return _run_cells(jobs, workers)


def _thm4_cell(k: int) -> Dict:
    want = B.expected_count(SeriesKind.GG, k, INFINITY).value
    via_voa = count_zeros(SeriesKind.GG, k, INFINITY,
                          CountOptions(method="voa"))
    via_sc = count_zeros(SeriesKind.GG, k, INFINITY,
                         CountOptions(method="sign_change"))
    ok = (via_voa.value == want and via_sc.value == want
          and via_voa.snap_dist < 0.05)
    return _cell("thm4", f"k={k}", ok,
                 f"voa={via_voa.value} sign_change={via_sc.value} expected={want}")


def verify_thm4(k_max: int = 51, workers: int = 1) -> List[Dict]:
    jobs = [(_thm4_cell, (k,)) for k in range(3, k_max + 1, 2)]
    return _run_cells(jobs, workers)


def _thm2_cell(k: int) -> Dict:
    zeros = locate_zeros(SeriesKind.E, k, INFINITY)
    outer = 4.0 ** (1.0 / k)
    margins = [abs(z.w) - 1.0 for z in zeros]
    resid_ok = all(z.residual < 1e-9 for z in zeros)
    ok = bool(margins) and all(0.0 < m and abs(z.w) < outer
                               for m, z in zip(margins, zeros)) and resid_ok
    if not margins:
        ok = B.expected_count(SeriesKind.E, k, INFINITY).value == 0
    detail = (f"n={len(zeros)} min(|z|-1)={min(margins):.3e} "
              f"max|z|={max(abs(z.w) for z in zeros):.6f} < {outer:.6f}"
              if margins else "no zeros (table value 0)")
    return _cell("thm2", f"k={k}", ok, detail)


def verify_thm2(k_max: int = 51, workers: int = 1) -> List[Dict]:
    jobs = [(_thm2_cell, (k,)) for k in range(7, k_max + 1, 2)]
    return _run_cells(jobs, workers)


def _valence_cell(k: int, seed: int) -> List[Dict]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(10):
        num = int(rng.integers(-40, 41))
        den = int(rng.integers(1, 13))
        lam = ExtendedRational(num, den)
        got = count_zeros(SeriesKind.E, k, lam)
        ok = got.value == Fraction(k, 12) and got.snap_dist < 0.05
        out.append(_cell("valence", f"k={k} lambda={lam}", ok,
                         f"count={got.value} expected={Fraction(k, 12)}"))
    return out


def verify_valence(workers: int = 1) -> List[Dict]:
    jobs = [(_valence_cell, (k, 1000 + k)) for k in (4, 6, 8, 10, 12, 14)]
    return _run_cells(jobs, workers)


def _table2_cell(k: int, lam_str: str) -> Dict:
    lam = parse_extended_rational(lam_str)
    want = B.expected_count(SeriesKind.GG, k, lam)
    got = count_zeros(SeriesKind.GG, k, lam)
    ok = got.value == want.value
    return _cell("table2", f"k={k} lambda={lam}", ok,
                 f"count={got.value} conjectured={want.value} (exploratory)",
                 gating=False)


def verify_table2(k_max: int = 51, workers: int = 1) -> List[Dict]:
    """Exploratory: the conjectural special columns of the divisor-sum table."""
    jobs = [(_table2_cell, (k, lam)) for k in range(3, k_max + 1, 2)
            for lam in ("0", "1", "-1")]
    return _run_cells(jobs, workers)


# ---------------------------------------------------------------------------
# inequality suites


def _brute_hat_remainder(k: int, thetas: np.ndarray, radius: int = 10_000) -> np.ndarray:
    """|R_k| on the arc by direct summation over m^2+n^2 in [5, radius]."""
    ms, ns = half_lattice(0, 1, radius, min_norm=5)
    from ._backend import pow_sum_batch

    taus = np.exp(1j * thetas)
    return np.abs(pow_sum_batch(ms, ns, taus.astype(complex), k))


def _suite_rsd(k_values) -> List[Dict]:
    out = []
    thetas = np.linspace(PI / 3, 2 * PI / 3, 100)
    for k in k_values:
        sampled = _brute_hat_remainder(k, thetas)
        bound = B.rsd_bound(k)
        ok = bool(np.all(sampled <= bound))
        out.append(_cell("bounds", f"rsd k={k}", ok,
                         f"max|R|={sampled.max():.3e} <= {bound:.3e}"))
    return out


def _brute_ik(k: int, thetas: np.ndarray, radius: int = 10_000) -> np.ndarray:
    mmax = math.isqrt(radius)
    total = np.zeros(len(thetas))
    for m in range(1, mmax + 1):
        nmax = math.isqrt(radius - m * m)
        if nmax < 1:
            continue
        n = np.arange(-nmax, 0)
        n = n[np.gcd(m, np.abs(n)) == 1]
        n = n[(m * m + n * n) >= 5]
        if not n.size:
            continue
        for i, th in enumerate(thetas):
            total[i] += np.sum(np.abs(m * np.exp(1j * th) + n) ** (-float(k)))
    return total


def _suite_ik(k_values) -> List[Dict]:
    out = []
    thetas = np.linspace(PI / 3, 2 * PI / 3, 25)
    for k in k_values:
        sampled = _brute_ik(k, thetas)
        bound = np.array([B.ik_bound(k, th) for th in thetas])
        ok = bool(np.all(sampled <= bound))
        out.append(_cell("bounds", f"ik k={k}", ok,
                         f"max ratio={float((sampled / bound).max()):.3f}"))
    return out


def _suite_rkest2(k_values, seed: int = 7) -> List[Dict]:
    rng = np.random.default_rng(seed)
    taus = []
    while len(taus) < 50:
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(0.8, 2.5)
        if x * x + y * y >= 1.0:
            taus.append(complex(x, y))
    taus = np.array(taus)
    from ._backend import pow_sum_batch

    out = []
    for k in k_values:
        bound = B.slashed_remainder_bound(k)
        worst = 0.0
        for lam_str in ("0", "2/5", "1", "3"):
            gamma = slash_representative(parse_extended_rational(lam_str))
            ms, ns = half_lattice(gamma.c, gamma.d, 10_000, min_norm=5)
            vals = pow_sum_batch(ms, ns, taus, k)
            # R_{k,lambda} includes the (c tau + d)^{-k} prefix term
            vals = vals + (gamma.c * taus + gamma.d) ** (-float(k))
            worst = max(worst, float(np.abs(vals).max()))
        ok = worst <= bound
        out.append(_cell("bounds", f"rkest2 k={k}", ok,
                         f"max|R|={worst:.3e} <= {bound:.3e}"))
    return out


def _suite_ekrho(k_values) -> List[Dict]:
    out = []
    for k in k_values:
        val = eval_series(SeriesKind.E, k, RHO).value
        target = complex(1.0, -B.chi3(k) * math.sqrt(3.0))
        lhs = abs(val - target)
        rhs = B.ek_rho_bound(k)
        out.append(_cell("bounds", f"ekrho k={k}", lhs <= rhs,
                         f"|E(rho)-(1-chi i sqrt3)|={lhs:.3e} <= {rhs:.3e}"))
    return out


def _suite_im_hat(k_values) -> List[Dict]:
    out = []
    thetas = np.arange(PI / 3, 2 * PI / 3 + 1e-9, 1e-3)
    ident = UniModularMatrix.identity()
    for k in k_values:
        series = SlashedSeries(SeriesKind.E, k, ident, EvalParams())
        vals = series.hat_values(thetas)
        lower = np.array([B.im_hat_lower_bound(k, th) for th in thetas])
        ok = bool(np.all(np.abs(vals.imag) >= lower))
        margin = float((np.abs(vals.imag) - lower).min())
        out.append(_cell("bounds", f"im_hat k={k}", ok, f"min margin={margin:.3e}"))
    return out


def _suite_hk(k_values) -> List[Dict]:
    out = []
    thetas = np.linspace(PI / 3 + 1e-6, 2 * PI / 3 - 1e-6, 50)
    for k in k_values:
        hks = np.array([B.hk_eval(k, th) for th in thetas])
        ok = bool(np.all(hks > 0))
        out.append(_cell("bounds", f"hk_positive k={k}", ok,
                         f"min H_k={hks.min():.3e}"))
        if k >= 17:
            margins = np.array([B.convexity_margin(k, th) for th in thetas])
            h = 1e-4
            second = np.array([
                (B.hk_eval(k, th + h) - 2 * B.hk_eval(k, th) + B.hk_eval(k, th - h)) / h ** 2
                for th in thetas
            ])
            ok2 = bool(np.all(margins > 0) and np.all(second >= margins - 1e-4 * np.abs(second)))
            out.append(_cell("bounds", f"hk_convex k={k}", ok2,
                             f"min margin={margins.min():.3e} min H''={second.min():.3e}"))
    return out


def _suite_angle(seed: int = 11) -> List[Dict]:
    rng = np.random.default_rng(seed)
    n = 100_000
    z0s = rng.normal(size=n) + 1j * rng.normal(size=n)
    keep = np.abs(z0s) > 1e-3
    z0s = z0s[keep]
    rs = np.abs(z0s) * rng.uniform(0.01, 0.99, size=len(z0s))
    zs = z0s + rs * rng.uniform(0.0, 0.999, size=len(z0s)) * np.exp(
        2j * PI * rng.uniform(size=len(z0s))
    )
    ball_ok = all(B.angle_bounds(z, z0, r) for z, z0, r in zip(zs, z0s, rs))
    a = rng.uniform(0.05, 3.0, size=n)
    b = rng.uniform(0.05, 3.0, size=n)
    ws = (a + rng.exponential(1.0, size=n)) + 1j * b * rng.uniform(-0.999, 0.999, size=n)
    box_ok = all(B.angle_bound_box(w, ai, bi) for w, ai, bi in zip(ws, a, b))
    return [
        _cell("bounds", "angle_ball", bool(ball_ok), f"{len(z0s)} samples"),
        _cell("bounds", "angle_box", bool(box_ok), f"{n} samples"),
    ]


def _random_convex(rng) -> Callable[[float], float]:
    """Random positive strictly convex function with h(2pi/3) < sqrt(3)/2."""
    a = rng.uniform(0.05, 2.0)       # quadratic coefficient
    c = rng.uniform(PI / 3, 2 * PI / 3)
    b = rng.uniform(0.02, 1.5)       # exponential coefficient
    s = rng.uniform(0.5, 4.0)
    base = lambda th: a * (th - c) ** 2 + b * math.exp(s * (th - 2 * PI / 3))
    # scale so the right endpoint stays below sqrt(3)/2 and h stays positive
    end = base(2 * PI / 3)
    scale = rng.uniform(0.2, 0.95) * (math.sqrt(3.0) / 2.0) / end
    floor = rng.uniform(1e-4, 0.02) * math.sqrt(3.0) / 2.0
    cap = (math.sqrt(3.0) / 2.0 - floor) / (scale * end + 1e-30)
    scale *= min(1.0, cap * 0.999)
    return lambda th: scale * base(th) + floor


def _count_roots(fn, lo: float, hi: float, samples: int) -> int:
    ts = np.linspace(lo, hi, samples)
    vals = np.array([fn(t) for t in ts])
    signs = np.sign(vals)
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] * signs[:-1] < 0))


def _suite_caps(k_values, seed: int = 23) -> List[Dict]:
    out = []
    for k in k_values:
        plus_cnt, minus_cnt = B.interval_counts(k)
        s = lambda th: math.sin(k * th / 2.0)
        # brute-force the interval counts
        ts = np.linspace(PI / 3, 2 * PI / 3, 40 * k + 1)
        vals = np.sin(k * ts / 2.0)
        nonneg = vals >= -1e-12
        nonpos = vals <= 1e-12
        def maximal_runs(mask):
            runs = 0
            prev = False
            for v in mask:
                if v and not prev:
                    runs += 1
                prev = v
            return runs
        ok_counts = (maximal_runs(nonneg) == plus_cnt and
                     maximal_runs(nonpos) == minus_cnt)
        out.append(_cell("bounds", f"interval_counts k={k}", ok_counts,
                         f"plus={plus_cnt} minus={minus_cnt}"))
        cap_plus, cap_minus = B.sine_plus_convex_caps(k)
        rng = np.random.default_rng(seed + k)
        ok_caps = True
        worst = (0, 0)
        for _ in range(20):
            h = _random_convex(rng)
            n_plus = _count_roots(lambda th: s(th) + h(th), PI / 3, 2 * PI / 3,
                                  64 * k + 1)
            n_minus = _count_roots(lambda th: s(th) - h(th), PI / 3, 2 * PI / 3,
                                   64 * k + 1)
            worst = (max(worst[0], n_plus), max(worst[1], n_minus))
            if n_plus > cap_plus or n_minus > cap_minus:
                ok_caps = False
        out.append(_cell("bounds", f"sine_convex_caps k={k}", ok_caps,
                         f"worst=({worst[0]},{worst[1]}) caps=({cap_plus},{cap_minus})"))
    return out


def verify_bounds(k_max: int = 31, workers: int = 1) -> List[Dict]:
    ks_odd = list(range(5, min(k_max, 51) + 1, 2))
    ks_9 = [k for k in ks_odd if k >= 9]
    ks_11 = [k for k in ks_odd if k >= 11]
    jobs = [
        (_suite_rsd, (ks_odd,)),
        (_suite_ik, (ks_9,)),
        (_suite_rkest2, (ks_11,)),
        (_suite_ekrho, (ks_odd,)),
        (_suite_im_hat, (ks_11,)),
        (_suite_hk, ([k for k in ks_odd if k >= 11],)),
        (_suite_angle, ()),
        (_suite_caps, (list(range(5, 50, 2)),)),
    ]
    return _run_cells(jobs, workers)


# ---------------------------------------------------------------------------
# suite registry


SUITES: Dict[str, Callable] = {
    "table1": lambda k_max, workers: verify_table1(k_max, workers),
    "thm2": lambda k_max, workers: verify_thm2(k_max, workers),
    "thm3": lambda k_max, workers: verify_thm3(k_max, workers),
    "thm4": lambda k_max, workers: verify_thm4(k_max, workers),
    "bounds": lambda k_max, workers: verify_bounds(min(k_max, 31), workers),
    "valence": lambda k_max, workers: verify_valence(workers),
    "table2": lambda k_max, workers: verify_table2(k_max, workers),
}


def run_suite(name: str, k_max: int = 51, workers: int = 1) -> List[Dict]:
    if name == "all":
        cells = []
        for nm in ("table1", "thm2", "thm3", "thm4", "bounds", "valence", "table2"):
            cells.extend(SUITES[nm](k_max, workers))
        return cells
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](k_max, workers)
