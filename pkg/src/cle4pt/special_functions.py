"""Gamma, Gauss and generalized hypergeometric functions, and quadrature.

These are the only transcendental kernels used elsewhere in the package.
All routines work on Python floats and are pure.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError, PoleError, UnsupportedError

__all__ = [
    "QuadResult",
    "gamma_fn",
    "rgamma",
    "hyp2f1",
    "hyp2f1_deriv",
    "hyp3f2",
    "hyp3f2_deriv",
    "integrate",
]

# Lanczos approximation, g = 6.0246..., 13 terms (the cephes/Boost
# ``lanczos13m53`` rational form, scaled by exp(-g)).
_LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = (
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
)
_LANCZOS_DEN = (
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
)

_SERIES_REL_TOL = 1e-17
_SERIES_QUIET_RUN = 3
_MAX_TERMS = 1_000_000
_INTEGER_TOL = 1e-9


def _lanczos_sum_expg_scaled(x: float) -> float:
    # Both polynomials are stored by descending power; for x > 1 evaluate in
    # 1/x to keep the Horner recursion well scaled.
    if x <= 1.0:
        num = den = 0.0
        for cn, cd in zip(_LANCZOS_NUM, _LANCZOS_DEN):
            num = num * x + cn
            den = den * x + cd
    else:
        z = 1.0 / x
        num = den = 0.0
        for cn, cd in zip(reversed(_LANCZOS_NUM), reversed(_LANCZOS_DEN)):
            num = num * z + cn
            den = den * z + cd
    return num / den


def _sinpi(x: float) -> float:
    r = math.fmod(x, 2.0)
    if r < 0:
        r += 2.0
    if r == 0.0 or r == 1.0:
        return 0.0
    if r <= 0.5:
        return math.sin(math.pi * r)
    if r <= 1.5:
        return -math.sin(math.pi * (r - 1.0))
    return -math.sin(math.pi * (2.0 - r)) if r > 1.5 else 0.0


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x``.

    Raises :class:`PoleError` at 0, -1, -2, ...
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x < 0.5:
        # reflection
        return math.pi / (_sinpi(x) * gamma_fn(1.0 - x))
    if x == math.floor(x) and x <= 23:
        return float(math.factorial(int(x) - 1))
    zgh = x + _LANCZOS_G - 0.5
    s = _lanczos_sum_expg_scaled(x)
    # the exp(-g) scaling of the sum absorbs the g part of exp(-zgh)
    if x < 140.0:
        return s * math.pow(zgh, x - 0.5) / math.exp(x - 0.5)
    half = math.pow(zgh, 0.5 * x - 0.25)
    return s * (half / math.exp(x - 0.5)) * half


def rgamma(x: float) -> float:
    """1/Gamma(x), equal to zero at the poles of Gamma."""
    if _is_nonpositive_integer(x):
        return 0.0
    return 1.0 / gamma_fn(x)


def _near_integer(x: float, tol: float = _INTEGER_TOL) -> bool:
    return abs(x - round(x)) <= tol


def _sum_series(next_ratio: Callable[[int], float], x: float) -> float:
    """Sum ``sum_n t_n`` with t_0 = 1 and t_{n+1} = t_n * next_ratio(n) * x."""
    total = 1.0
    term = 1.0
    quiet = 0
    for n in range(_MAX_TERMS):
        term *= next_ratio(n) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) < _SERIES_REL_TOL * abs(total):
            quiet += 1
            if quiet >= _SERIES_QUIET_RUN:
                return total
        else:
            quiet = 0
    raise ConvergenceError(f"series did not converge in {_MAX_TERMS} terms")


def _hyp2f1_series(a: float, b: float, c: float, x: float) -> float:
    if x == 0.0:
        return 1.0
    return _sum_series(lambda n: (a + n) * (b + n) / ((c + n) * (n + 1.0)), x)


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real x <= 1.

    Power series for |x| <= 1/2, the 1 - x connection formula on (1/2, 1)
    when c - a - b is not an integer, Gauss summation at x = 1, and the Pfaff
    transformation for x < -1/2.
    """
    a, b, c, x = float(a), float(b), float(c), float(x)
    if _is_nonpositive_integer(c):
        raise PoleError(f"2F1 undefined for c = {c}")
    if x > 1.0:
        raise DomainError(f"2F1 argument {x} > 1 is outside the real branch")
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        # terminating polynomial, valid everywhere
        return _hyp2f1_series(a, b, c, x)
    s = c - a - b
    if x == 1.0:
        if s <= 0:
            raise DomainError(f"2F1 at x=1 diverges for c-a-b = {s} <= 0")
        return gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
    if abs(x) <= 0.5:
        return _hyp2f1_series(a, b, c, x)
    if x < -0.5:
        z = x / (x - 1.0)
        return (1.0 - x) ** (-a) * hyp2f1(a, c - b, c, z)
    # 1/2 < x < 1
    if _near_integer(s):
        raise UnsupportedError(
            f"2F1 on (1/2, 1) with integer c-a-b = {s} needs the logarithmic "
            "connection formula, which is not implemented"
        )
    y = 1.0 - x
    t1 = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
    t2 = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b)
    out = 0.0
    if t1 != 0.0:
        out += t1 * _hyp2f1_series(a, b, 1.0 - s, y)
    if t2 != 0.0:
        out += t2 * y**s * _hyp2f1_series(c - a, c - b, 1.0 + s, y)
    return out


def hyp2f1_deriv(a: float, b: float, c: float, x: float, order: int) -> float:
    """``order``-th derivative of 2F1(a, b; c; x) with respect to x."""
    coef = 1.0
    for j in range(order):
        coef *= (a + j) * (b + j) / (c + j)
    if coef == 0.0:
        return 0.0
    return coef * hyp2f1(a + order, b + order, c + order, x)


def hyp3f2(a1: float, a2: float, a3: float, b1: float, b2: float, x: float) -> float:
    """Generalized hypergeometric 3F2(a1, a2, a3; b1, b2; x) by direct summation.

    Valid for |x| < 1, and at x = 1 when b1 + b2 - a1 - a2 - a3 > 0 (slowly).
    """
    if _is_nonpositive_integer(b1) or _is_nonpositive_integer(b2):
        raise PoleError("3F2 lower parameters must not be nonpositive integers")
    terminating = any(_is_nonpositive_integer(a) for a in (a1, a2, a3))
    if not terminating:
        if abs(x) > 1.0:
            raise DomainError(f"3F2 series diverges at |x| = {abs(x)} > 1")
        if x == 1.0 and b1 + b2 - a1 - a2 - a3 <= 0:
            raise DomainError("3F2 at x=1 diverges unless sum(b) - sum(a) > 0")
    if x == 0.0:
        return 1.0
    return _sum_series(
        lambda n: (a1 + n) * (a2 + n) * (a3 + n) / ((b1 + n) * (b2 + n) * (n + 1.0)),
        x,
    )


def hyp3f2_deriv(a1, a2, a3, b1, b2, x: float, order: int) -> float:
    coef = 1.0
    for j in range(order):
        coef *= (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j))
    if coef == 0.0:
        return 0.0
    return coef * hyp3f2(a1 + order, a2 + order, a3 + order, b1 + order, b2 + order, x)


# ---------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.abs_error_estimate < 0:
            raise ValueError("error estimate must be nonnegative")
        if self.evaluations < 1:
            raise ValueError("at least one evaluation is required")


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

_MAX_DEPTH = 60
_MAX_INTERVALS = 20_000
_EPS = 2.220446049250313e-16


def _gk15(g: Callable[[float], float], lo: float, hi: float) -> tuple[float, float, bool]:
    """Kronrod value, |Kronrod - Gauss|, and whether that difference is
    already at the rounding level of the interval."""
    c = 0.5 * (lo + hi)
    hw = 0.5 * (hi - lo)
    fc = g(c)
    k = _WK[7] * fc
    gs = _WG[3] * fc
    kabs = _WK[7] * abs(fc)
    for j in range(7):
        dx = hw * _XK[j]
        f1 = g(c - dx)
        f2 = g(c + dx)
        k += _WK[j] * (f1 + f2)
        kabs += _WK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            gs += _WG[j // 2] * (f1 + f2)
    k *= hw
    gs *= hw
    floor = 50.0 * _EPS * hw * kabs
    err = abs(k - gs)
    return k, max(err, floor), err <= floor


def integrate(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over [a, b].

    The interval is first mapped through the cubic smoothstep
    x = a + (b - a)(3t^2 - 2t^3), which turns integrable endpoint power
    singularities x^p (p > -1) into t^(2p+1) behavior; then the subinterval
    with the largest error is bisected until the summed error is below
    ``tol``.  Nodes never touch the endpoints.
    """
    if not a < b:
        raise DomainError(f"integrate needs a < b, got [{a}, {b}]")
    width = b - a
    count = 0

    def g(t: float) -> float:
        nonlocal count
        count += 1
        if t <= 0.5:
            x = a + width * t * t * (3.0 - 2.0 * t)
        else:
            u = 1.0 - t
            x = b - width * u * u * (3.0 - 2.0 * u)
        # deep bisection can round a node onto an endpoint; keep it interior
        if x <= a:
            x = math.nextafter(a, b)
        elif x >= b:
            x = math.nextafter(b, a)
        return f(x) * 6.0 * width * t * (1.0 - t)

    val, err, flat = _gk15(g, 0.0, 1.0)
    heap = [(-err, 0.0, 1.0, val, err, 0, flat)]
    total_val, total_err = val, err
    n_intervals = 1
    while total_err > tol:
        _, lo, hi, v, e, depth, flat = heapq.heappop(heap)
        if flat:
            raise ConvergenceError(
                f"tolerance {tol:.3g} is below the rounding level of the integrand"
            )
        if depth >= _MAX_DEPTH:
            raise ConvergenceError(
                f"quadrature reached bisection depth {_MAX_DEPTH} near t = {lo:.3g}"
            )
        mid = 0.5 * (lo + hi)
        v1, e1, flat1 = _gk15(g, lo, mid)
        v2, e2, flat2 = _gk15(g, mid, hi)
        total_val += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, lo, mid, v1, e1, depth + 1, flat1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2, depth + 1, flat2))
        n_intervals += 1
        if n_intervals > _MAX_INTERVALS:
            raise ConvergenceError("quadrature exceeded the subdivision limit")
    # re-sum to shed accumulated update round-off
    total_val = math.fsum(item[3] for item in heap)
    total_err = max(math.fsum(item[4] for item in heap), 0.0)
    return QuadResult(total_val, total_err, count)
