"""Critical site percolation on the triangular lattice in a half-plane box.

Sites use axial coordinates (x, y), y >= 0, with neighbours
(x +- 1, y), (x, y + 1), (x - 1, y + 1), (x, y - 1), (x + 1, y - 1);
the embedding is (x + y/2, y sqrt(3)/2), so row y = 0 is the boundary.
Each site is open with probability 1/2, decided lazily by a SplitMix64 hash
of (seed, stream, sample, site) so that nothing is stored per sample.

Boundary points are segments of 2w + 1 bottom-row sites.  A segment is
linked to every cluster containing one of its open sites, and clusters
sharing a segment are chained together.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DegenerateError, DomainError, MemoryBudgetError
from .ode_core import cross_ratio

__all__ = [
    "McConfig",
    "McTally",
    "run_box",
    "points_for_lambda",
    "rhombus_crossing",
    "one_arm",
    "OneArmResult",
    "CrossingResult",
    "BYTES_PER_SITE",
    "MEMORY_BUDGET",
    "CSV_HEADER",
]

BYTES_PER_SITE = 8  # int32 visit label + int32 queue slot
MEMORY_BUDGET = 2 * 1024**3
CSV_HEADER = "lambda,L,w,samples,n_1234,n_12_34,n_14_23,ratio,stderr"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@numba.njit(cache=True)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _sample_key(seed, stream, sample):
    k = _mix(np.uint64(seed) + _GOLDEN)
    k = _mix(k + np.uint64(stream) * _GOLDEN)
    return _mix(k + np.uint64(sample) * _GOLDEN)


@numba.njit(cache=True)
def _is_open(key, site):
    return (_mix(key + np.uint64(site) * _GOLDEN) >> np.uint64(63)) == np.uint64(1)


def _check_memory(n_sites: int):
    need = n_sites * BYTES_PER_SITE
    if need > MEMORY_BUDGET:
        raise MemoryBudgetError(f"{n_sites} sites need {need} bytes, budget is {MEMORY_BUDGET}")


# --- four-point box ---------------------------------------------------------------

@dataclass(frozen=True)
class McConfig:
    """Box of ``aspect * L`` columns and ``L`` rows; ``points`` are segment
    centers on the bottom row, in increasing order."""

    L: int
    aspect: float
    points: tuple[int, int, int, int]
    w: int
    samples: int
    seed: int = 0
    workers: int = 1
    closed_far_boundary: bool = True

    def __post_init__(self):
        if self.L < 8 or self.aspect < 2:
            raise DomainError("need L >= 8 and aspect >= 2")
        if self.w < 1 or self.samples < 1 or self.workers < 1:
            raise DomainError("w, samples and workers must be positive")
        xs = self.points
        if len(xs) != 4 or any(b - a <= 2 * self.w for a, b in zip(xs, xs[1:])):
            raise DegenerateError("segments must be ordered and disjoint")
        W = self.width
        if xs[0] - self.w < W // 4 or xs[3] + self.w >= W - W // 4:
            raise DomainError("marked points must sit in the central half of the bottom row")
        _check_memory(W * self.L)

    @property
    def width(self) -> int:
        return int(round(self.aspect * self.L))

    @property
    def lam(self) -> float:
        return cross_ratio(*(float(x) for x in self.points))


@dataclass(frozen=True)
class McTally:
    lam: float
    samples: int
    n_1234: int
    n_12_34: int
    n_14_23: int
    n_13_24: int
    n_other: int
    seg_open: tuple[int, int, int, int] = field(default=(0, 0, 0, 0), compare=False)

    @property
    def total(self) -> int:
        return self.n_1234 + self.n_12_34 + self.n_14_23

    @property
    def ratio_estimate(self) -> float:
        return self.n_14_23 / self.total if self.total else math.nan

    @property
    def stderr(self) -> float:
        n = self.total
        if not n:
            return math.nan
        r = self.ratio_estimate
        return math.sqrt(r * (1.0 - r) / n)

    @property
    def ratio_12_34(self) -> float:
        """(12)(34) share of the total; the mirror of ratio_estimate under lambda -> 1 - lambda."""
        return self.n_12_34 / self.total if self.total else math.nan

    def merge(self, other: "McTally") -> "McTally":
        return McTally(
            self.lam,
            self.samples + other.samples,
            self.n_1234 + other.n_1234,
            self.n_12_34 + other.n_12_34,
            self.n_14_23 + other.n_14_23,
            self.n_13_24 + other.n_13_24,
            self.n_other + other.n_other,
            tuple(a + b for a, b in zip(self.seg_open, other.seg_open)),
        )

    def csv_row(self, L: int, w: int) -> str:
        vals = [self.lam, L, w, self.samples, self.n_1234, self.n_12_34, self.n_14_23,
                self.ratio_estimate, self.stderr]
        return ",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in vals)


@numba.njit(cache=True)
def _box_kernel(W, H, lo, hi, seed, stream, start, count, closed_far):
    """Link-pattern counts over samples start .. start + count - 1.

    Returns (n_1234, n_12_34, n_14_23, n_13_24, n_other, open0..open3),
    where open_i counts open hash bits on segment i (a sanity statistic).
    """
    n = W * H
    label = np.zeros(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    seg_of = np.full(W, -1, dtype=np.int32)
    for i in range(4):
        for c in range(lo[i], hi[i] + 1):
            seg_of[c] = i
    out = np.zeros(9, dtype=np.int64)
    dx = np.array([1, -1, 0, -1, 0, 1])
    dy = np.array([0, 0, 1, 1, -1, -1])
    far = np.empty(W + 2 * H, dtype=np.int64)
    nfar = 0
    for s in range(n):
        y = s // W
        col = s - y * W
        if y > 0 and (y == H - 1 or col == 0 or col == W - 1):
            far[nfar] = s
            nfar += 1
    comp = np.zeros(4, dtype=np.int32)
    stamp = 0
    for smp in range(start, start + count):
        key = _sample_key(seed, stream, smp)
        for i in range(4):
            for c in range(lo[i], hi[i] + 1):
                if _is_open(key, c):
                    out[5 + i] += 1
        stamp += 1
        comp[:] = -1
        for i in range(4):
            if i == 1 and comp[1] < 0 and comp[2] < 0 and comp[3] < 0:
                # x1 reaches no other segment: the sample is "other" whatever the rest does
                comp[1] = 1
                comp[2] = 2
                comp[3] = 3
                break
            if comp[i] >= 0:
                continue
            comp[i] = i
            far_added = False
            head = 0
            tail = 0
            for c in range(lo[i], hi[i] + 1):
                if _is_open(key, c):
                    label[c] = stamp
                    queue[tail] = c
                    tail += 1
            while head < tail:
                s = queue[head]
                head += 1
                y = s // W
                # column index of the row-sheared rectangle
                col = s - y * W
                if not closed_far and not far_added and (y == H - 1 or col == 0 or col == W - 1):
                    # open far boundary: every open far site joins one ghost node
                    far_added = True
                    for f in range(nfar):
                        t = far[f]
                        if label[t] != stamp and _is_open(key, t):
                            label[t] = stamp
                            queue[tail] = t
                            tail += 1
                if y == 0 and seg_of[col] >= 0 and comp[seg_of[col]] < 0:
                    # the cluster touches segment j: chain in all of j's open sites
                    j = seg_of[col]
                    comp[j] = i
                    for c in range(lo[j], hi[j] + 1):
                        if label[c] != stamp and _is_open(key, c):
                            label[c] = stamp
                            queue[tail] = c
                            tail += 1
                x = col - (y >> 1)
                for d in range(6):
                    ny = y + dy[d]
                    if ny < 0 or ny >= H:
                        continue
                    ncol = x + dx[d] + (ny >> 1)
                    if ncol < 0 or ncol >= W:
                        continue
                    t = ny * W + ncol
                    if label[t] == stamp or not _is_open(key, t):
                        continue
                    label[t] = stamp
                    queue[tail] = t
                    tail += 1
        a, b, c, d = comp[0], comp[1], comp[2], comp[3]
        if a == b and b == c and c == d:
            out[0] += 1
        elif a == b and c == d:
            out[1] += 1
        elif a == d and b == c:
            out[2] += 1
        elif a == c and b == d:
            out[3] += 1
        else:
            out[4] += 1
    return out


def _box_job(args):
    W, H, lo, hi, seed, stream, start, count, closed = args
    return _box_kernel(W, H, np.asarray(lo, np.int64), np.asarray(hi, np.int64),
                       seed, stream, start, count, closed)


def _split(samples: int, workers: int):
    base, extra = divmod(samples, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


def _run_jobs(fn, jobs, workers: int):
    if workers == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def run_box(cfg: McConfig) -> McTally:
    """Tally the boundary link patterns of ``cfg.samples`` independent samples."""
    W, H = cfg.width, cfg.L
    lo = [x - cfg.w for x in cfg.points]
    hi = [x + cfg.w for x in cfg.points]
    jobs = [(W, H, lo, hi, cfg.seed, k, 0, n, cfg.closed_far_boundary)
            for k, n in enumerate(_split(cfg.samples, cfg.workers)) if n]
    total = np.zeros(9, dtype=np.int64)
    for r in _run_jobs(_box_job, jobs, cfg.workers):
        total += r
    seg_open = tuple(int(v) for v in total[5:])
    if min(seg_open) == 0:
        raise DegenerateError("a segment never had an open site; check the configuration")
    return McTally(cfg.lam, cfg.samples, *(int(v) for v in total[:5]), seg_open)


def points_for_lambda(
    lam: float, L: int, aspect: float = 2.0, w: int = 3, half_span: int | None = None
) -> tuple[int, int, int, int]:
    """Integer centers symmetric about the box middle with cross-ratio close to lam.

    The outer pair sits ``half_span`` (default L/8) from the middle.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda = {lam} outside (0, 1)")
    W = int(round(aspect * L))
    mid = W // 2
    b = max(L // 8, 4 * w + 4) if half_span is None else int(half_span)
    r = math.sqrt(lam)
    a = max(int(round(b * (1.0 - r) / (1.0 + r))), w + 1)
    if b - a <= 2 * w:
        raise DegenerateError("lambda too close to 0 for this box")
    return (mid - b, mid - a, mid + a, mid + b)


# --- rhombus crossing ----------------------------------------------------------------

@numba.njit(cache=True)
def _crossing_kernel(L, seed, stream, start, count):
    """Left-right open crossings of the L x L axial rhombus."""
    n = L * L
    label = np.zeros(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    dx = np.array([1, -1, 0, -1, 0, 1])
    dy = np.array([0, 0, 1, 1, -1, -1])
    hits = 0
    for smp in range(start, start + count):
        key = _sample_key(seed, stream, smp)
        mark = smp - start + 1
        head = 0
        tail = 0
        for y in range(L):
            s = y * L
            if _is_open(key, s):
                label[s] = mark
                queue[tail] = s
                tail += 1
        found = False
        while head < tail and not found:
            s = queue[head]
            head += 1
            y = s // L
            x = s - y * L
            for d in range(6):
                nx = x + dx[d]
                ny = y + dy[d]
                if nx < 0 or nx >= L or ny < 0 or ny >= L:
                    continue
                t = ny * L + nx
                if label[t] == mark or not _is_open(key, t):
                    continue
                if nx == L - 1:
                    found = True
                    break
                label[t] = mark
                queue[tail] = t
                tail += 1
        if found:
            hits += 1
    return hits


@dataclass(frozen=True)
class CrossingResult:
    L: int
    samples: int
    hits: int

    @property
    def probability(self) -> float:
        return self.hits / self.samples

    @property
    def stderr(self) -> float:
        p = self.probability
        return math.sqrt(p * (1.0 - p) / self.samples)


def _crossing_job(args):
    return _crossing_kernel(*args)


def rhombus_crossing(L: int, samples: int, seed: int = 0, workers: int = 1) -> CrossingResult:
    """Left-right crossing frequency of an L x L rhombus; exactly 1/2 at criticality."""
    if L < 2 or samples < 1:
        raise DomainError("need L >= 2 and samples >= 1")
    _check_memory(L * L)
    jobs = [(L, seed, k, 0, n) for k, n in enumerate(_split(samples, workers)) if n]
    return CrossingResult(L, samples, int(sum(_run_jobs(_crossing_job, jobs, workers))))


# --- boundary one-arm ---------------------------------------------------------------

@numba.njit(cache=True)
def _one_arm_kernel(R, seed, stream, start, count):
    """Largest Euclidean distance reached from the bottom-row origin, per sample.

    The box is 2R + 1 columns by R rows sheared to a rectangle; exploration
    stops once distance R is reached.
    """
    W = 2 * R + 1
    H = int(R * 2.0 / math.sqrt(3.0)) + 2
    n = W * H
    label = np.zeros(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    dx = np.array([1, -1, 0, -1, 0, 1])
    dy = np.array([0, 0, 1, 1, -1, -1])
    out = np.zeros(count, dtype=np.float64)
    origin = R
    h = math.sqrt(3.0) / 2.0
    for smp in range(start, start + count):
        key = _sample_key(seed, stream, smp)
        mark = smp - start + 1
        if not _is_open(key, origin):
            out[smp - start] = -1.0
            continue
        label[origin] = mark
        queue[0] = origin
        head = 0
        tail = 1
        best = 0.0
        while head < tail and best < R:
            s = queue[head]
            head += 1
            y = s // W
            x = s - y * W - (y >> 1)
            for d in range(6):
                ny = y + dy[d]
                if ny < 0 or ny >= H:
                    continue
                nx = x + dx[d]
                ncol = nx + (ny >> 1)
                if ncol < 0 or ncol >= W:
                    continue
                t = ny * W + ncol
                if label[t] == mark or not _is_open(key, t):
                    continue
                label[t] = mark
                queue[tail] = t
                tail += 1
                ex = nx + 0.5 * ny - R
                ey = h * ny
                r = math.sqrt(ex * ex + ey * ey)
                if r > best:
                    best = r
        out[smp - start] = best
    return out


@dataclass(frozen=True)
class OneArmResult:
    radii: tuple[int, ...]
    probabilities: tuple[float, ...]
    stderrs: tuple[float, ...]
    exponent: float
    samples: int


def _one_arm_job(args):
    return _one_arm_kernel(*args)


def one_arm(L_list, samples: int, seed: int = 0, workers: int = 1) -> OneArmResult:
    """Fit P[origin connected to distance R] ~ R^(-exponent) over R in L_list.

    One box of radius max(L_list) serves all radii at once.
    """
    radii = sorted(int(r) for r in L_list)
    if len(radii) < 4:
        raise DomainError("need at least four radii")
    if radii[0] < 2 or samples < 1:
        raise DomainError("radii must be >= 2 and samples >= 1")
    R = radii[-1]
    _check_memory((2 * R + 1) * (int(R * 2 / math.sqrt(3)) + 2))
    jobs = [(R, seed, k, 0, n) for k, n in enumerate(_split(samples, workers)) if n]
    reach = np.concatenate(_run_jobs(_one_arm_job, jobs, workers))
    probs, errs = [], []
    for r in radii:
        p = float(np.mean(reach >= r))
        if p == 0.0:
            raise DegenerateError(f"no sample reached distance {r}")
        probs.append(p)
        errs.append(math.sqrt(p * (1.0 - p) / samples))
    slope, _ = np.polyfit(np.log(radii), np.log(probs), 1)
    return OneArmResult(tuple(radii), tuple(probs), tuple(errs), float(-slope), samples)
