"""Equidistribution statistics over saddle connection spectra.

Experiments here are deterministic Monte Carlo protocols: every random draw
derives from (seed, task index), so results do not depend on worker counts.
The heavy inputs are spectra from the enumerator; statistics on top of them
are plain numpy.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .lengths import pair_amplitude
from .params import ExperimentParameters
from .sl2 import HaarSampler, diag_flow, rotation
from .spectrum import Spectrum, enumerate_up_to_length, first_n
from .surface import TranslationSurface, apply_matrix

TWO_PI = 2.0 * math.pi
HOL_MATCH_TOL = 1e-9


# ---------------------------------------------------------------------------
# Elementary statistics
# ---------------------------------------------------------------------------


def weyl_sum(lengths, p: int) -> complex:
    """(1/N) * sum of exp(2*pi*i*p*length) over the given lengths."""
    arr = np.asarray(lengths, dtype=float)
    if arr.size == 0:
        raise ValueError("weyl_sum needs a non-empty length list")
    phases = np.exp(2j * math.pi * p * arr)
    return complex(phases.mean())


def star_discrepancy(values) -> float:
    """Exact D*_N of points in [0, 1) by the sorted-sample formula."""
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValueError("star_discrepancy needs a non-empty value list")
    if arr[0] < 0.0 or arr[-1] >= 1.0:
        raise ValueError("star_discrepancy values must lie in [0, 1)")
    n = arr.size
    up = np.arange(1, n + 1) / n - arr
    down = arr - np.arange(0, n) / n
    return float(max(up.max(), down.max()))


def _match_multisets(a: np.ndarray, b: np.ndarray, tol: float) -> int:
    """Number of greedily matched pairs within tol in each coordinate.

    Distinct holonomies are separated by far more than tol, so greedy
    matching inside the sliding x-window is exact.
    """
    if len(a) == 0 or len(b) == 0:
        return 0
    a = a[np.lexsort((a[:, 1], a[:, 0]))]
    b = b[np.lexsort((b[:, 1], b[:, 0]))]
    used = np.zeros(len(b), dtype=bool)
    matched = 0
    j0 = 0
    for ax, ay in a:
        while j0 < len(b) and b[j0, 0] < ax - tol:
            j0 += 1
        j = j0
        while j < len(b) and b[j, 0] <= ax + tol:
            if not used[j] and abs(b[j, 1] - ay) <= tol:
                used[j] = True
                matched += 1
                break
            j += 1
    return matched


def _hol_tol(*arrays: np.ndarray) -> float:
    scale = 1.0
    for arr in arrays:
        if arr.size:
            scale = max(scale, float(np.abs(arr).max()))
    return HOL_MATCH_TOL * scale


def multiset_symdiff(a: np.ndarray, b: np.ndarray) -> int:
    """Size of the symmetric difference of two holonomy multisets."""
    m = _match_multisets(a, b, _hol_tol(a, b))
    return (len(a) - m) + (len(b) - m)


def multiset_contains(a: np.ndarray, b: np.ndarray) -> bool:
    """Whether multiset a is contained in multiset b."""
    return _match_multisets(a, b, _hol_tol(a, b)) == len(a)


# ---------------------------------------------------------------------------
# Quadratic growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    surface_name: str
    radii: tuple[float, ...]
    counts: tuple[int, ...]
    c_lsq: float
    c1_hat: float
    c2_hat: float

    def as_dict(self) -> dict:
        return {
            "surface": self.surface_name,
            "radii": list(self.radii),
            "counts": list(self.counts),
            "ratios": [c / r**2 for c, r in zip(self.counts, self.radii)],
            "c_lsq": self.c_lsq,
            "c1_hat": self.c1_hat,
            "c2_hat": self.c2_hat,
        }


def growth_fit(
    surface: TranslationSurface,
    radii,
    *,
    workers: int = 1,
    max_triangles: int | None = None,
) -> GrowthFit:
    """Least-squares quadratic fit and envelope constants for |spectrum(R)|.

    The envelope constants satisfy (c1*e*R)^2 <= count <= (c2*R/e)^2 at
    every grid radius.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 4:
        raise ValueError("growth_fit needs at least 4 radii")
    spec = enumerate_up_to_length(
        surface, radii[-1], workers=workers, max_triangles=max_triangles
    )
    counts = [int(np.searchsorted(spec.lengths, r, side="right")) for r in radii]
    r2 = np.array(radii) ** 2
    cnt = np.array(counts, dtype=float)
    c_lsq = float((cnt * r2).sum() / (r2 * r2).sum())
    c1_hat = float(min(math.sqrt(c) / (math.e * r) for c, r in zip(cnt, radii) if c > 0))
    c2_hat = float(max(math.e * math.sqrt(c) / r for c, r in zip(cnt, radii)))
    return GrowthFit(
        surface_name=surface.name,
        radii=tuple(radii),
        counts=tuple(counts),
        c_lsq=c_lsq,
        c1_hat=c1_hat,
        c2_hat=c2_hat,
    )


DEFAULT_FIT_RADII = (8.0, 12.0, 18.0, 27.0, 40.0, 60.0)


# ---------------------------------------------------------------------------
# Weyl sums and discrepancy along growing prefixes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylReport:
    surface_name: str
    params: ExperimentParameters
    p_values: tuple[int, ...]
    n_grid: tuple[int, ...]
    abs_weyl: np.ndarray  # (samples, len(p_values), len(n_grid))
    dstar: np.ndarray  # (samples, len(n_grid))

    @property
    def mean_abs_weyl(self) -> np.ndarray:
        return self.abs_weyl.mean(axis=0)

    @property
    def mean_dstar(self) -> np.ndarray:
        return self.dstar.mean(axis=0)

    def as_dict(self) -> dict:
        return {
            "surface": self.surface_name,
            "p_values": list(self.p_values),
            "n_grid": list(self.n_grid),
            "abs_weyl": self.abs_weyl.tolist(),
            "dstar": self.dstar.tolist(),
            "mean_abs_weyl": self.mean_abs_weyl.tolist(),
            "mean_dstar": self.mean_dstar.tolist(),
        }


def geometric_n_grid(tau: float, n_max: int, n_min: int = 50) -> tuple[int, ...]:
    """Prefix sizes ceil(tau^j) from about n_min up to and including n_max."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    n_min = max(2, min(n_min, n_max))
    grid = []
    j = max(0, math.ceil(math.log(n_min) / math.log(tau)))
    while True:
        n = math.ceil(tau**j)
        if n >= n_max:
            break
        if n >= n_min:
            grid.append(n)
        j += 1
    grid.append(n_max)
    return tuple(dict.fromkeys(grid))


def weyl_experiment(
    surface: TranslationSurface,
    params: ExperimentParameters,
    *,
    p_values: tuple[int, ...] | None = None,
    n_min: int = 50,
    n_grid: tuple[int, ...] | None = None,
    workers: int = 1,
) -> WeylReport:
    """Weyl sums and star discrepancy of length prefixes over Haar samples.

    Each sample draws g from D(1), enumerates the first N connections of the
    moved surface once, and evaluates every prefix in the geometric grid (or
    an explicit n_grid).
    """
    ps = tuple(p_values) if p_values is not None else (params.p,)
    if n_grid is None:
        n_grid = geometric_n_grid(params.tau, params.N, n_min)
    else:
        n_grid = tuple(sorted(int(x) for x in n_grid))
        if n_grid[-1] > params.N:
            raise ValueError("n_grid entries cannot exceed params.N")
    sampler = HaarSampler(T=1.0, seed=params.seed)

    def run_sample(i: int):
        g = sampler.sample(i)
        spec = first_n(apply_matrix(surface, g), params.N)
        lengths = spec.lengths
        aw = np.empty((len(ps), len(n_grid)))
        ds = np.empty(len(n_grid))
        for k, n in enumerate(n_grid):
            prefix = lengths[:n]
            for q, p in enumerate(ps):
                aw[q, k] = abs(weyl_sum(prefix, p))
            ds[k] = star_discrepancy(np.mod(prefix, 1.0))
        return aw, ds

    results = _run_indexed(run_sample, params.samples, workers)
    abs_weyl = np.stack([r[0] for r in results])
    dstar = np.stack([r[1] for r in results])
    return WeylReport(
        surface_name=surface.name,
        params=params,
        p_values=ps,
        n_grid=n_grid,
        abs_weyl=abs_weyl,
        dstar=dstar,
    )


def _run_indexed(fn, n_tasks: int, workers: int) -> list:
    """Run fn(0..n_tasks-1), in order, optionally on a thread pool."""
    if workers <= 1 or n_tasks <= 1:
        return [fn(i) for i in range(n_tasks)]
    with ThreadPoolExecutor(max_workers=min(workers, n_tasks)) as pool:
        return list(pool.map(fn, range(n_tasks)))


# ---------------------------------------------------------------------------
# Sector counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorReport:
    surface_name: str
    radius: float
    arc_lengths: tuple[float, ...]
    arcs_per_length: int
    epsilon: float
    scan_radii: tuple[float, ...]
    max_ratio: np.ndarray  # (len(arc_lengths), len(scan_radii))
    c4_emp: float
    r_star: dict[float, float]
    c_emp: float

    def as_dict(self) -> dict:
        return {
            "surface": self.surface_name,
            "radius": self.radius,
            "arc_lengths": list(self.arc_lengths),
            "arcs_per_length": self.arcs_per_length,
            "epsilon": self.epsilon,
            "scan_radii": list(self.scan_radii),
            "max_ratio": self.max_ratio.tolist(),
            "c4_emp": self.c4_emp,
            "r_star": {f"{k:g}": v for k, v in self.r_star.items()},
            "c_emp": self.c_emp,
        }


def sector_scan(
    surface: TranslationSurface,
    radius: float,
    arc_lengths,
    arcs_per_length: int,
    *,
    epsilon: float = 0.01,
    scan_levels: int = 4,
    stability_margin: float = 1.05,
    workers: int = 1,
    max_triangles: int | None = None,
) -> SectorReport:
    """Empirical sector-count constants.

    For each arc length and each rotated placement the ratio
    count / (arc length * r^2) is measured over a dyadic radius scan.  The
    report records the largest ratio at the full radius (the empirical
    sector constant), the smallest scan radius per arc length at which every
    placement stays below that constant, and the threshold coefficient
    fitted from those radii.
    """
    arc_lengths = tuple(float(x) for x in arc_lengths)
    spec = enumerate_up_to_length(surface, radius, workers=workers, max_triangles=max_triangles)
    scan_radii = tuple(radius / 2**k for k in reversed(range(scan_levels)))
    max_ratio = np.zeros((len(arc_lengths), len(scan_radii)))
    for ai, width in enumerate(arc_lengths):
        for j in range(arcs_per_length):
            start = j * TWO_PI / arcs_per_length
            rel = (spec.angles - start) % TWO_PI
            sub = np.sort(spec.lengths[rel < width])
            counts = np.searchsorted(sub, scan_radii, side="right")
            ratios = counts / (width * np.asarray(scan_radii) ** 2)
            max_ratio[ai] = np.maximum(max_ratio[ai], ratios)
    c4_emp = float(max_ratio[:, -1].max())
    r_star: dict[float, float] = {}
    for ai, width in enumerate(arc_lengths):
        ok_from = len(scan_radii) - 1
        for k in reversed(range(len(scan_radii))):
            if max_ratio[ai, k] <= c4_emp * stability_margin:
                ok_from = k
            else:
                break
        r_star[width] = float(scan_radii[ok_from])
    c_vals = [r * width ** (2.0 + epsilon) for width, r in r_star.items()]
    c_emp = float(np.exp(np.mean(np.log(c_vals))))
    return SectorReport(
        surface_name=surface.name,
        radius=float(radius),
        arc_lengths=arc_lengths,
        arcs_per_length=int(arcs_per_length),
        epsilon=float(epsilon),
        scan_radii=scan_radii,
        max_ratio=max_ratio,
        c4_emp=c4_emp,
        r_star=r_star,
        c_emp=c_emp,
    )


# ---------------------------------------------------------------------------
# Annular shell statistics
# ---------------------------------------------------------------------------


def annulus_indicator(
    v,
    surface: TranslationSurface,
    t: float,
    n: int,
    s_window: float,
    *,
    nth_len: float | None = None,
) -> int:
    """1 when d^t v lands in the shell around the n-th length of d^t surface.

    The shell is the closed annulus between exp(-2*s_window) and
    exp(+2*s_window) times the n-th connection length of the flowed surface.
    Passing nth_len skips its recomputation.
    """
    hol = np.asarray(getattr(v, "holonomy", v), dtype=float)
    if nth_len is None:
        from .spectrum import nth_length

        nth_len = nth_length(apply_matrix(surface, diag_flow(t)), n)
    flowed = math.hypot(math.exp(t) * hol[0], math.exp(-t) * hol[1])
    lo = math.exp(-2.0 * s_window) * nth_len
    hi = math.exp(2.0 * s_window) * nth_len
    return int(lo <= flowed <= hi)


@dataclass(frozen=True)
class AnnularReport:
    surface_name: str
    phi: float
    params: ExperimentParameters
    n_values: tuple[int, ...]
    t_grid: np.ndarray
    max_symdiff: dict[int, np.ndarray]
    shell_counts: dict[int, np.ndarray]
    thresholds: dict[int, float]
    bad_fraction: dict[int, float]
    sandwich_failures: int
    shell_bound_failures: int

    def as_dict(self) -> dict:
        return {
            "surface": self.surface_name,
            "phi": self.phi,
            "n_values": list(self.n_values),
            "t_grid": self.t_grid.tolist(),
            "max_symdiff": {str(n): v.tolist() for n, v in self.max_symdiff.items()},
            "shell_counts": {str(n): v.tolist() for n, v in self.shell_counts.items()},
            "thresholds": {str(n): v for n, v in self.thresholds.items()},
            "bad_fraction": {str(n): v for n, v in self.bad_fraction.items()},
            "sandwich_failures": self.sandwich_failures,
            "shell_bound_failures": self.shell_bound_failures,
        }


def symdiff_experiment(
    surface: TranslationSurface,
    phi: float,
    params: ExperimentParameters,
    *,
    n_values: tuple[int, ...] | None = None,
    t_points: int = 200,
    st_samples: int = 4,
    s_fixed: float | None = None,
    workers: int = 1,
) -> AnnularReport:
    """Shell instability of canonical prefixes under the diagonal flow.

    For every t on a grid and sampled (s, theta) windows, compares the first
    N connections of d^s r^theta d^t r^phi omega with the flowed image of the
    first N of r^theta d^t r^phi omega.  Records the largest symmetric
    difference per t, the fraction of t exceeding N^(1-zeta), and checks on
    every sample that the prefix is sandwiched between the flowed spectra at
    radii exp(-2s) and exp(+2s) times the N-th length, and that the
    symmetric difference never exceeds the shell population.
    """
    ns = tuple(int(n) for n in (n_values if n_values is not None else (params.N,)))
    t_grid = np.linspace(0.0, 1.0, t_points)
    base = apply_matrix(surface, rotation(phi))

    max_symdiff: dict[int, np.ndarray] = {}
    shell_counts: dict[int, np.ndarray] = {}
    thresholds: dict[int, float] = {}
    bad_fraction: dict[int, float] = {}
    sandwich_failures = 0
    shell_bound_failures = 0

    for n in ns:
        s_window = float(n) ** (-params.delta)
        threshold = float(n) ** (1.0 - params.zeta)

        def run_t(ti: int, n=n, s_window=s_window):
            t = float(t_grid[ti])
            rng = np.random.default_rng(
                np.random.SeedSequence((params.seed, n, ti))
            )
            base_t = apply_matrix(base, diag_flow(t))
            ell_t = first_n(base_t, n).lengths[-1]
            shell_spec = enumerate_up_to_length(
                base_t, math.exp(2.0 * s_window) * ell_t * (1.0 + 1e-12)
            )
            shell = int(
                np.count_nonzero(
                    (shell_spec.lengths >= math.exp(-2.0 * s_window) * ell_t)
                    & (shell_spec.lengths <= math.exp(2.0 * s_window) * ell_t)
                )
            )
            worst = 0
            sandwich_bad = 0
            bound_bad = 0
            for k in range(st_samples):
                theta = rng.uniform(0.0, TWO_PI)
                if s_fixed is not None:
                    s = float(s_fixed)
                elif k == 0:
                    s = s_window  # always probe the full window
                else:
                    s = rng.uniform(0.0, s_window)
                rotated = apply_matrix(base_t, rotation(theta))
                xi_a = first_n(rotated, n)
                flow = diag_flow(s)
                moved = apply_matrix(rotated, flow)
                xi_d = first_n(moved, n)
                mapped = xi_a.holonomies @ flow.matrix.T
                sd = multiset_symdiff(xi_d.holonomies, mapped)
                worst = max(worst, sd)
                if sd > shell:
                    bound_bad += 1
                if s > 0.0:
                    # The sandwich needs a strictly expanding flow: at s = 0
                    # its inner radius hits the N-th length exactly and any
                    # straddling length tie breaks the inclusion.
                    ell_a = float(xi_a.lengths[-1])
                    big = enumerate_up_to_length(
                        rotated, math.exp(2.0 * s) * ell_a * (1.0 + 1e-12)
                    )
                    big_mapped = big.holonomies @ flow.matrix.T
                    small_mask = big.lengths <= math.exp(-2.0 * s) * ell_a
                    small_mapped = big.holonomies[small_mask] @ flow.matrix.T
                    if not multiset_contains(xi_d.holonomies, big_mapped):
                        sandwich_bad += 1
                    if not multiset_contains(small_mapped, xi_d.holonomies):
                        sandwich_bad += 1
            return worst, shell, sandwich_bad, bound_bad

        results = _run_indexed(run_t, t_points, workers)
        worsts = np.array([r[0] for r in results], dtype=float)
        shells = np.array([r[1] for r in results], dtype=float)
        sandwich_failures += sum(r[2] for r in results)
        shell_bound_failures += sum(r[3] for r in results)
        max_symdiff[n] = worsts
        shell_counts[n] = shells
        thresholds[n] = threshold
        bad_fraction[n] = float(np.mean(worsts > threshold))

    return AnnularReport(
        surface_name=surface.name,
        phi=float(phi),
        params=params,
        n_values=ns,
        t_grid=t_grid,
        max_symdiff=max_symdiff,
        shell_counts=shell_counts,
        thresholds=thresholds,
        bad_fraction=bad_fraction,
        sandwich_failures=sandwich_failures,
        shell_bound_failures=shell_bound_failures,
    )


# ---------------------------------------------------------------------------
# Sector partition of the big annulus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorPartition:
    """The axis sectors, annular arcs, and arc neighborhoods of a spectrum."""

    surface_name: str
    n: int
    psi: float
    kappa: int
    arc_width: float
    inner: float
    outer: float
    nth_len: float
    spectrum: Spectrum
    axis_members: np.ndarray  # indices into spectrum
    arc_members: tuple[np.ndarray, ...]  # one index array per arc id 1..4*kappa
    neighborhoods: tuple[tuple[int, ...], ...]  # arc ids per arc id

    def arc_ids(self) -> range:
        return range(1, 4 * self.kappa + 1)

    def neighborhood_members(self, k: int) -> np.ndarray:
        ids = self.neighborhoods[k - 1]
        if not ids:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([self.arc_members[i - 1] for i in ids])


def sector_partition(
    surface: TranslationSurface,
    params: ExperimentParameters,
    *,
    constants: tuple[float, float] | None = None,
    workers: int = 1,
    max_triangles: int | None = None,
) -> SectorPartition:
    """Split the big-annulus spectrum into axis sectors and annular arcs.

    Four axis sectors of half width psi hold the nearly horizontal and
    vertical connections; the rest of the annulus is cut into 4*kappa arcs
    per the parameter ledger.  Each arc's neighborhood consists of its
    reflections in the other quadrants and arcs adjacent to those, twelve
    arcs in general position and eight at the ends of a quadrant.
    """
    n = params.N
    if constants is None:
        fit = growth_fit(surface, DEFAULT_FIT_RADII, workers=workers)
        constants = (fit.c1_hat, fit.c2_hat)
    c1, c2 = constants
    psi = params.psi
    if math.pi / 2.0 - 2.0 * psi <= 0.0:
        raise ValueError(
            f"axis sectors overlap: psi={psi:.4f} needs N^gamma > {4.0 / (math.pi / 2.0):.3f}"
        )
    nth_len = first_n(surface, n, workers=workers, max_triangles=max_triangles).lengths[-1]
    kappa = params.kappa(nth_len)
    if kappa < 1:
        raise ValueError(
            f"kappa = 0 at N={n}: the arc count floor((pi/2 - 2 psi) * L^alpha) "
            "vanished; increase N or the exponents"
        )
    outer = 2.0 * math.e / c1 * math.sqrt(n)
    inner = math.sqrt(n) / (2.0 * math.e * c2 * math.log(n))
    spec = enumerate_up_to_length(
        surface, outer, workers=workers, max_triangles=max_triangles
    )

    ang = spec.angles
    axis_dist = np.minimum(ang % (math.pi / 2.0), (math.pi / 2.0) - ang % (math.pi / 2.0))
    in_axis = axis_dist < psi
    axis_members = np.flatnonzero(in_axis)

    width = (math.pi / 2.0 - 2.0 * psi) / kappa
    in_band = (spec.lengths >= inner) & (spec.lengths <= outer)
    quadrant = np.floor(ang / (math.pi / 2.0)).astype(int) % 4
    rel = ang - quadrant * (math.pi / 2.0) - psi
    m = np.floor(rel / width).astype(int)
    valid = in_band & ~in_axis & (m >= 0) & (m < kappa)
    arc_id = quadrant * kappa + m + 1  # 1-based
    arc_members = tuple(
        np.flatnonzero(valid & (arc_id == k)) for k in range(1, 4 * kappa + 1)
    )

    def reflections(q: int, m1: int) -> list[tuple[int, int]]:
        # m1 is 1-based within the quadrant; angle reflections map a
        # quadrant-k arc to position kappa-k+1 in the mirrored quadrants.
        return [
            (q, m1),
            ((1 - q) % 4, kappa - m1 + 1),
            ((q + 2) % 4, m1),
            ((3 - q) % 4, kappa - m1 + 1),
        ]

    neighborhoods = []
    for k in range(1, 4 * kappa + 1):
        q, m1 = (k - 1) // kappa, (k - 1) % kappa + 1
        ids = set()
        for rq, rm in reflections(q, m1):
            for mm in (rm - 1, rm, rm + 1):
                if 1 <= mm <= kappa:
                    ids.add(rq * kappa + mm)
        neighborhoods.append(tuple(sorted(ids)))

    return SectorPartition(
        surface_name=surface.name,
        n=n,
        psi=psi,
        kappa=kappa,
        arc_width=width,
        inner=inner,
        outer=outer,
        nth_len=float(nth_len),
        spectrum=spec,
        axis_members=axis_members,
        arc_members=arc_members,
        neighborhoods=tuple(neighborhoods),
    )


# ---------------------------------------------------------------------------
# Oscillatory pair kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelResult:
    value: complex
    quad_points: int
    amplitude: float
    n_implied: float
    bound: float
    within_bound: bool

    def as_dict(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "abs_value": abs(self.value),
            "quad_points": self.quad_points,
            "amplitude": self.amplitude,
            "n_implied": self.n_implied,
            "bound": self.bound,
            "within_bound": self.within_bound,
        }


def _kernel_quadrature(v, w, p: int, s_window: float, n_nodes: int) -> complex:
    """Tensor Gauss-Legendre evaluation of the rotation-averaged pair kernel."""
    x, wx = np.polynomial.legendre.leggauss(n_nodes)
    theta = math.pi * (x + 1.0)  # [0, 2*pi]
    wt = wx * math.pi
    s = 0.5 * s_window * (x + 1.0)  # [0, S]
    ws = wx * 0.5 * s_window

    ct, st = np.cos(theta), np.sin(theta)
    rv1 = v[0] * ct - v[1] * st
    rv2 = v[0] * st + v[1] * ct
    rw1 = w[0] * ct - w[1] * st
    rw2 = w[0] * st + w[1] * ct
    nv = np.hypot(rv1, rv2)
    nw = np.hypot(rw1, rw2)
    rate_v = (rv1**2 - rv2**2) / nv
    rate_w = (rw1**2 - rw2**2) / nw
    diff = rate_v - rate_w  # (n_theta,)
    phase = np.exp(2j * math.pi * p * np.outer(diff, s))  # (n_theta, n_s)
    integral = np.einsum("i,j,ij->", wt, ws, phase)
    return complex(integral / (TWO_PI * s_window))


def kernel_integral(
    v,
    w,
    p: int,
    s_window: float,
    quad_points: int = 64,
    *,
    delta: float = 1.0 / 3.0,
    tol: float = 1e-6,
    max_doublings: int = 8,
) -> KernelResult:
    """Rotation-and-window average of the paired length-rate characters.

    Evaluates (1/2pi) int_0^2pi (1/S) int_0^S of
    exp(2 pi i p s rate(r^theta v)) * conj(exp(2 pi i p s rate(r^theta w)))
    by tensor Gauss-Legendre quadrature, doubling the node count until two
    successive refinements agree within tol.  The report flags whether the
    modulus obeys 4/(pi sqrt(N)) + N^delta (log N + log(pi/4)) / (pi A(v,w))
    for the N implied by S = N^(-delta).
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if quad_points < 64:
        raise ValueError(f"need quad_points >= 64, got {quad_points}")
    if not s_window > 0.0:
        raise ValueError(f"need a positive window, got {s_window}")
    amplitude = pair_amplitude(v, w)
    n_implied = s_window ** (-1.0 / delta)
    if amplitude > 0.0:
        bound = 4.0 / (math.pi * math.sqrt(n_implied)) + (
            n_implied**delta / (math.pi * amplitude)
        ) * (math.log(n_implied) + math.log(math.pi / 4.0))
    else:
        bound = math.inf

    if p == 0 or np.array_equal(v, w):
        # The integrand is identically one.
        return KernelResult(
            value=1.0 + 0.0j,
            quad_points=quad_points,
            amplitude=amplitude,
            n_implied=n_implied,
            bound=bound,
            within_bound=1.0 <= bound,
        )

    n_nodes = quad_points
    prev = _kernel_quadrature(v, w, p, s_window, n_nodes)
    for _ in range(max_doublings):
        n_nodes *= 2
        cur = _kernel_quadrature(v, w, p, s_window, n_nodes)
        if abs(cur - prev) <= tol:
            return KernelResult(
                value=cur,
                quad_points=n_nodes,
                amplitude=amplitude,
                n_implied=n_implied,
                bound=bound,
                within_bound=abs(cur) <= bound,
            )
        prev = cur
    raise QuadratureError(
        f"pair kernel did not stabilise within {tol} after {max_doublings} doublings"
    )
