"""Saddle connection spectra: enumeration, canonical order, filters, export.

Connections are directed; a segment and its reverse are listed separately.
The canonical enumeration sorts by length (non-decreasing) and breaks length
ties by increasing holonomy angle in [0, 2*pi).  Lengths within 1e-9 relative
of each other count as tied, which keeps symmetry orbits of the built-in
surfaces in the angle order their geometry dictates.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .develop import develop_range, replay_path
from .errors import IncompleteSpectrumError, ResourceLimitExceeded
from .surface import TranslationSurface
from .triangulate import TriangulatedSurface, triangulate

TWO_PI = 2.0 * math.pi
LENGTH_TIE_TOL = 1e-9
DEFAULT_MAX_TRIANGLES = 100_000_000


def max_triangle_budget() -> int:
    """Developed-triangle cap; the SADDLE_MAX_TRIANGLES env var overrides."""
    raw = os.environ.get("SADDLE_MAX_TRIANGLES")
    if raw is None:
        return DEFAULT_MAX_TRIANGLES
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SADDLE_MAX_TRIANGLES must be an integer, got {raw!r}") from None


@lru_cache(maxsize=64)
def _triangulation_of(surface: TranslationSurface) -> TriangulatedSurface:
    return triangulate(surface)


def angles_of(holonomies: np.ndarray) -> np.ndarray:
    """Holonomy angles in [0, 2*pi)."""
    ang = np.arctan2(holonomies[:, 1], holonomies[:, 0])
    ang = np.where(ang < 0.0, ang + TWO_PI, ang)
    return np.where(ang >= TWO_PI, 0.0, ang)


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: tuple[float, float]
    start: int
    end: int
    chart_path: tuple[tuple[int, int], ...]

    @property
    def length(self) -> float:
        return math.hypot(*self.holonomy)

    @property
    def angle(self) -> float:
        a = math.atan2(self.holonomy[1], self.holonomy[0])
        return a + TWO_PI if a < 0.0 else a


@dataclass(frozen=True)
class Arc:
    """Counterclockwise angular interval [start, end) of length in (0, 2*pi)."""

    start: float
    end: float

    def __post_init__(self):
        length = (self.end - self.start) % TWO_PI
        if not (0.0 < length < TWO_PI):
            raise ValueError(f"arc length must lie strictly between 0 and 2*pi, got {length}")

    @property
    def length(self) -> float:
        return (self.end - self.start) % TWO_PI

    def contains(self, angles: np.ndarray) -> np.ndarray:
        rel = (np.asarray(angles) - self.start) % TWO_PI
        return rel < self.length


@dataclass(frozen=True)
class Annulus:
    """Closed radial band A <= norm <= B."""

    inner: float
    outer: float

    def __post_init__(self):
        if not (0.0 <= self.inner <= self.outer):
            raise ValueError(f"annulus needs 0 <= inner <= outer, got {self.inner}, {self.outer}")

    def contains(self, lengths: np.ndarray) -> np.ndarray:
        lengths = np.asarray(lengths)
        return (lengths >= self.inner) & (lengths <= self.outer)


@dataclass(frozen=True)
class Spectrum:
    """Canonically ordered saddle connections of one surface."""

    holonomies: np.ndarray
    lengths: np.ndarray
    angles: np.ndarray
    start: np.ndarray
    end: np.ndarray
    complete_radius: float
    surface_name: str
    paths: tuple[tuple[tuple[int, int], ...], ...] | None = None

    def __len__(self) -> int:
        return int(self.holonomies.shape[0])

    def __getitem__(self, n: int) -> SaddleConnection:
        return SaddleConnection(
            holonomy=(float(self.holonomies[n, 0]), float(self.holonomies[n, 1])),
            start=int(self.start[n]),
            end=int(self.end[n]),
            chart_path=self.paths[n] if self.paths is not None else (),
        )

    def __iter__(self):
        for n in range(len(self)):
            yield self[n]

    def _subset(self, mask_or_index, complete_radius=None) -> "Spectrum":
        idx = np.flatnonzero(mask_or_index) if mask_or_index.dtype == bool else mask_or_index
        return Spectrum(
            holonomies=self.holonomies[idx],
            lengths=self.lengths[idx],
            angles=self.angles[idx],
            start=self.start[idx],
            end=self.end[idx],
            complete_radius=self.complete_radius if complete_radius is None else complete_radius,
            surface_name=self.surface_name,
            paths=tuple(self.paths[i] for i in idx) if self.paths is not None else None,
        )

    def first(self, n: int) -> "Spectrum":
        if n > len(self):
            raise ValueError(f"spectrum holds {len(self)} connections, asked for {n}")
        radius = _prefix_complete_radius(self.lengths, n)
        return self._subset(np.arange(n), complete_radius=radius)

    def to_csv(self, fh) -> None:
        fh.write("n,hol_x,hol_y,length,angle,frac_length\n")
        for n in range(len(self)):
            x = float(self.holonomies[n, 0])
            y = float(self.holonomies[n, 1])
            ln = float(self.lengths[n])
            fh.write(
                f"{n + 1},{x!r},{y!r},{ln!r},{float(self.angles[n])!r},{ln % 1.0!r}\n"
            )


def _prefix_complete_radius(lengths: np.ndarray, n: int) -> float:
    """Largest radius up to which the first n entries are the whole spectrum."""
    if n == 0:
        return 0.0
    ln = float(lengths[n - 1])
    if n == len(lengths) or float(lengths[n]) > ln * (1.0 + LENGTH_TIE_TOL):
        return ln
    # A length tie straddles the cut; only shorter lengths are complete.
    below = lengths[:n][lengths[:n] < ln * (1.0 - LENGTH_TIE_TOL)]
    return float(below[-1]) if len(below) else 0.0


def _canonical_order(lengths, angles, start, end):
    """Sort key production for the canonical enumeration.

    Equal-length groups (1e-9 relative) are ordered by angle; exact repeats
    fall back to endpoint ids and then discovery order, which follows the
    development tree and is deterministic.
    """
    n = len(lengths)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    by_len = np.argsort(lengths, kind="stable")
    sorted_len = lengths[by_len]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    prev = sorted_len[:-1]
    new_group[1:] = (sorted_len[1:] - prev) > LENGTH_TIE_TOL * np.maximum(1e-300, prev)
    group_of_sorted = np.cumsum(new_group) - 1
    group = np.empty(n, dtype=np.int64)
    group[by_len] = group_of_sorted
    disc = np.arange(n)
    order = np.lexsort((disc, end, start, angles, group))
    return order


def enumerate_up_to_length(
    surface: TranslationSurface,
    radius: float,
    *,
    with_paths: bool = False,
    workers: int = 1,
    max_triangles: int | None = None,
) -> Spectrum:
    """All saddle connections of length at most `radius`, canonically ordered."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not surface.cone_points:
        raise ValueError("surface has no cone points")
    tri = _triangulation_of(surface)
    budget = max_triangles if max_triangles is not None else max_triangle_budget()

    # Connections along triangulation edges: one per directed edge slot.
    ev = tri.edge_vecs
    T = tri.n_triangles
    slot_len = np.hypot(ev[:, :, 0], ev[:, :, 1]).ravel()
    keep = slot_len <= radius
    flat_tri = np.repeat(np.arange(T, dtype=np.int32), 3)[keep]
    flat_edge = np.tile(np.arange(3, dtype=np.int32), T)[keep]
    edge_hol = ev.reshape(-1, 2)[keep]
    edge_start = tri.vclass.ravel()[keep]
    edge_end = tri.vclass[
        flat_tri, (flat_edge + 1) % 3
    ]
    edge_paths = [((int(t), int(e)),) for t, e in zip(flat_tri, flat_edge)]

    n_corners = 3 * T
    workers = max(1, int(workers))
    chunks: list[tuple[int, int]] = []
    step = max(1, -(-n_corners // workers))
    for lo in range(0, n_corners, step):
        chunks.append((lo, min(n_corners, lo + step)))

    def run(chunk):
        return develop_range(tri, chunk[0], chunk[1], radius, budget, with_paths)

    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run, chunks))

    total_states = sum(r[7] for r in results)
    if any(r[8] != 0 for r in results):
        raise ResourceLimitExceeded(
            f"development budget of {budget} triangles exceeded at radius {radius}; "
            "raise SADDLE_MAX_TRIANGLES or reduce the radius"
        )

    hol_parts = [edge_hol] + [np.column_stack((r[0], r[1])) for r in results]
    start_parts = [edge_start] + [r[2] for r in results]
    end_parts = [edge_end] + [r[3] for r in results]
    holonomies = np.concatenate(hol_parts, axis=0)
    start = np.concatenate(start_parts).astype(np.int32)
    end = np.concatenate(end_parts).astype(np.int32)

    paths = None
    if with_paths:
        all_paths: list[tuple[tuple[int, int], ...]] = list(edge_paths)
        for r in results:
            off, ptri, pedge = r[4], r[5], r[6]
            for m in range(len(off) - 1):
                seg = slice(off[m], off[m + 1])
                all_paths.append(tuple(zip(ptri[seg].tolist(), pedge[seg].tolist())))
        paths = all_paths

    lengths = np.hypot(holonomies[:, 0], holonomies[:, 1])
    angles = angles_of(holonomies)
    order = _canonical_order(lengths, angles, start, end)
    return Spectrum(
        holonomies=holonomies[order],
        lengths=lengths[order],
        angles=angles[order],
        start=start[order],
        end=end[order],
        complete_radius=float(radius),
        surface_name=surface.name,
        paths=tuple(paths[i] for i in order) if paths is not None else None,
    )


# Last observed count density per surface name; only tunes the starting
# radius of first_n, never the result.
_DENSITY_HINTS: dict[str, float] = {}


def first_n(
    surface: TranslationSurface,
    n: int,
    *,
    with_paths: bool = False,
    workers: int = 1,
    max_triangles: int | None = None,
) -> Spectrum:
    """The first n connections in canonical order.

    Enumerates to a growing radius, doubling until at least n connections
    exist, then truncates.  The truncated prefix does not depend on the
    radius that reached it.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    density = _DENSITY_HINTS.get(surface.name)
    if density:
        radius = max(1.0, 1.2 * math.sqrt(n / density))
    else:
        radius = max(1.0, 0.75 * math.sqrt(n * surface.area))
    for _ in range(64):
        spec = enumerate_up_to_length(
            surface,
            radius,
            with_paths=with_paths,
            workers=workers,
            max_triangles=max_triangles,
        )
        if len(spec) >= 8:
            _DENSITY_HINTS[surface.name] = len(spec) / radius**2
        if len(spec) >= n:
            return spec.first(n)
        radius *= 2.0
    raise ResourceLimitExceeded(f"could not reach {n} connections by radius {radius}")


def nth_length(surface: TranslationSurface, n: int, **kwargs) -> float:
    """Length of the n-th connection (1-based) in canonical order."""
    return float(first_n(surface, n, **kwargs).lengths[-1])


def systole(surface: TranslationSurface, **kwargs) -> float:
    """Length of the shortest saddle connection."""
    return nth_length(surface, 1, **kwargs)


def filter_sector(spectrum: Spectrum, arc: Arc) -> Spectrum:
    """Connections whose holonomy angle lies in the half-open arc."""
    return spectrum._subset(arc.contains(spectrum.angles))


def filter_annulus(spectrum: Spectrum, ann: Annulus) -> Spectrum:
    """Connections with length in the closed band [inner, outer]."""
    if spectrum.complete_radius < ann.outer * (1.0 - 1e-12):
        raise IncompleteSpectrumError(
            f"spectrum is complete only to radius {spectrum.complete_radius}, "
            f"annulus reaches {ann.outer}"
        )
    return spectrum._subset(ann.contains(spectrum.lengths))


def verify_witness(surface: TranslationSurface, spectrum: Spectrum, index: int) -> float:
    """Redevelop the stored path of one connection; return the holonomy gap."""
    if spectrum.paths is None:
        raise ValueError("spectrum was enumerated without witness paths")
    tri = _triangulation_of(surface)
    redone = replay_path(tri, spectrum.paths[index])
    return float(np.hypot(*(redone - spectrum.holonomies[index])))
