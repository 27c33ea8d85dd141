"""Translation surfaces built from planar polygons glued by translations.

A surface is a list of disjoint Euclidean polygons (counterclockwise vertex
lists) together with a perfect matching of their edges such that matched
edges have exactly opposite edge vectors.  Every vertex class obtained by
walking corners around the gluings must have total angle 2*pi*(k+1) for an
integer k >= 0; the orders k determine the genus through sum(k) = 2g - 2.

Surfaces are immutable after construction and all operations here are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import SurfaceValidationError

# Deciding integer-ness of a cone angle (radians).
ANGLE_TOL = 1e-9
# Relative tolerance for the glued-edge opposite-vector check.
GLUING_TOL = 1e-9

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ConePoint:
    """A vertex class of the glued surface.

    corners: the (polygon, vertex) incidences in trace order.
    total_angle: sum of the interior corner angles, in radians.
    order: integer k with total_angle = 2*pi*(k+1).
    """

    index: int
    corners: tuple[tuple[int, int], ...]
    total_angle: float
    order: int


@dataclass(frozen=True)
class TranslationSurface:
    """Polygons plus translation gluings, validated at construction."""

    name: str
    polygons: tuple[np.ndarray, ...]
    gluings: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    cone_points: tuple[ConePoint, ...]
    genus: int
    area: float

    def __eq__(self, other) -> bool:
        if not isinstance(other, TranslationSurface):
            return NotImplemented
        return (
            len(self.polygons) == len(other.polygons)
            and all(np.array_equal(a, b) for a, b in zip(self.polygons, other.polygons))
            and self.gluings == other.gluings
        )

    def __hash__(self):
        return hash((self.name, self.gluings, tuple(p.tobytes() for p in self.polygons)))

    @property
    def num_edges(self) -> int:
        return sum(len(p) for p in self.polygons) // 2

    def edge_vector(self, poly: int, edge: int) -> np.ndarray:
        verts = self.polygons[poly]
        return verts[(edge + 1) % len(verts)] - verts[edge]


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; positive for counterclockwise polygons."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """True for crossing or improper overlap of two non-adjacent segments."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_segment(a, b, c):
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False


def _validate_polygon(vertices: np.ndarray, poly_index: int) -> None:
    n = len(vertices)
    if n < 3:
        raise SurfaceValidationError(f"polygon {poly_index}: fewer than 3 vertices")
    if not np.all(np.isfinite(vertices)):
        raise SurfaceValidationError(f"polygon {poly_index}: non-finite coordinate")
    if polygon_area(vertices) <= 0.0:
        raise SurfaceValidationError(
            f"polygon {poly_index}: non-positive signed area (vertices must be counterclockwise)"
        )
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a1, a2 = edges[i]
        if np.array_equal(a1, a2):
            raise SurfaceValidationError(f"polygon {poly_index}: zero-length edge {i}")
        for j in range(i + 1, n):
            # Adjacent edges share exactly one endpoint; skip those pairs.
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            b1, b2 = edges[j]
            if _segments_properly_intersect(a1, a2, b1, b2):
                raise SurfaceValidationError(
                    f"polygon {poly_index}: non-simple polygon (edges {i} and {j} intersect)"
                )


def _corner_angle(vertices: np.ndarray, i: int) -> float:
    """Interior angle at vertex i of a counterclockwise simple polygon."""
    n = len(vertices)
    out_vec = vertices[(i + 1) % n] - vertices[i]
    in_vec = vertices[i] - vertices[(i - 1) % n]
    # Turn angle at the vertex; interior angle = pi - turn.
    turn = math.atan2(
        in_vec[0] * out_vec[1] - in_vec[1] * out_vec[0],
        in_vec[0] * out_vec[0] + in_vec[1] * out_vec[1],
    )
    return math.pi - turn


def _trace_cone_points(
    polygons: Sequence[np.ndarray],
    partner: dict[tuple[int, int], tuple[int, int]],
) -> tuple[tuple[ConePoint, ...], int]:
    """Group corners into vertex classes by walking around the gluings.

    From corner (p, i) the next corner counterclockwise around the vertex is
    found by crossing the incoming edge (p, i-1) to its glued partner (q, f);
    the corner at the start vertex of edge f is the continuation.
    """
    seen: set[tuple[int, int]] = set()
    cone_points: list[ConePoint] = []
    for p, verts in enumerate(polygons):
        for i in range(len(verts)):
            if (p, i) in seen:
                continue
            cycle: list[tuple[int, int]] = []
            total = 0.0
            cur = (p, i)
            while cur not in seen:
                seen.add(cur)
                cycle.append(cur)
                cp, ci = cur
                total += _corner_angle(polygons[cp], ci)
                n_cp = len(polygons[cp])
                cur = partner[(cp, (ci - 1) % n_cp)]
            if cur != (p, i):
                raise SurfaceValidationError(
                    f"corner trace starting at polygon {p} vertex {i} did not close up"
                )
            turns = total / TWO_PI
            k = round(turns) - 1
            if abs(total - TWO_PI * (k + 1)) > ANGLE_TOL or k < 0:
                raise SurfaceValidationError(
                    f"non-integer cone angle {total:.12f} rad at vertex class containing "
                    f"polygon {p} vertex {i}"
                )
            cone_points.append(
                ConePoint(
                    index=len(cone_points),
                    corners=tuple(cycle),
                    total_angle=total,
                    order=k,
                )
            )
    order_sum = sum(c.order for c in cone_points)
    if order_sum % 2 != 0:
        raise SurfaceValidationError(
            f"cone orders sum to {order_sum}, which is odd; gluing is inconsistent"
        )
    genus = order_sum // 2 + 1
    return tuple(cone_points), genus


def build_surface(
    name: str,
    polygons: Iterable[np.ndarray],
    gluings: Iterable[tuple[tuple[int, int], tuple[int, int]]],
) -> TranslationSurface:
    """Validate polygons and gluings and assemble a TranslationSurface."""
    polys = tuple(np.array(p, dtype=float) for p in polygons)
    for idx, verts in enumerate(polys):
        _validate_polygon(verts, idx)

    # Normalise each pair so the smaller slot comes first, then sort pairs.
    norm_pairs = []
    for pair in gluings:
        (p, e), (q, f) = pair
        a, b = (int(p), int(e)), (int(q), int(f))
        norm_pairs.append((a, b) if a <= b else (b, a))
    norm_pairs.sort()

    partner: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b in norm_pairs:
        for slot in (a, b):
            p, e = slot
            if not (0 <= p < len(polys)) or not (0 <= e < len(polys[p])):
                raise SurfaceValidationError(f"gluing references missing edge {slot}")
            if slot in partner:
                raise SurfaceValidationError(f"edge {slot} appears in more than one gluing pair")
        if a == b:
            raise SurfaceValidationError(f"edge {a} glued to itself")
        partner[a] = b
        partner[b] = a

    for p, verts in enumerate(polys):
        for e in range(len(verts)):
            if (p, e) not in partner:
                raise SurfaceValidationError(f"unmatched edge (polygon {p}, edge {e})")

    for a, b in norm_pairs:
        ea = polys[a[0]][(a[1] + 1) % len(polys[a[0]])] - polys[a[0]][a[1]]
        eb = polys[b[0]][(b[1] + 1) % len(polys[b[0]])] - polys[b[0]][b[1]]
        mismatch = np.hypot(*(ea + eb))
        if mismatch > GLUING_TOL * max(1.0, np.hypot(*ea)):
            raise SurfaceValidationError(
                f"gluing holonomy mismatch between edges {a} and {b}: "
                f"edge vectors sum to {tuple(ea + eb)}"
            )

    cone_points, genus = _trace_cone_points(polys, partner)
    area = sum(polygon_area(p) for p in polys)
    for p in polys:
        p.setflags(write=False)
    return TranslationSurface(
        name=name,
        polygons=polys,
        gluings=tuple(norm_pairs),
        cone_points=cone_points,
        genus=genus,
        area=area,
    )


def cone_data(surface: TranslationSurface) -> tuple[tuple[ConePoint, ...], int]:
    """The vertex classes of the surface and its genus."""
    return surface.cone_points, surface.genus


def load_surface(document: str, name: str | None = None) -> TranslationSurface:
    """Parse and validate a surface from its JSON document."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SurfaceValidationError(f"surface document is not valid JSON: {exc}") from exc
    try:
        polygons = [np.array(p["vertices"], dtype=float) for p in data["polygons"]]
        gluings = [
            ((int(a[0]), int(a[1])), (int(b[0]), int(b[1]))) for a, b in data["gluings"]
        ]
        doc_name = data.get("name", "unnamed")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SurfaceValidationError(f"malformed surface document: {exc}") from exc
    for p in polygons:
        if p.ndim != 2 or p.shape[1] != 2:
            raise SurfaceValidationError("polygon vertices must be a list of [x, y] pairs")
    return build_surface(name or doc_name, polygons, gluings)


def serialize_surface(surface: TranslationSurface) -> str:
    """Emit the canonical JSON document; load_surface round-trips it exactly."""
    doc = {
        "name": surface.name,
        "polygons": [
            {"vertices": [[float(x), float(y)] for x, y in poly]}
            for poly in surface.polygons
        ],
        "gluings": [[list(a), list(b)] for a, b in surface.gluings],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_surface_file(path) -> TranslationSurface:
    with open(path, "r", encoding="utf-8") as fh:
        return load_surface(fh.read())


def _square_torus() -> TranslationSurface:
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    gluings = [((0, 0), (0, 2)), ((0, 1), (0, 3))]
    return build_surface("square-torus", [square], gluings)


def _regular_octagon() -> TranslationSurface:
    # Half the vertices from the circumcircle, the rest by exact negation so
    # that opposite edges have bitwise-opposite vectors.
    circum = 1.0 / (2.0 * math.sin(math.pi / 8.0))
    half = [
        (
            circum * math.cos(math.pi / 8.0 + k * math.pi / 4.0),
            circum * math.sin(math.pi / 8.0 + k * math.pi / 4.0),
        )
        for k in range(4)
    ]
    verts = np.array(half + [(-x, -y) for x, y in half])
    gluings = [((0, k), (0, k + 4)) for k in range(4)]
    return build_surface("regular-octagon", [verts], gluings)


def _double_pentagon() -> TranslationSurface:
    circum = 1.0 / (2.0 * math.sin(math.pi / 5.0))
    penta = np.array(
        [
            (
                circum * math.cos(math.pi / 2.0 + k * 2.0 * math.pi / 5.0),
                circum * math.sin(math.pi / 2.0 + k * 2.0 * math.pi / 5.0),
            )
            for k in range(5)
        ]
    )
    # Point reflection preserves orientation and negates every edge vector.
    gluings = [((0, k), (1, k)) for k in range(5)]
    return build_surface("double-pentagon", [penta, -penta], gluings)


def _l_shaped(a: float, b: float) -> TranslationSurface:
    if not (a > 1.0 and b > 1.0):
        raise SurfaceValidationError(f"L-shaped legs must exceed 1, got a={a}, b={b}")
    verts = np.array(
        [
            [0.0, 0.0],
            [1.0, 0.0],
            [a, 0.0],
            [a, 1.0],
            [1.0, 1.0],
            [1.0, b],
            [0.0, b],
            [0.0, 1.0],
        ]
    )
    gluings = [
        ((0, 0), (0, 5)),  # unit bottom <-> top
        ((0, 1), (0, 3)),  # long bottom <-> shelf
        ((0, 2), (0, 7)),  # outer right <-> lower left
        ((0, 4), (0, 6)),  # inner right <-> upper left
    ]
    return build_surface(f"L-shaped({a:g},{b:g})", [verts], gluings)


def builtin_surface(name: str) -> TranslationSurface:
    """Construct one of the named test surfaces.

    Known names: square-torus, regular-octagon, double-pentagon,
    L-shaped(a,b) with numeric legs a, b > 1.
    """
    key = name.strip()
    if key == "square-torus":
        return _square_torus()
    if key == "regular-octagon":
        return _regular_octagon()
    if key == "double-pentagon":
        return _double_pentagon()
    if key.startswith("L-shaped(") and key.endswith(")"):
        inner = key[len("L-shaped(") : -1]
        parts = inner.split(",")
        if len(parts) != 2:
            raise SurfaceValidationError(f"cannot parse L-shaped legs from {name!r}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise SurfaceValidationError(f"cannot parse L-shaped legs from {name!r}") from exc
        return _l_shaped(a, b)
    raise SurfaceValidationError(f"unknown builtin surface {name!r}")


BUILTIN_NAMES = ("square-torus", "regular-octagon", "double-pentagon", "L-shaped(2,2)")


def apply_matrix(surface: TranslationSurface, g) -> TranslationSurface:
    """Act on the surface by a determinant-one linear map.

    Every polygon vertex is mapped, the gluing combinatorics is unchanged,
    and the area is preserved.
    """
    mat = np.asarray(getattr(g, "matrix", g), dtype=float)
    if mat.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix or GroupElement")
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    if abs(det - 1.0) > 1e-8:
        raise SurfaceValidationError(f"matrix determinant {det!r} is not 1")
    mapped = [verts @ mat.T for verts in surface.polygons]
    return build_surface(surface.name, mapped, surface.gluings)
