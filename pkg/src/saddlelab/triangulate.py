"""Triangulation of a glued-polygon surface into a flat array form.

Each polygon is ear-clipped (no new vertices, so every triangle corner is a
cone-point corner).  Boundary triangle edges inherit the surface gluings;
diagonal edges are glued to their twin inside the same polygon.  The arrays
below are the only geometry the enumeration kernel sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SurfaceValidationError
from .surface import TranslationSurface


@dataclass(frozen=True)
class TriangulatedSurface:
    """Flat description of the triangulated surface.

    edge_vecs[t, i]   vector of local edge i (vertex i to i+1) of triangle t
    nbr_tri[t, i]     triangle glued across edge (t, i)
    nbr_edge[t, i]    local edge index of that triangle along the shared edge
    vclass[t, i]      cone-point class of local vertex i
    tri_poly[t]       source polygon of triangle t
    """

    edge_vecs: np.ndarray
    nbr_tri: np.ndarray
    nbr_edge: np.ndarray
    vclass: np.ndarray
    tri_poly: np.ndarray
    n_classes: int

    @property
    def n_triangles(self) -> int:
        return int(self.edge_vecs.shape[0])


# Orientation predicates use a relative tolerance: vertex triples that are
# collinear up to float noise (straight polygon corners after a linear
# deformation) must never become ears, or a zero-area triangle whose long
# edge runs through a cone point would corrupt the geodesic search.
EAR_EPS = 1e-12


def _ear_clip(vertices: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangle fan indices for a simple ccw polygon, by ear clipping.

    Vertices with interior angle exactly pi (or within float noise of it)
    are legal; such corners are never clipped as ears but remain as
    triangle corners.
    """
    n = len(vertices)
    idx = list(range(n))
    triangles: list[tuple[int, int, int]] = []

    def area2(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def dist(a, b):
        return float(np.hypot(b[0] - a[0], b[1] - a[1]))

    def strictly_convex(a, b, c):
        return area2(a, b, c) > EAR_EPS * dist(a, b) * dist(b, c)

    def inside_closed(a, b, c, p):
        # p inside or on the closed triangle abc, with a slack that counts
        # near-boundary points as inside (blocking is the safe direction).
        for u, v in ((a, b), (b, c), (c, a)):
            if area2(u, v, p) < -EAR_EPS * dist(u, v) * (dist(u, p) + dist(v, p)):
                return False
        return True

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:
            raise SurfaceValidationError("ear clipping failed; polygon may be degenerate")
        m = len(idx)
        clipped = False
        for k in range(m):
            i_prev, i_cur, i_next = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = vertices[i_prev], vertices[i_cur], vertices[i_next]
            if not strictly_convex(a, b, c):
                continue
            blocked = False
            for j in idx:
                if j in (i_prev, i_cur, i_next):
                    continue
                if inside_closed(a, b, c, vertices[j]):
                    blocked = True
                    break
            if not blocked:
                triangles.append((i_prev, i_cur, i_next))
                idx.pop(k)
                clipped = True
                break
        if not clipped:
            raise SurfaceValidationError("ear clipping found no ear; polygon may be degenerate")
    a, b, c = idx
    if not strictly_convex(vertices[a], vertices[b], vertices[c]):
        raise SurfaceValidationError("degenerate final triangle in ear clipping")
    triangles.append((a, b, c))
    return triangles


def triangulate(surface: TranslationSurface) -> TriangulatedSurface:
    corner_class: dict[tuple[int, int], int] = {}
    for cp in surface.cone_points:
        for corner in cp.corners:
            corner_class[corner] = cp.index

    tris: list[tuple[int, int, int]] = []
    tri_poly: list[int] = []
    for p, verts in enumerate(surface.polygons):
        for tri in _ear_clip(verts):
            tris.append(tri)
            tri_poly.append(p)

    T = len(tris)
    edge_vecs = np.zeros((T, 3, 2), dtype=np.float64)
    vclass = np.zeros((T, 3), dtype=np.int32)
    nbr_tri = np.full((T, 3), -1, dtype=np.int32)
    nbr_edge = np.full((T, 3), -1, dtype=np.int32)

    # Directed edge key (polygon, tail vertex, head vertex) -> (tri, local edge).
    slot_of: dict[tuple[int, int, int], tuple[int, int]] = {}
    for t, (tri, p) in enumerate(zip(tris, tri_poly)):
        verts = surface.polygons[p]
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            edge_vecs[t, i] = verts[b] - verts[a]
            vclass[t, i] = corner_class[(p, tri[i])]
            slot_of[(p, a, b)] = (t, i)

    gluing_partner: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b in surface.gluings:
        gluing_partner[a] = b
        gluing_partner[b] = a

    for t, (tri, p) in enumerate(zip(tris, tri_poly)):
        n_p = len(surface.polygons[p])
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            if (b - a) % n_p == 1:
                # Polygon boundary edge a -> a+1: follow the surface gluing.
                q, f = gluing_partner[(p, a)]
                n_q = len(surface.polygons[q])
                t2, i2 = slot_of[(q, f, (f + 1) % n_q)]
            else:
                # Diagonal: its twin is the reversed directed edge in the same polygon.
                t2, i2 = slot_of[(p, b, a)]
            nbr_tri[t, i] = t2
            nbr_edge[t, i] = i2

    if np.any(nbr_tri < 0):
        raise SurfaceValidationError("triangulation produced an unmatched triangle edge")

    # Glued triangle edges must be opposite vectors (inherited from validation).
    for t in range(T):
        for i in range(3):
            t2, i2 = nbr_tri[t, i], nbr_edge[t, i]
            if not np.allclose(edge_vecs[t, i], -edge_vecs[t2, i2], atol=1e-9, rtol=0):
                raise SurfaceValidationError(
                    "triangulated edge vectors are not opposite across a gluing"
                )

    # No triangle may be degenerate: the search develops across every one.
    e0, e1 = edge_vecs[:, 0], edge_vecs[:, 1]
    doubled_area = e0[:, 0] * e1[:, 1] - e0[:, 1] * e1[:, 0]
    scale = np.hypot(e0[:, 0], e0[:, 1]) * np.hypot(e1[:, 0], e1[:, 1])
    if np.any(doubled_area <= EAR_EPS * scale):
        raise SurfaceValidationError("triangulation produced a degenerate triangle")

    for arr in (edge_vecs, nbr_tri, nbr_edge, vclass):
        arr.setflags(write=False)
    tri_poly_arr = np.array(tri_poly, dtype=np.int32)
    tri_poly_arr.setflags(write=False)
    return TriangulatedSurface(
        edge_vecs=edge_vecs,
        nbr_tri=nbr_tri,
        nbr_edge=nbr_edge,
        vclass=vclass,
        tri_poly=tri_poly_arr,
        n_classes=len(surface.cone_points),
    )
