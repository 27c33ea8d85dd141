"""Wedge-pruned polygon development behind saddle connection enumeration.

From every triangle corner of a cone point the surface is developed into the
plane across glued edges.  Each search state is a developed triangle entered
through one edge together with an open wedge of directions whose rays cross
that edge.  When the far vertex of the state lands strictly inside the wedge
it is a cone point visible along a straight segment from the start corner:
a saddle connection.  The wedge then splits on both sides of that vertex,
because longer segments in the exact same direction are blocked.

States are pruned once the wedge-visible part of the entered edge leaves the
disk of the requested radius.  The kernel is compiled with numba and releases
the GIL so corner ranges can run on threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Relative tolerance for treating a developed vertex as collinear with a
# wedge boundary.  Collinear vertices are blocked by construction, so the
# tolerance only needs to absorb float drift of developed coordinates.
CROSS_TOL = 1e-12

_STATUS_OK = 0
_STATUS_BUDGET = 1


@njit(cache=True, nogil=True)
def _develop_range(
    edge_vecs,
    nbr_tri,
    nbr_edge,
    vclass,
    corner_tri,
    corner_idx,
    corner_lo,
    corner_hi,
    radius,
    max_states,
    collect_paths,
):
    tol2 = CROSS_TOL * CROSS_TOL

    cap_out = 1024
    out_hx = np.empty(cap_out, np.float64)
    out_hy = np.empty(cap_out, np.float64)
    out_start = np.empty(cap_out, np.int32)
    out_end = np.empty(cap_out, np.int32)
    n_out = 0

    cap_path_buf = 4096 if collect_paths else 1
    pbuf_tri = np.empty(cap_path_buf, np.int32)
    pbuf_edge = np.empty(cap_path_buf, np.int32)
    cap_off = cap_out + 1
    out_off = np.zeros(cap_off, np.int64)
    n_pbuf = 0

    cap_stack = 4096
    st_tri = np.empty(cap_stack, np.int32)
    st_edge = np.empty(cap_stack, np.int32)
    st_depth = np.empty(cap_stack, np.int64)
    st_f = np.empty((cap_stack, 6), np.float64)  # px, py, lox, loy, hix, hiy

    cap_depth = 4096
    path_tri = np.empty(cap_depth, np.int32)
    path_edge = np.empty(cap_depth, np.int32)

    states = 0
    status = _STATUS_OK

    for c in range(corner_lo, corner_hi):
        t0 = corner_tri[c]
        i0 = corner_idx[c]
        start_cls = vclass[t0, i0]
        j0 = (i0 + 1) % 3
        u1x = edge_vecs[t0, i0, 0]
        u1y = edge_vecs[t0, i0, 1]
        u2x = u1x + edge_vecs[t0, j0, 0]
        u2y = u1y + edge_vecs[t0, j0, 1]
        path_tri[0] = t0
        path_edge[0] = i0

        sp = 0
        st_tri[0] = nbr_tri[t0, j0]
        st_edge[0] = nbr_edge[t0, j0]
        st_depth[0] = 1
        st_f[0, 0] = u2x
        st_f[0, 1] = u2y
        st_f[0, 2] = u1x
        st_f[0, 3] = u1y
        st_f[0, 4] = u2x
        st_f[0, 5] = u2y
        sp = 1

        while sp > 0:
            sp -= 1
            t = st_tri[sp]
            i = st_edge[sp]
            depth = st_depth[sp]
            px = st_f[sp, 0]
            py = st_f[sp, 1]
            lox = st_f[sp, 2]
            loy = st_f[sp, 3]
            hix = st_f[sp, 4]
            hiy = st_f[sp, 5]

            states += 1
            if states > max_states:
                status = _STATUS_BUDGET
                break

            if depth >= cap_depth:
                new_cap = cap_depth * 2
                npt = np.empty(new_cap, np.int32)
                npe = np.empty(new_cap, np.int32)
                npt[:cap_depth] = path_tri
                npe[:cap_depth] = path_edge
                path_tri = npt
                path_edge = npe
                cap_depth = new_cap
            path_tri[depth] = t
            path_edge[depth] = i

            eix = edge_vecs[t, i, 0]
            eiy = edge_vecs[t, i, 1]
            # Entered edge endpoints: S1 on the lo side, S2 = P on the hi side.
            s1x = px + eix
            s1y = py + eiy
            s2x = px
            s2y = py

            # Clip the segment to the wedge, then prune on distance.
            cl1 = lox * s1y - loy * s1x
            cl2 = lox * s2y - loy * s2x
            den = cl1 - cl2
            if den < -1e-300 or den > 1e-300:
                lam_lo = cl1 / den
                if lam_lo < 0.0:
                    lam_lo = 0.0
                elif lam_lo > 1.0:
                    lam_lo = 1.0
            else:
                lam_lo = 0.0
            ch1 = hix * s1y - hiy * s1x
            ch2 = hix * s2y - hiy * s2x
            den2 = ch1 - ch2
            if den2 < -1e-300 or den2 > 1e-300:
                lam_hi = ch1 / den2
                if lam_hi < 0.0:
                    lam_hi = 0.0
                elif lam_hi > 1.0:
                    lam_hi = 1.0
            else:
                lam_hi = 1.0
            if lam_lo > lam_hi:
                lam_lo = 0.0
                lam_hi = 1.0
            ax = s1x + lam_lo * (s2x - s1x)
            ay = s1y + lam_lo * (s2y - s1y)
            bx = s1x + lam_hi * (s2x - s1x)
            by = s1y + lam_hi * (s2y - s1y)
            dx = bx - ax
            dy = by - ay
            seg2 = dx * dx + dy * dy
            if seg2 > 0.0:
                tt = -(ax * dx + ay * dy) / seg2
                if tt < 0.0:
                    tt = 0.0
                elif tt > 1.0:
                    tt = 1.0
                qx = ax + tt * dx
                qy = ay + tt * dy
            else:
                qx = ax
                qy = ay
            if qx * qx + qy * qy > radius * radius:
                continue

            j = (i + 1) % 3
            k = (i + 2) % 3
            cx = s1x + edge_vecs[t, j, 0]
            cy = s1y + edge_vecs[t, j, 1]

            c_lo = lox * cy - loy * cx
            c_hi = cx * hiy - cy * hix
            lo2 = lox * lox + loy * loy
            hi2 = hix * hix + hiy * hiy
            cc2 = cx * cx + cy * cy
            in_lo = c_lo > 0.0 and c_lo * c_lo > tol2 * lo2 * cc2
            in_hi = c_hi > 0.0 and c_hi * c_hi > tol2 * hi2 * cc2

            if in_lo and in_hi:
                if cc2 <= radius * radius:
                    if n_out >= cap_out:
                        new_cap = cap_out * 2
                        nhx = np.empty(new_cap, np.float64)
                        nhy = np.empty(new_cap, np.float64)
                        nst = np.empty(new_cap, np.int32)
                        nen = np.empty(new_cap, np.int32)
                        noff = np.zeros(new_cap + 1, np.int64)
                        nhx[:cap_out] = out_hx
                        nhy[:cap_out] = out_hy
                        nst[:cap_out] = out_start
                        nen[:cap_out] = out_end
                        noff[: cap_out + 1] = out_off
                        out_hx = nhx
                        out_hy = nhy
                        out_start = nst
                        out_end = nen
                        out_off = noff
                        cap_out = new_cap
                    out_hx[n_out] = cx
                    out_hy[n_out] = cy
                    out_start[n_out] = start_cls
                    out_end[n_out] = vclass[t, k]
                    if collect_paths:
                        need = n_pbuf + depth + 1
                        while need > cap_path_buf:
                            new_cap = cap_path_buf * 2
                            nt = np.empty(new_cap, np.int32)
                            ne = np.empty(new_cap, np.int32)
                            nt[:cap_path_buf] = pbuf_tri
                            ne[:cap_path_buf] = pbuf_edge
                            pbuf_tri = nt
                            pbuf_edge = ne
                            cap_path_buf = new_cap
                        for m in range(depth + 1):
                            pbuf_tri[n_pbuf + m] = path_tri[m]
                            pbuf_edge[n_pbuf + m] = path_edge[m]
                        n_pbuf += depth + 1
                    out_off[n_out + 1] = n_pbuf
                    n_out += 1

                # Continue on both sides of the vertex; the exact direction
                # through it is blocked for longer segments.
                if sp + 2 > cap_stack:
                    new_cap = cap_stack * 2
                    nt = np.empty(new_cap, np.int32)
                    ne = np.empty(new_cap, np.int32)
                    nd = np.empty(new_cap, np.int64)
                    nf = np.empty((new_cap, 6), np.float64)
                    nt[:cap_stack] = st_tri
                    ne[:cap_stack] = st_edge
                    nd[:cap_stack] = st_depth
                    nf[:cap_stack] = st_f
                    st_tri = nt
                    st_edge = ne
                    st_depth = nd
                    st_f = nf
                    cap_stack = new_cap
                st_tri[sp] = nbr_tri[t, j]
                st_edge[sp] = nbr_edge[t, j]
                st_depth[sp] = depth + 1
                st_f[sp, 0] = cx
                st_f[sp, 1] = cy
                st_f[sp, 2] = lox
                st_f[sp, 3] = loy
                st_f[sp, 4] = cx
                st_f[sp, 5] = cy
                sp += 1
                st_tri[sp] = nbr_tri[t, k]
                st_edge[sp] = nbr_edge[t, k]
                st_depth[sp] = depth + 1
                st_f[sp, 0] = px
                st_f[sp, 1] = py
                st_f[sp, 2] = cx
                st_f[sp, 3] = cy
                st_f[sp, 4] = hix
                st_f[sp, 5] = hiy
                sp += 1
            elif in_lo:
                # Vertex at or beyond the hi boundary: every ray exits lo-side.
                if sp + 1 > cap_stack:
                    new_cap = cap_stack * 2
                    nt = np.empty(new_cap, np.int32)
                    ne = np.empty(new_cap, np.int32)
                    nd = np.empty(new_cap, np.int64)
                    nf = np.empty((new_cap, 6), np.float64)
                    nt[:cap_stack] = st_tri
                    ne[:cap_stack] = st_edge
                    nd[:cap_stack] = st_depth
                    nf[:cap_stack] = st_f
                    st_tri = nt
                    st_edge = ne
                    st_depth = nd
                    st_f = nf
                    cap_stack = new_cap
                st_tri[sp] = nbr_tri[t, j]
                st_edge[sp] = nbr_edge[t, j]
                st_depth[sp] = depth + 1
                st_f[sp, 0] = cx
                st_f[sp, 1] = cy
                st_f[sp, 2] = lox
                st_f[sp, 3] = loy
                st_f[sp, 4] = hix
                st_f[sp, 5] = hiy
                sp += 1
            elif in_hi:
                # Vertex at or beyond the lo boundary: every ray exits hi-side.
                if sp + 1 > cap_stack:
                    new_cap = cap_stack * 2
                    nt = np.empty(new_cap, np.int32)
                    ne = np.empty(new_cap, np.int32)
                    nd = np.empty(new_cap, np.int64)
                    nf = np.empty((new_cap, 6), np.float64)
                    nt[:cap_stack] = st_tri
                    ne[:cap_stack] = st_edge
                    nd[:cap_stack] = st_depth
                    nf[:cap_stack] = st_f
                    st_tri = nt
                    st_edge = ne
                    st_depth = nd
                    st_f = nf
                    cap_stack = new_cap
                st_tri[sp] = nbr_tri[t, k]
                st_edge[sp] = nbr_edge[t, k]
                st_depth[sp] = depth + 1
                st_f[sp, 0] = px
                st_f[sp, 1] = py
                st_f[sp, 2] = lox
                st_f[sp, 3] = loy
                st_f[sp, 4] = hix
                st_f[sp, 5] = hiy
                sp += 1
            # Otherwise the wedge has collapsed onto the vertex direction.

        if status != _STATUS_OK:
            break

    return (
        out_hx[:n_out].copy(),
        out_hy[:n_out].copy(),
        out_start[:n_out].copy(),
        out_end[:n_out].copy(),
        out_off[: n_out + 1].copy(),
        pbuf_tri[:n_pbuf].copy(),
        pbuf_edge[:n_pbuf].copy(),
        states,
        status,
    )


def develop_range(tri, corner_lo, corner_hi, radius, max_states, collect_paths):
    """Run the development kernel over a contiguous range of corners."""
    n_tri = tri.n_triangles
    corner_tri = np.repeat(np.arange(n_tri, dtype=np.int32), 3)
    corner_idx = np.tile(np.arange(3, dtype=np.int32), n_tri)
    return _develop_range(
        tri.edge_vecs,
        tri.nbr_tri,
        tri.nbr_edge,
        tri.vclass,
        corner_tri,
        corner_idx,
        corner_lo,
        corner_hi,
        float(radius),
        int(max_states),
        bool(collect_paths),
    )


def replay_path(tri, path: tuple[tuple[int, int], ...]) -> np.ndarray:
    """Re-develop a stored witness path and return the reached holonomy.

    The first entry names the start corner; each later entry is the edge the
    connection crossed.  A single-entry path is a connection along that edge.
    """
    ev = tri.edge_vecs
    t0, i0 = path[0]
    if len(path) == 1:
        return ev[t0, i0].copy()
    j0 = (i0 + 1) % 3
    px, py = ev[t0, i0, 0] + ev[t0, j0, 0], ev[t0, i0, 1] + ev[t0, j0, 1]
    expect = (tri.nbr_tri[t0, j0], tri.nbr_edge[t0, j0])
    for step, (t, i) in enumerate(path[1:]):
        if (t, i) != (int(expect[0]), int(expect[1])):
            raise ValueError(f"witness path broken at step {step}: {(t, i)} != {expect}")
        j = (i + 1) % 3
        k = (i + 2) % 3
        cx = px + ev[t, i, 0] + ev[t, j, 0]
        cy = py + ev[t, i, 1] + ev[t, j, 1]
        nxt_j = (tri.nbr_tri[t, j], tri.nbr_edge[t, j])
        nxt_k = (tri.nbr_tri[t, k], tri.nbr_edge[t, k])
        if step + 2 < len(path):
            nxt = path[step + 2]
            if nxt == (int(nxt_j[0]), int(nxt_j[1])):
                px, py = cx, cy
                expect = nxt_j
            elif nxt == (int(nxt_k[0]), int(nxt_k[1])):
                expect = nxt_k
            else:
                raise ValueError(f"witness path broken after step {step}")
    return np.array([cx, cy])
