import json
import math

import numpy as np
import pytest

from saddlelab import (
    SurfaceValidationError,
    apply_matrix,
    builtin_surface,
    cone_data,
    load_surface,
    serialize_surface,
)
from saddlelab.sl2 import diag_flow, rotation

TORUS_DOC = json.dumps(
    {
        "name": "unit-torus",
        "polygons": [{"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}],
        "gluings": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
    }
)


def test_load_unit_square_torus():
    s = load_surface(TORUS_DOC)
    assert len(s.polygons) == 1
    assert s.genus == 1
    assert s.area == pytest.approx(1.0)
    points, genus = cone_data(s)
    assert genus == 1
    assert len(points) == 1
    assert points[0].total_angle == pytest.approx(2 * math.pi)
    assert points[0].order == 0


def test_missing_gluing_is_unmatched_edge():
    doc = json.loads(TORUS_DOC)
    doc["gluings"] = doc["gluings"][:1]
    with pytest.raises(SurfaceValidationError, match="unmatched edge"):
        load_surface(json.dumps(doc))


def test_gluing_holonomy_mismatch():
    doc = json.loads(TORUS_DOC)
    doc["polygons"][0]["vertices"] = [[0, 0], [1, 0], [1.5, 1], [0, 1]]
    with pytest.raises(SurfaceValidationError, match="holonomy mismatch"):
        load_surface(json.dumps(doc))


def test_non_simple_polygon_rejected():
    doc = {
        "name": "bowtie",
        "polygons": [{"vertices": [[0, 0], [1, 1], [1, 0], [0, 1]]}],
        "gluings": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
    }
    with pytest.raises(SurfaceValidationError, match="non-simple|area"):
        load_surface(json.dumps(doc))


def test_parse_error():
    with pytest.raises(SurfaceValidationError, match="JSON"):
        load_surface("{not json")


def test_octagon_cone_point():
    s = builtin_surface("regular-octagon")
    points, genus = cone_data(s)
    assert genus == 2
    assert len(points) == 1
    assert points[0].total_angle == pytest.approx(6 * math.pi, abs=1e-9)
    assert points[0].order == 2
    assert s.area == pytest.approx(2 * (1 + math.sqrt(2)))


def test_double_pentagon_cone_point():
    s = builtin_surface("double-pentagon")
    points, genus = cone_data(s)
    assert genus == 2
    assert len(points) == 1
    assert points[0].order == 2


def test_l_shaped_cone_point():
    s = builtin_surface("L-shaped(2,2)")
    points, genus = cone_data(s)
    assert genus == 2
    assert len(points) == 1
    assert points[0].total_angle == pytest.approx(6 * math.pi, abs=1e-9)
    assert s.area == pytest.approx(3.0)


def test_l_shaped_requires_long_legs():
    with pytest.raises(SurfaceValidationError):
        builtin_surface("L-shaped(0.5,2)")


def test_unknown_builtin():
    with pytest.raises(SurfaceValidationError, match="unknown"):
        builtin_surface("dodecagon")


def test_serialize_round_trip():
    for name in ("square-torus", "regular-octagon", "double-pentagon", "L-shaped(2,2)"):
        s = builtin_surface(name)
        doc = serialize_surface(s)
        s2 = load_surface(doc)
        assert s2 == s
        assert serialize_surface(s2) == doc


def test_apply_identity_is_identity():
    s = builtin_surface("regular-octagon")
    s2 = apply_matrix(s, np.eye(2))
    assert s2 == s


def test_apply_preserves_area_and_cone_data():
    s = builtin_surface("L-shaped(2,2)")
    g = rotation(0.7) @ diag_flow(0.9)
    s2 = apply_matrix(s, g)
    assert s2.area == pytest.approx(s.area, rel=1e-12)
    assert [c.order for c in s2.cone_points] == [c.order for c in s.cone_points]
    assert [len(c.corners) for c in s2.cone_points] == [len(c.corners) for c in s.cone_points]


def test_apply_flow_and_inverse_returns_original():
    s = builtin_surface("square-torus")
    s2 = apply_matrix(apply_matrix(s, diag_flow(1.0)), diag_flow(-1.0))
    for p, q in zip(s.polygons, s2.polygons):
        assert np.allclose(p, q, atol=1e-12)


def test_action_is_homomorphism():
    s = builtin_surface("double-pentagon")
    rng = np.random.default_rng(11)
    for _ in range(5):
        g = rotation(rng.uniform(0, 2 * math.pi)) @ diag_flow(rng.uniform(0, 1))
        h = rotation(rng.uniform(0, 2 * math.pi)) @ diag_flow(rng.uniform(0, 1))
        lhs = apply_matrix(apply_matrix(s, h), g)
        rhs = apply_matrix(s, g @ h)
        for p, q in zip(lhs.polygons, rhs.polygons):
            assert np.allclose(p, q, atol=1e-10)


def test_glued_edges_sum_to_zero_after_action():
    s = builtin_surface("regular-octagon")
    s2 = apply_matrix(s, rotation(1.1) @ diag_flow(0.8))
    for (p, e), (q, f) in s2.gluings:
        total = s2.edge_vector(p, e) + s2.edge_vector(q, f)
        assert np.hypot(*total) < 1e-10


def test_determinant_violation():
    s = builtin_surface("square-torus")
    with pytest.raises(SurfaceValidationError, match="determinant"):
        apply_matrix(s, np.diag([2.0, 1.0]))
