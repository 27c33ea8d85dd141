import io
import math

import numpy as np
import pytest

from oracles import match_tolerant, primitive_vectors
from saddlelab import (
    Annulus,
    Arc,
    IncompleteSpectrumError,
    ResourceLimitExceeded,
    apply_matrix,
    enumerate_up_to_length,
    filter_annulus,
    filter_sector,
    first_n,
    nth_length,
    systole,
)
from saddlelab.sl2 import HaarSampler, rotation
from saddlelab.spectrum import verify_witness


def test_torus_unit_radius(torus):
    spec = enumerate_up_to_length(torus, 1.0)
    assert len(spec) == 4
    assert match_tolerant(spec.holonomies, [(1, 0), (0, 1), (-1, 0), (0, -1)])


def test_torus_radius_1_5_adds_diagonals(torus):
    spec = enumerate_up_to_length(torus, 1.5)
    assert len(spec) == 8
    assert match_tolerant(spec.holonomies, primitive_vectors(1.5))


def test_torus_oracle_exact_to_radius_40(torus):
    spec = enumerate_up_to_length(torus, 40.0)
    oracle = primitive_vectors(40.0)
    assert len(spec) == len(oracle)
    got = sorted(map(tuple, np.round(spec.holonomies).astype(int)))
    want = sorted(map(tuple, oracle.astype(int)))
    assert got == want
    assert np.allclose(spec.holonomies, np.round(spec.holonomies), atol=1e-9)


def test_empty_below_systole(all_builtins):
    for s in all_builtins:
        sys_len = systole(s)
        spec = enumerate_up_to_length(s, 0.9 * sys_len)
        assert len(spec) == 0


def test_canonical_order(torus, octagon):
    for s, radius in ((torus, 12.0), (octagon, 8.0)):
        spec = enumerate_up_to_length(s, radius)
        lens = spec.lengths
        assert np.all(np.diff(lens) >= -1e-9 * lens[:-1])
        # Within a tie group angles strictly increase unless holonomies repeat.
        for i in range(len(spec) - 1):
            if lens[i + 1] - lens[i] <= 1e-9 * lens[i]:
                a0, a1 = spec.angles[i], spec.angles[i + 1]
                same_hol = np.allclose(spec.holonomies[i], spec.holonomies[i + 1])
                assert a1 > a0 or same_hol


def test_first_n_cardinality_and_prefix(torus):
    for n in (1, 4, 7, 30, 101):
        spec = first_n(torus, n)
        assert len(spec) == n
    full = enumerate_up_to_length(torus, 10.0)
    pre = first_n(torus, 50)
    assert np.allclose(pre.holonomies, full.holonomies[:50])


def test_nth_length_examples(torus):
    assert nth_length(torus, 1) == pytest.approx(1.0)
    assert systole(torus) == pytest.approx(1.0)
    assert nth_length(torus, 5) == pytest.approx(math.sqrt(2.0))


def test_first_connection_is_smallest_angle_among_ties(torus):
    spec = first_n(torus, 1)
    assert tuple(spec.holonomies[0]) == (1.0, 0.0)


def test_nth_length_rotation_invariant(octagon):
    for theta in (0.4, 1.9, 3.7):
        rotated = apply_matrix(octagon, rotation(theta))
        for n in (1, 10, 50):
            assert nth_length(rotated, n) == pytest.approx(
                nth_length(octagon, n), abs=1e-10
            )


def test_antipodal_symmetry(all_builtins):
    for s in all_builtins:
        spec = enumerate_up_to_length(s, 6.0)
        assert len(spec) % 2 == 0
        sset = set(map(tuple, np.round(spec.holonomies, 8)))
        for x, y in np.round(spec.holonomies, 8):
            assert (-x, -y) in sset


def test_sector_filter_half_open(torus):
    spec = enumerate_up_to_length(torus, 1.5)
    q1 = filter_sector(spec, Arc(0.0, math.pi / 2))
    assert match_tolerant(q1.holonomies, [(1, 0), (1, 1)])


def test_sector_filter_full_circle_minus_point(torus):
    spec = enumerate_up_to_length(torus, 3.0)
    almost_all = filter_sector(spec, Arc(1e-9, 1e-9 + 2 * math.pi - 1e-7))
    # Only the angle-0 connections fall in the excluded sliver.
    excluded = np.count_nonzero(spec.angles < 1e-9)
    assert len(almost_all) == len(spec) - excluded


def test_wrapping_sector(torus):
    spec = enumerate_up_to_length(torus, 1.5)
    wrap = filter_sector(spec, Arc(7 * math.pi / 4, math.pi / 4))
    assert match_tolerant(wrap.holonomies, [(1, 0), (1, -1)])


def test_annulus_filter(torus):
    spec = enumerate_up_to_length(torus, 1.5)
    ring = filter_annulus(spec, Annulus(1.2, 1.5))
    assert match_tolerant(ring.holonomies, [(1, 1), (-1, 1), (-1, -1), (1, -1)])


def test_annulus_needs_complete_spectrum(torus):
    spec = enumerate_up_to_length(torus, 1.5)
    with pytest.raises(IncompleteSpectrumError):
        filter_annulus(spec, Annulus(1.0, 2.0))


def test_equivariance_under_group_elements(octagon):
    sampler = HaarSampler(T=1.0, seed=12)
    radius = 5.0
    base = enumerate_up_to_length(octagon, math.e * radius * 1.0001)
    for i in range(3):
        g = sampler.sample(i)
        moved = enumerate_up_to_length(apply_matrix(octagon, g), radius)
        mapped = base.holonomies @ g.matrix.T
        mapped = mapped[np.hypot(mapped[:, 0], mapped[:, 1]) <= radius]
        assert match_tolerant(moved.holonomies, mapped, tol=1e-7)


def test_no_duplicate_connections(octagon, l_surface):
    for s in (octagon, l_surface):
        spec = enumerate_up_to_length(s, 6.0, with_paths=True)
        keys = {
            (round(c.holonomy[0], 9), round(c.holonomy[1], 9), c.start, c.end, c.chart_path)
            for c in spec
        }
        assert len(keys) == len(spec)


def test_witness_paths_develop_to_holonomy(all_builtins):
    for s in all_builtins:
        spec = enumerate_up_to_length(s, 4.0, with_paths=True)
        assert len(spec) > 0
        for i in range(len(spec)):
            assert verify_witness(s, spec, i) <= 1e-9


def test_endpoint_classes_are_cone_points(l_surface):
    spec = enumerate_up_to_length(l_surface, 5.0)
    n_classes = len(l_surface.cone_points)
    assert np.all((spec.start >= 0) & (spec.start < n_classes))
    assert np.all((spec.end >= 0) & (spec.end < n_classes))


def test_resource_cap(octagon):
    with pytest.raises(ResourceLimitExceeded):
        enumerate_up_to_length(octagon, 50.0, max_triangles=1000)


def test_triangle_cap_env_override(torus, monkeypatch):
    monkeypatch.setenv("SADDLE_MAX_TRIANGLES", "500")
    with pytest.raises(ResourceLimitExceeded):
        enumerate_up_to_length(torus, 60.0)
    monkeypatch.setenv("SADDLE_MAX_TRIANGLES", "not-a-number")
    with pytest.raises(ValueError):
        enumerate_up_to_length(torus, 2.0)


def test_worker_count_does_not_change_result(octagon):
    one = enumerate_up_to_length(octagon, 10.0, workers=1)
    two = enumerate_up_to_length(octagon, 10.0, workers=2)
    assert np.array_equal(one.holonomies, two.holonomies)
    assert np.array_equal(one.start, two.start)
    assert np.array_equal(one.end, two.end)


def test_csv_export(torus):
    spec = enumerate_up_to_length(torus, 1.0)
    buf = io.StringIO()
    spec.to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "n,hol_x,hol_y,length,angle,frac_length"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[3]) == 1.0
    assert float(first[5]) == 0.0


def test_bad_arguments(torus):
    with pytest.raises(ValueError):
        enumerate_up_to_length(torus, -1.0)
    with pytest.raises(ValueError):
        first_n(torus, 0)
    with pytest.raises(ValueError):
        Arc(0.0, 0.0)
    with pytest.raises(ValueError):
        Annulus(2.0, 1.0)
