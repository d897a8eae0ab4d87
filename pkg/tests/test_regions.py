import csv
import json

import numpy as np
import pytest

from polarcoord.channels import capacity, joint_channel, make_bsc, cascade, make_bec
from polarcoord.errors import ConfigError
from polarcoord.infotheory import binary_entropy as h
from polarcoord.regions import (DEFAULT_POINTS, RatePoint, RegionCurve, example1_channels,
                                polar_region_example1, polar_region_example2, polar_region_general,
                                reference_discrepancy, reference_region_example1,
                                reference_region_exact, reference_sum_exact)


def test_polar_endpoints():
    c = polar_region_example1(0.15, 0.4)
    assert len(c.grid) == DEFAULT_POINTS
    q0, r0, s0 = c.rows()[0]
    assert (q0, r0, s0) == (0.0, 1.0, 1.0)
    q1, r1, s1 = c.rows()[-1]
    assert q1 == 0.15
    assert r1 == pytest.approx(0.39016, abs=1e-5)
    assert s1 == pytest.approx(0.75606, abs=1e-5)
    assert s1 == pytest.approx(0.6 * h(0.15) + 1 - h(0.15), abs=1e-14)


def test_polar_eps_zero():
    p, q = 0.2, 0.07
    c = polar_region_example1(p, 0.0, [q])
    assert c.sum_min[0] == pytest.approx(h(p) - h((p - q) / (1 - 2 * q)) + 1 - h(q), abs=1e-14)


def test_polar_r_min_nonincreasing():
    c = polar_region_example1(0.15, 0.4)
    assert np.all(np.diff(c.r_min) <= 1e-15)
    assert np.all(np.isfinite(c.sum_min))


def test_polar_grid_checks():
    with pytest.raises(ConfigError):
        polar_region_example1(0.15, 0.4, [0.0, 0.2])
    with pytest.raises(ConfigError):
        polar_region_example1(0.5, 0.4, [0.5])
    with pytest.raises(ConfigError):
        polar_region_example1(0.6, 0.4)


def test_reference_values():
    c = reference_region_example1(0.15, 0.4)
    nu, r, s = c.rows()[-1]
    assert nu == 0.4
    assert r == pytest.approx(0.23410, abs=1e-5)
    assert s == pytest.approx(1.57095, abs=1e-5)
    assert c.rows()[0][1] == pytest.approx(1 - h(0.15), abs=1e-15)


def test_reference_nu_one_limit():
    c = reference_region_example1(0.1, 1.0, [0.0, 0.5, 1.0])
    assert c.r_min[-1] == 0.0
    assert c.sum_min[-1] == pytest.approx(h(1.0) + 0.0 + 0.0, abs=1e-15)


def test_reference_grid_checks():
    with pytest.raises(ConfigError):
        reference_region_example1(0.15, 0.4, [0.0, 0.5])


def test_reference_exact_mutual_information():
    # I(X; V) matches the displayed r_min everywhere
    for nu in (0.0, 0.1, 0.25, 0.4):
        ix, ixy = reference_sum_exact(0.15, 0.4, nu)
        assert ix == pytest.approx((1 - nu) * (1 - h(0.15)), abs=1e-12)
    # at nu = 0 the exact sum is the polar endpoint, at nu = eps the displayed value
    assert reference_sum_exact(0.15, 0.4, 0.0)[1] == pytest.approx(1 - 0.4 * h(0.15), abs=1e-12)
    assert reference_sum_exact(0.15, 0.4, 0.4)[1] == pytest.approx(1.57095, abs=1e-5)


def test_reference_discrepancy_reported():
    d = reference_discrepancy(0.15, 0.4)
    assert d["max_abs_r_gap"] < 1e-12
    assert d["matches_with_negated_third_term"]
    assert d["max_abs_sum_gap"] == pytest.approx(2 * h(0.4), abs=1e-12)
    assert d["at_nu"] == 0.0


def test_reference_dominates_polar():
    polar = polar_region_example1(0.15, 0.4)
    for ref in (reference_region_exact(0.15, 0.4), reference_region_example1(0.15, 0.4)):
        lo = max(min(ref.sum_min), min(polar.sum_min))
        hi = min(max(ref.sum_min), max(polar.sum_min))
        for s in np.linspace(lo, hi, 300) if lo <= hi else []:
            assert ref.r_at_sum(s) <= polar.r_at_sum(s) + 1e-12


def test_general_corner_matches_closed_form():
    c = polar_region_example1(0.15, 0.4)
    for q, r, s in c.rows():
        pt = polar_region_general(*example1_channels(0.15, 0.4, q))
        assert pt.r == pytest.approx(r, abs=1e-10)
        assert pt.total == pytest.approx(s, abs=1e-10)


def test_general_identity_wx():
    pt = polar_region_general(make_bsc(0.0), make_bsc(0.2))
    assert pt == pytest.approx(RatePoint(1.0, 0.0), abs=1e-12)


def test_general_conditions():
    with pytest.raises(ConfigError):
        polar_region_general(make_bec(0.1), make_bsc(0.2))


def test_example2_trivial():
    for eps in (0.0, 0.3, 1.0):
        doc = polar_region_example2(eps)
        assert doc["corner"] == RatePoint(1.0, 0.0)
        assert doc["corner_from_capacities"] == pytest.approx((1.0, 0.0), abs=1e-12)


def test_curve_validation():
    with pytest.raises(ConfigError):
        RegionCurve("q", (0.0, 0.0), (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(ConfigError):
        RegionCurve("q", (0.0, 0.1), (1.0, float("nan")), (1.0, 1.0))


def test_csv_and_sidecar(tmp_path):
    c = polar_region_example1(0.15, 0.4, np.linspace(0, 0.15, 5))
    c.write_csv(tmp_path / "r.csv")
    c.write_sidecar(tmp_path / "r.csv.json")
    with open(tmp_path / "r.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["q", "r_min", "sum_min"]
    assert [float(v) for v in rows[-1]] == list(c.rows()[-1])
    meta = json.loads((tmp_path / "r.csv.json").read_text())
    assert meta["p"] == 0.15 and meta["points"] == 5
