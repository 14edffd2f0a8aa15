"""Fast variants of the refinement studies; full sizes run in acceptance."""

import pytest

from chemostokes.studies import (StudyResult, barenblatt_profile,
                                 barenblatt_study, heat_study, run_study)


class TestBarenblattProfile:
    def test_pointwise_frozen_values(self):
        # n(0, 1) = C and the support edge sits at |x| = sqrt(12 C) t^(1/3)
        assert barenblatt_profile(0.0, 1.0, 0.5) == 0.5
        edge = (12.0 * 0.5) ** 0.5
        assert barenblatt_profile(edge * 1.0001, 1.0, 0.5) == 0.0
        assert barenblatt_profile(edge * 0.999, 1.0, 0.5) > 0.0

    def test_self_similar_scaling(self):
        # peak decays like t^(-1/3)
        assert barenblatt_profile(0.0, 8.0, 0.5) == pytest.approx(0.25)

    def test_mass_is_time_invariant(self):
        import numpy as np
        x = np.linspace(-4.0, 4.0, 20001)
        m1 = np.trapezoid(barenblatt_profile(x, 1.0, 0.5), x)
        m2 = np.trapezoid(barenblatt_profile(x, 2.0, 0.5), x)
        assert m1 == pytest.approx(m2, rel=1e-6)
        # closed form (4/3) C sqrt(12 C)
        assert m1 == pytest.approx((4.0 / 3.0) * 0.5 * (12 * 0.5) ** 0.5,
                                   rel=1e-6)


class TestStudies:
    def test_barenblatt_small_order(self):
        res = barenblatt_study(resolutions=(32, 64))
        assert min(res.orders) >= 0.8
        assert res.errors[0] > res.errors[1]

    def test_heat_small_order(self):
        res = heat_study(resolutions=(16, 32), t_end=0.05)
        assert min(res.orders) >= 1.8

    def test_registry(self):
        with pytest.raises(ValueError, match="unknown study"):
            run_study("does-not-exist")

    def test_csv_rendering(self):
        res = StudyResult("demo", (16, 32), (0.5, 0.125), (2.0,))
        text = res.csv()
        lines = text.splitlines()
        assert lines[0] == "resolution,error,order"
        assert lines[1].startswith("16,0.5,")
        assert lines[2] == "32,0.125,2.0"
        assert res.fitted_order == pytest.approx(2.0)
