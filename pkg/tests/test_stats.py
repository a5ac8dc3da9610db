import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sst

from oracles import chi2_sf_trapezoid
from gllm.stats import (TestReport, chi2_cdf, chi2_sf, deviance_g2, goodness_of_fit,
                        p_value, pearson_chi2)
from gllm.table import FactorSpec, from_records


class TestPearson:
    def test_simple(self):
        assert pearson_chi2([12, 8], [10, 10]) == pytest.approx(0.8)

    def test_identical(self):
        assert pearson_chi2([3, 4, 5], [3, 4, 5]) == 0.0

    def test_zero_zero_cell(self):
        assert pearson_chi2([0, 4], [0, 4]) == 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            pearson_chi2([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson_chi2([1, 2], [0, 3])

    def test_matches_scipy(self):
        o = np.array([30, 14, 34, 45, 57, 20])
        e = np.full(6, o.sum() / 6)
        assert pearson_chi2(o, e) == pytest.approx(sst.chisquare(o, e).statistic, rel=1e-12)


class TestDeviance:
    def test_zero_observed_cells(self):
        # O = 0 contributes nothing
        assert deviance_g2([0, 10], [2, 8]) == pytest.approx(20 * np.log(10 / 8))

    def test_matches_scipy(self):
        o = np.array([30, 14, 34, 45, 57, 20])
        e = np.full(6, o.sum() / 6)
        ref = sst.power_divergence(o, e, lambda_="log-likelihood").statistic
        assert deviance_g2(o, e) == pytest.approx(ref, rel=1e-12)

    def test_nonnegative_on_rounding(self):
        o = np.array([1.0, 2.0, 3.0])
        assert deviance_g2(o, o * (1 + 1e-16)) >= 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            deviance_g2([1, 2], [0, 3])


class TestChi2:
    @pytest.mark.parametrize("df", [1, 2, 3, 5, 10, 30])
    @pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 4.0, 10.0, 35.0, 100.0])
    def test_against_scipy(self, x, df):
        assert chi2_sf(x, df) == pytest.approx(sst.chi2.sf(x, df), abs=1e-10)
        assert chi2_cdf(x, df) == pytest.approx(sst.chi2.cdf(x, df), abs=1e-10)

    @pytest.mark.parametrize("x,df", [(0.5, 1), (3.0, 4), (20.0, 17), (60.0, 30)])
    def test_against_integration_oracle(self, x, df):
        assert chi2_sf(x, df) == pytest.approx(chi2_sf_trapezoid(x, df), abs=1e-7)

    def test_closed_form_df2(self):
        for x in (0.1, 1.0, 7.0):
            assert chi2_sf(x, 2) == pytest.approx(np.exp(-x / 2), rel=1e-13)

    def test_zero(self):
        assert chi2_sf(0.0, 7) == 1.0

    @pytest.mark.parametrize("df", [0, -1, 1.5, True])
    def test_bad_df(self, df):
        with pytest.raises(ValueError):
            chi2_sf(1.0, df)

    def test_negative_x(self):
        with pytest.raises(ValueError):
            chi2_sf(-1.0, 2)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 200), st.floats(0, 200), st.integers(1, 40))
    def test_monotone_in_x(self, x1, x2, df):
        lo, hi = sorted((x1, x2))
        assert chi2_sf(lo, df) >= chi2_sf(hi, df) - 1e-15
        assert 0.0 <= chi2_sf(hi, df) <= 1.0

    def test_p_value_df0(self):
        assert p_value(0.0, 0) == 1.0
        assert p_value(0.5, 0) == 0.0


def test_goodness_of_fit_report():
    f = [FactorSpec("a", ("x", "y"))]
    obs = from_records(f, [(("x",), 12), (("y",), 8)])
    exp = from_records(f, [(("x",), 10), (("y",), 10)])
    r = goodness_of_fit(obs, exp, 1)
    assert isinstance(r, TestReport)
    assert r.pearson_x2 == pytest.approx(0.8)
    assert r.p_x2 == pytest.approx(sst.chi2.sf(0.8, 1), abs=1e-12)
    assert r.g2 == pytest.approx(sst.power_divergence([12, 8], lambda_="log-likelihood").statistic)
