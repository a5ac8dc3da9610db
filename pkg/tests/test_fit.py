import itertools

import numpy as np
import pytest

from conftest import random_table
from oracles import oracle_ipf
from gllm.fit import (CLOSED_FORM, IPF, CliqueTree, FitError, NotDecomposableError,
                      birch_check, clique_tree, degrees_of_freedom, fit, fit_decomposable,
                      fit_ipf, render_factorization, sufficient_statistics)
from gllm.model import GeneratingClass, parse_model
from gllm.stats import deviance_g2
from gllm.table import FactorSpec, from_records, marginalize

F3 = ("1", "2", "3")


def table_from_array(arr, names=None):
    names = names or [str(i + 1) for i in range(arr.ndim)]
    factors = [FactorSpec(n, tuple(range(k))) for n, k in zip(names, arr.shape)]
    return from_records(factors, [(idx, arr[idx]) for idx in np.ndindex(*arr.shape)])


class TestCliqueTree:
    def test_two_triangles(self):
        tree = clique_tree(parse_model("[123][134]", "1234"))
        assert tree.cliques == (frozenset("123"), frozenset("134"))
        assert tree.separators == (frozenset(), frozenset("13"))

    def test_not_decomposable(self):
        with pytest.raises(NotDecomposableError):
            clique_tree(parse_model("[12][13][23]", F3))

    def test_rip_validated(self):
        with pytest.raises(FitError):
            CliqueTree((frozenset("12"), frozenset("34"), frozenset("23")),
                       (frozenset(), frozenset(), frozenset("23")))

    def test_path_order(self):
        # [12][23][34] must be ordered along the path
        tree = clique_tree(parse_model("[34][12][23]", "1234"))
        assert [len(s) for s in tree.separators] == [0, 1, 1]


class TestDegreesOfFreedom:
    def test_saturated_is_zero(self):
        assert degrees_of_freedom(GeneratingClass.saturated(F3), {"1": 3, "2": 4, "3": 2}) == 0

    def test_independence(self, personality):
        gc = parse_model("[P][C][D]", personality.names)
        assert degrees_of_freedom(gc, personality) == 4

    def test_nesting_monotone(self):
        levels = {"1": 3, "2": 2, "3": 4, "4": 2}
        chain = ["[1][2][3][4]", "[12][3][4]", "[12][13][4]", "[123][4]", "[123][134]", "[1234]"]
        dfs = [degrees_of_freedom(parse_model(m, "1234"), levels) for m in chain]
        assert dfs == sorted(dfs, reverse=True)
        assert dfs[-1] == 0

    def test_accepts_factor_list(self, personality):
        gc = parse_model("[P][C][D]", personality.names)
        assert degrees_of_freedom(gc, personality.factors) == 4


class TestClosedForm:
    def test_birch_margins(self, infant):
        gc = parse_model("[clinic,survival][clinic,care]", infant.names)
        fr = fit_decomposable(infant, gc)
        assert fr.method == CLOSED_FORM
        assert birch_check(fr, infant) <= 1e-9 * infant.total
        for obs, gen in zip(sufficient_statistics(infant, gc), gc.generators):
            np.testing.assert_allclose(marginalize(fr.fitted, gen).counts, obs.counts,
                                       atol=1e-9 * infant.total)

    def test_saturated_returns_data(self, wam):
        fr = fit(wam, GeneratingClass.saturated(wam.names))
        np.testing.assert_allclose(fr.fitted.counts, wam.counts)
        assert fr.df == 0

    def test_rejects_non_decomposable(self, accident):
        with pytest.raises(NotDecomposableError):
            fit_decomposable(accident, parse_model("[AD][AI][DI]", accident.names))

    def test_zero_cells_allowed(self):
        arr = np.array([[[0, 3], [2, 5]], [[4, 0], [1, 6]]], dtype=float)
        t = table_from_array(arr)
        fr = fit_decomposable(t, parse_model("[12][13]", F3))
        np.testing.assert_allclose(fr.fitted.counts, oracle_ipf(arr, [(0, 1), (0, 2)], 50),
                                   atol=1e-9)

    def test_zero_separator_margin(self):
        arr = np.array([[[0, 0], [0, 0]], [[4, 2], [1, 6]]], dtype=float)
        fr = fit_decomposable(table_from_array(arr), parse_model("[12][13]", F3))
        assert np.all(fr.fitted.counts[0] == 0)

    @pytest.mark.parametrize("model", ["[1][2][3]", "[12][3]", "[12][13]", "[12][23]", "[123]"])
    def test_matches_oracle_ipf(self, model):
        rng = np.random.default_rng(5)
        t = random_table(rng, (2, 3, 4))
        gc = parse_model(model, F3)
        axes = [tuple(int(f) - 1 for f in g) for g in gc.generators]
        np.testing.assert_allclose(fit_decomposable(t, gc).fitted.counts,
                                   oracle_ipf(t.counts, axes, 20), rtol=1e-10)


class TestIpf:
    def test_accident_against_oracle(self, accident):
        fr = fit_ipf(accident, parse_model("[AD][AI][DI]", accident.names), tol=1e-10)
        assert fr.method == IPF
        assert fr.converged
        assert fr.max_margin_deviation <= 1e-10
        np.testing.assert_allclose(fr.fitted.counts,
                                   oracle_ipf(accident.counts, [(0, 1), (0, 2), (1, 2)]),
                                   rtol=1e-9)

    def test_non_convergence_flagged(self, accident):
        fr = fit_ipf(accident, parse_model("[AD][AI][DI]", accident.names), tol=1e-12, max_iter=2)
        assert not fr.converged
        assert fr.iterations == 2
        assert fr.max_margin_deviation > 1e-12

    def test_zero_margin_raises(self):
        arr = np.array([[[0, 0], [0, 0]], [[4, 2], [1, 6]]], dtype=float)
        with pytest.raises(FitError):
            fit_ipf(table_from_array(arr), parse_model("[12][13][23]", F3))

    @pytest.mark.parametrize("tol,max_iter", [(0, 10), (-1.0, 10), (1e-8, 0)])
    def test_argument_checks(self, accident, tol, max_iter):
        with pytest.raises(ValueError):
            fit_ipf(accident, parse_model("[AD][AI][DI]", accident.names), tol=tol, max_iter=max_iter)

    def test_four_way_no_closed_form(self):
        rng = np.random.default_rng(9)
        t = random_table(rng, (2, 2, 3, 2))
        gc = parse_model("[12][23][34][14]", "1234")
        fr = fit(t, gc, tol=1e-10)
        assert fr.method == IPF
        np.testing.assert_allclose(fr.fitted.counts,
                                   oracle_ipf(t.counts, [(0, 1), (1, 2), (2, 3), (0, 3)]),
                                   rtol=1e-7)
        assert birch_check(fr, t) <= 1e-10

    def test_total_preserved(self, accident):
        fr = fit_ipf(accident, parse_model("[AD][AI][DI]", accident.names))
        assert fr.fitted.total == pytest.approx(accident.total, abs=1e-6)


def test_deviance_decreases_along_nesting():
    rng = np.random.default_rng(21)
    t = random_table(rng, (3, 2, 2))
    chain = ["[1][2][3]", "[12][3]", "[12][13]", "[12][13][23]", "[123]"]
    g2 = [deviance_g2(t.counts, fit(t, parse_model(m, F3), tol=1e-11).fitted.counts)
          for m in chain]
    assert all(a >= b - 1e-8 for a, b in zip(g2, g2[1:]))
    assert g2[-1] == pytest.approx(0.0, abs=1e-9)


class TestRenderFactorization:
    def test_margin_style(self):
        assert render_factorization(parse_model("[123][134]", "1234")) == "n(123) * n(134) / n(13)"

    def test_dot_style_three_factors(self):
        gc = parse_model("[12][13]", F3)
        assert render_factorization(gc, "dot") == "n[ij.] * n[i.k] / n[i..]"

    def test_repeated_separator(self):
        gc = parse_model("[12][13][14]", "1234")
        assert render_factorization(gc, "dot") == "n[hi..] * n[h.j.] * n[h..k] / n[h...]^2"

    def test_saturated_has_no_denominator(self):
        assert render_factorization(GeneratingClass.saturated("1234")) == "n(1234)"

    def test_long_names(self, infant):
        gc = parse_model("[clinic,survival][clinic,care]", infant.names)
        assert render_factorization(gc) == "n(clinic,care) * n(clinic,survival) / n(clinic)"

    def test_bad_style(self):
        with pytest.raises(ValueError):
            render_factorization(parse_model("[12]", "12"), "latex")


def test_fit_requires_same_factors(personality):
    with pytest.raises(ValueError, match="same factors"):
        fit(personality, parse_model("[PC]", ["P", "C"]))


def test_table3_formulas_all_levels():
    models = {
        "[1][2][3]": lambda I, J, K: I * J * K - I - J - K + 2,
        "[12][3]": lambda I, J, K: (I * J - 1) * (K - 1),
        "[12][13][23]": lambda I, J, K: (I - 1) * (J - 1) * (K - 1),
    }
    for (I, J, K), (m, f) in itertools.product(itertools.product(range(2, 6), repeat=3), models.items()):
        assert degrees_of_freedom(parse_model(m, F3), {"1": I, "2": J, "3": K}) == f(I, J, K)
