import itertools

import numpy as np
import pytest

from conftest import graph
from gllm.graph import UndirectedGraph
from gllm.markov import (CIStatement, CliquePotentialSet, JointDistribution, MarkovError,
                         check_markov_properties, ci_holds, distribution_from_potentials,
                         global_statements, implied_independences, local_statements,
                         pairwise_statements, random_potentials)
from gllm.model import GeneratingClass, parse_model
from gllm.table import FactorSpec


def binary(names):
    return [FactorSpec(n, (0, 1)) for n in names]


def correlated_pair():
    return JointDistribution(binary("xy"), [[0.5, 0.0], [0.0, 0.5]])


def random_graph(rng, n):
    vs = [str(i + 1) for i in range(n)]
    edges = [p for p in itertools.combinations(vs, 2) if rng.random() < 0.5]
    return UndirectedGraph(vs, edges)


class TestJointDistribution:
    def test_must_sum_to_one(self):
        with pytest.raises(MarkovError):
            JointDistribution(binary("xy"), [[0.5, 0.5], [0.5, 0.5]])

    def test_nonnegative(self):
        with pytest.raises(MarkovError):
            JointDistribution(binary("x"), [1.5, -0.5])

    def test_margin_keepdims(self):
        d = JointDistribution.from_weights(binary("xyz"), np.arange(1, 9))
        m = d.margin({"y"})
        assert m.shape == (1, 2, 1)
        assert m.sum() == pytest.approx(1.0)


class TestCiHolds:
    def test_uniform(self):
        d = JointDistribution.uniform(binary("abcd"))
        assert ci_holds(d, {"a"}, {"b", "c"}, {"d"})
        assert ci_holds(d, {"a"}, {"b"})

    def test_correlated(self):
        assert not ci_holds(correlated_pair(), {"x"}, {"y"})

    def test_conditional_independence_construction(self):
        # P(1,2,3) = P(3) P(1|3) P(2|3)
        rng = np.random.default_rng(1)
        g = graph("13 23")
        d = distribution_from_potentials(random_potentials(g, binary("123"), rng), binary("123"))
        assert ci_holds(d, {"1"}, {"2"}, {"3"})
        assert not ci_holds(d, {"1"}, {"2"})

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            d = JointDistribution.from_weights(binary("abc"), rng.random(8))
            assert ci_holds(d, {"a"}, {"b"}, {"c"}) == ci_holds(d, {"b"}, {"a"}, {"c"})

    def test_overlap(self):
        with pytest.raises(MarkovError):
            ci_holds(correlated_pair(), {"x"}, {"x"})

    def test_zero_probability_slices_ignored(self):
        p = np.zeros((2, 2, 2))
        p[0] = 0.25  # only the c=0 slice has mass; it is uniform
        d = JointDistribution(binary("abc"), np.transpose(p, (1, 2, 0)))
        assert ci_holds(d, {"a"}, {"b"}, {"c"})


class TestStatements:
    def test_pairwise_two_triangles(self):
        st = pairwise_statements(graph("12 13 14 23 34"))
        assert st == [({"2"}, {"4"}, {"1", "3"})]

    def test_local_complete_graph_empty(self):
        assert local_statements(graph("12 13 23")) == []

    def test_global_path(self):
        st = global_statements(graph("12 23"))
        assert ({"1"}, {"3"}, {"2"}) in st
        assert not any(c == set() and a == {"1"} and b == {"3"} for a, b, c in st)

    def test_global_limit(self):
        g = UndirectedGraph([str(i) for i in range(6)], [])
        with pytest.raises(MarkovError):
            global_statements(g)


class TestMarkovProperties:
    def test_potentials_satisfy_all(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            g = random_graph(rng, n)
            f = binary(g.vertices)
            d = distribution_from_potentials(random_potentials(g, f, rng), f)
            assert check_markov_properties(d, g).as_dict() == {
                "pairwise": True, "local": True, "global": True}

    def test_correlated_pair_on_edgeless_graph(self):
        r = check_markov_properties(correlated_pair(), UndirectedGraph(["x", "y"], []))
        assert r.as_dict() == {"pairwise": False, "local": False, "global": False}

    def test_chain_on_arbitrary_distributions(self):
        # global => local => pairwise, including distributions with no graph structure
        rng = np.random.default_rng(6)
        for _ in range(40):
            n = int(rng.integers(2, 5))
            g = random_graph(rng, n)
            f = binary(g.vertices)
            if rng.random() < 0.5:
                d = JointDistribution.from_weights(f, rng.random((2,) * n))
            else:
                other = random_graph(rng, n)
                d = distribution_from_potentials(random_potentials(other, f, rng), f)
            r = check_markov_properties(d, g)
            assert (not r.global_) or r.local
            assert (not r.local) or r.pairwise

    def test_vertex_mismatch(self):
        with pytest.raises(MarkovError):
            check_markov_properties(correlated_pair(), graph("12"))


class TestPotentials:
    def test_requires_maximal_cliques(self):
        g = graph("12 23")
        with pytest.raises(MarkovError):
            CliquePotentialSet(g, {frozenset("12"): np.ones((2, 2))})

    def test_requires_positive(self):
        g = graph("12")
        with pytest.raises(MarkovError):
            CliquePotentialSet(g, {frozenset("12"): np.array([[1.0, 0.0], [1.0, 1.0]])})

    def test_product_by_hand(self):
        g = graph("12 23")
        psi12 = np.array([[1.0, 2.0], [3.0, 4.0]])
        psi23 = np.array([[5.0, 1.0], [2.0, 7.0]])
        ps = CliquePotentialSet(g, {frozenset("12"): psi12, frozenset("23"): psi23})
        d = distribution_from_potentials(ps, binary("123"))
        want = np.einsum("ij,jk->ijk", psi12, psi23)
        np.testing.assert_allclose(d.probs, want / want.sum())

    def test_factor_order_differs_from_graph(self):
        g = graph("12 23")
        psi12 = np.array([[1.0, 2.0], [3.0, 4.0]])
        psi23 = np.array([[5.0, 1.0], [2.0, 7.0]])
        ps = CliquePotentialSet(g, {frozenset("12"): psi12, frozenset("23"): psi23})
        d = distribution_from_potentials(ps, binary("321"))
        want = np.einsum("ij,jk->kji", psi12, psi23)
        np.testing.assert_allclose(d.probs, want / want.sum())


class TestImpliedIndependences:
    def test_two_triangles(self):
        gc = parse_model("[123][134]", "1234")
        rendered = [s.render("1234") for s in implied_independences(gc)]
        assert "{2} ⊥ {4} | {1,3}" in rendered

    def test_saturated(self):
        assert implied_independences(GeneratingClass.saturated("123")) == []

    def test_conditional_independence(self):
        st = implied_independences(parse_model("[13][23]", "123"))
        assert [s.render("123") for s in st] == ["{1} ⊥ {2} | {3}"]

    def test_not_graphical(self):
        with pytest.raises(MarkovError):
            implied_independences(parse_model("[12][13][23]", "123"))

    def test_statements_hold_for_factorizing_distribution(self):
        rng = np.random.default_rng(8)
        gc = parse_model("[12][23][34]", "1234")
        g = graph("12 23 34")
        f = binary("1234")
        d = distribution_from_potentials(random_potentials(g, f, rng), f)
        for s in implied_independences(gc):
            assert isinstance(s, CIStatement)
            assert ci_holds(d, s.a, s.b, s.c)
