"""Hierarchical, graphical and decomposable log-linear models for contingency tables."""
from gllm.fit import (CliqueTree, FitError, FitResult, birch_check, clique_tree,
                      degrees_of_freedom, fit, fit_decomposable, fit_ipf,
                      render_factorization, sufficient_statistics)
from gllm.graph import (UndirectedGraph, boundary, is_chordal, isomorphic,
                        maximal_cliques, separates, triangulate)
from gllm.kernels import BACKEND
from gllm.model import (GeneratingClass, ModelError, TermSet, hierarchical_closure,
                        interaction_graph, is_comprehensive, is_decomposable,
                        is_graphical, model_from_graph, parse_model)
from gllm.stats import TestReport, chi2_sf, deviance_g2, goodness_of_fit, pearson_chi2
from gllm.table import (ContingencyTable, FactorSpec, TableError, from_records,
                        marginalize, read_csv, write_csv)

__version__ = "0.1.0"
