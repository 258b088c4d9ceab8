"""Positive semidefinite completion over graph patterns and the conical distance.

The conical distance ``eps(G)`` is the smallest shift ``eps`` such that every
trace-one partial matrix whose clique blocks are PSD becomes PSD completable
after adding ``eps I``. The package computes it at single matrices through a
semidefinite program, evaluates its closed form on recognizable graph
families, and uses it to bound the error of clique-decomposed sparse SDPs.
"""

from .graph import Graph, chordal_girth, is_chordal, maximal_cliques
from .partial import PartialMatrix, is_partially_positive, project
from .completion import CompletionResult, cycle_epsilon, epsilon_at, is_psd_completable
from .recognition import is_in_class_G

__all__ = [
    "Graph", "chordal_girth", "is_chordal", "maximal_cliques",
    "PartialMatrix", "is_partially_positive", "project",
    "CompletionResult", "cycle_epsilon", "epsilon_at", "is_psd_completable",
    "is_in_class_G",
]
