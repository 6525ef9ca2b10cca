"""PC-stable structure learning with Bayesian optimization of (alpha, test)."""

from ._pcbo import (
    Graph,
    ci_test,
    dag_to_cpdag,
    expert_criterion,
    normalized_shd,
    pc_stable,
    run_bo,
    run_random_search,
    shd,
    simulate,
    tests,
    __version__,
)

__all__ = [
    "Graph",
    "ci_test",
    "dag_to_cpdag",
    "expert_criterion",
    "normalized_shd",
    "pc_stable",
    "run_bo",
    "run_random_search",
    "shd",
    "simulate",
    "tests",
    "__version__",
]
