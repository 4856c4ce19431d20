"""Constraint-based clustering and evaluation of SaaS candidates."""

import json

from ._core import (
    AssignmentDeadlock,
    CapacityError,
    ConstraintSpec,
    Dataset,
    DomainError,
    ParseError,
    brute_force_feasible_exists,
    brute_force_min_sse,
    load_dataset,
    parse_constraint_spec,
    parse_dataset,
)
from . import _core

__all__ = [
    "AssignmentDeadlock",
    "CapacityError",
    "ConstraintSpec",
    "Dataset",
    "DomainError",
    "ParseError",
    "brute_force_feasible_exists",
    "brute_force_min_sse",
    "detect_deadlock",
    "evaluate",
    "fit_kmeans",
    "load_constraint_spec",
    "load_dataset",
    "parse_constraint_spec",
    "parse_dataset",
]


def load_constraint_spec(path):
    with open(path, encoding="utf-8") as f:
        return parse_constraint_spec(f.read())


def fit_kmeans(dataset, k, seed=0, restarts=1, max_iterations=100):
    """Seeded k-means++ and Lloyd; returns the clustering as a dict."""
    return json.loads(_core.fit_kmeans_json(dataset, k, seed, restarts, max_iterations))


def detect_deadlock(spec, dataset, k):
    """Bind-time deadlock report as a dict."""
    return json.loads(_core.detect_deadlock_json(spec, dataset, k))


def evaluate(dataset, spec, k=None, seed=42, restarts=10, weights=None, timestamp=""):
    """Full pipeline plus ranking; returns the evaluation report as a dict."""
    return json.loads(_core.evaluate_json(dataset, spec, k, seed, restarts, weights, timestamp))
