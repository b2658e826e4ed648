"""Byzantine run systems, composable extensions and epistemic checks.

Thin wrappers over the native module; json payloads come back as dicts.
"""

import json

from byzrun._byzrun import (
    canonical_hap,
    cli,
    composability,
    impl_classes,
)
from byzrun import _byzrun as _native

__all__ = [
    "brainvat",
    "canonical_hap",
    "cli",
    "composability",
    "composability_table",
    "enumerate_system",
    "eval_formula",
    "impl_classes",
    "run_checks",
]


def composability_table():
    return json.loads(_native.composability_table())


def run_checks(scenario, **kwargs):
    return json.loads(_native.run_checks(scenario, **kwargs))


def enumerate_system(scenario, **kwargs):
    return json.loads(_native.enumerate_system(scenario, **kwargs))


def brainvat(scenario, **kwargs):
    return json.loads(_native.brainvat(scenario, **kwargs))


def eval_formula(scenario, formula, expect="all_points"):
    return json.loads(_native.eval_formula(scenario, formula, expect))
