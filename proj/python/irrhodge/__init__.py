"""Exact verification toolkit for twisted logarithmic de Rham complexes.

Thin wrappers over the compiled core: plans and reports cross the boundary as
JSON, so every report here is byte-identical to the command-line tool's output
for the same plan, seed, and truncation.
"""

import json as _json

try:
    from . import _core
except ImportError:  # build-tree layout: the extension sits directly on sys.path
    import _core

PlanError = _core.PlanError

__all__ = [
    "PlanError",
    "default_params",
    "random_filtered_complex",
    "render",
    "run_plan",
    "run_task",
    "task_kinds",
    "triple_equivalence",
]


def task_kinds():
    """Names of the supported task kinds."""
    return list(_core.task_kinds())


def default_params(kind):
    """Self-contained default parameters for a task kind."""
    return _json.loads(_core.default_params(kind))


def run_task(kind, params=None, *, seed=1, truncation=-1):
    """Run one task; returns (report dict, ok).

    ``params=None`` runs the kind's default parameters.  Schema errors raise
    :class:`PlanError`; a failed check is reported as ``ok == False``, not an
    exception.
    """
    if params is None:
        params = default_params(kind)
    report, ok = _core.run_task(kind, _json.dumps(params), seed, truncation)
    return _json.loads(report), ok


def run_plan(plan, *, seed=1, truncation=-1, jobs=1):
    """Run a plan ``{"tasks": [...]}``; returns (report dict, ok)."""
    report, ok = _core.run_plan(_json.dumps(plan), seed, truncation, jobs)
    return _json.loads(report), ok


def render(report, format="text"):
    """Render a report dict as ``json``, ``csv``, or ``text``."""
    return _core.render(_json.dumps(report), format)


def random_filtered_complex(seed, max_total_dim=12):
    """Seeded random filtered complex over Q, as a dict."""
    return _json.loads(_core.random_filtered_complex(seed, max_total_dim))


def triple_equivalence(complex_):
    """Evaluate the three degeneration criteria on a filtered-complex dict."""
    return _json.loads(_core.triple_equivalence(_json.dumps(complex_)))
