"""Configuration-aware change exposure analysis for CMake projects."""

import json

from . import _cmexpose
from ._cmexpose import Error, Graph, __version__

__all__ = [
    "Error",
    "Graph",
    "__version__",
    "analyze",
    "diff_files",
    "filter_by_deliverable",
    "filter_by_variant",
    "impact",
    "parse_diff",
    "paths",
    "propagation_condition",
    "rank",
    "score_list",
    "score_ranking",
]


def analyze(root):
    """Returns (graph, warnings) for the project rooted at `root`."""
    graph, warnings = _cmexpose.analyze(str(root))
    return graph, json.loads(warnings)


def impact(graph, files, values=None, total=True, id="change"):
    return json.loads(_cmexpose.impact_json(graph, list(files), dict(values or {}), total, id))


def propagation_condition(graph, files, deliverable):
    return _cmexpose.propagation_condition(graph, list(files), deliverable)


def paths(graph, files, cap=100):
    return json.loads(_cmexpose.paths_json(graph, list(files), cap))


def _patches(patches):
    return [(pid, list(files)) for pid, files in dict(patches).items()]


def rank(graph, patches, by, values=None, total=True):
    """`patches` maps patch ids to changed files; `by` is "deliverables" or "variants"."""
    if by not in ("deliverables", "variants"):
        raise ValueError("by must be 'deliverables' or 'variants'")
    return json.loads(
        _cmexpose.rank_json(graph, _patches(patches), by, dict(values or {}), total)
    )


def filter_by_deliverable(graph, patches, deliverable):
    return _cmexpose.filter_by_deliverable(graph, _patches(patches), deliverable)


def filter_by_variant(graph, patches, values):
    return _cmexpose.filter_by_variant(graph, _patches(patches), dict(values))


def parse_diff(text, strip=None):
    return [
        {"old_path": old, "new_path": new, "status": status}
        for old, new, status in _cmexpose.parse_diff(text, strip)
    ]


def diff_files(text, strip=None):
    return _cmexpose.diff_files(text, strip)


def score_list(eid, aid):
    return json.loads(_cmexpose.score_list_json(list(eid), list(aid)))


def score_ranking(estimate, truth):
    return json.loads(_cmexpose.score_ranking_json(list(estimate), list(truth)))
