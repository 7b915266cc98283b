"""Snapshot and boundary metrics reported with every run."""

from __future__ import annotations

import math

import numpy as np

from .assembler import Snapshot
from .errors import ConfigurationError


def assortativity_details(snapshot: Snapshot) -> tuple[float, bool]:
    """Newman degree assortativity and a flag for the degenerate (zero variance) case."""
    if not snapshot.links:
        raise ConfigurationError("assortativity needs at least one link")
    deg = {nid: node.degree for nid, node in snapshot.nodes.items()}
    x = np.empty(2 * len(snapshot.links), dtype=np.float64)
    y = np.empty_like(x)
    for idx, (u, v) in enumerate(sorted(snapshot.links)):
        x[2 * idx], y[2 * idx] = deg[u], deg[v]
        x[2 * idx + 1], y[2 * idx + 1] = deg[v], deg[u]
    mean = x.mean()
    var = ((x - mean) ** 2).mean()
    if var <= 1e-12:
        return 0.0, True
    cov = ((x - mean) * (y - mean)).mean()
    return float(cov / var), False


def assortativity_coefficient(snapshot: Snapshot) -> float:
    """Pearson correlation of degrees at link endpoints (0 when degenerate)."""
    value, _ = assortativity_details(snapshot)
    return value


def temporal_degree_correlation_details(
    snap_t: Snapshot, snap_t1: Snapshot
) -> tuple[float, bool]:
    """Pearson correlation of degrees over nodes alive in both snapshots, plus flag."""
    common = sorted(set(snap_t.nodes) & set(snap_t1.nodes))
    if len(common) < 2:
        return 0.0, True
    a = np.array([snap_t.nodes[nid].degree for nid in common], dtype=np.float64)
    b = np.array([snap_t1.nodes[nid].degree for nid in common], dtype=np.float64)
    va = ((a - a.mean()) ** 2).sum()
    vb = ((b - b.mean()) ** 2).sum()
    if va <= 1e-12 or vb <= 1e-12:
        return 0.0, True
    cov = ((a - a.mean()) * (b - b.mean())).sum()
    return float(cov / math.sqrt(va * vb)), False


def temporal_degree_correlation(snap_t: Snapshot, snap_t1: Snapshot) -> float:
    value, _ = temporal_degree_correlation_details(snap_t, snap_t1)
    return value


def modularity(snapshot: Snapshot) -> float:
    """Newman-Girvan modularity of the ground-truth clustering (resolution 1)."""
    m = len(snapshot.links)
    if m < 1:
        raise ConfigurationError("modularity needs at least one link")
    comm = {nid: node.community for nid, node in snapshot.nodes.items()}
    intra = [0] * snapshot.community_count
    deg_sum = [0] * snapshot.community_count
    for u, v in snapshot.links:
        if comm[u] == comm[v]:
            intra[comm[u]] += 1
        deg_sum[comm[u]] += 1
        deg_sum[comm[v]] += 1
    q = 0.0
    for c in range(snapshot.community_count):
        q += intra[c] / m - (deg_sum[c] / (2.0 * m)) ** 2
    return q
