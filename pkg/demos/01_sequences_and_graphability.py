"""Sampling input sequences and testing them for graphability.

Walks through the first stage of the generator: draw community sizes and
node degrees from parametric families, split degrees into intra/inter parts,
repair sum parities, and ask whether the result can exist as a simple
clustered graph.
"""

import numpy as np

from temponet import (
    SamplerConfig,
    assignment_feasible,
    check_graphable,
    erdos_gallai,
    fix_parity,
    inter_graphable,
    sample_degrees,
    sample_sizes,
    split_degrees,
)

rng = np.random.default_rng(7)

# community sizes from a truncated power law, degrees from a uniform family
size_cfg = SamplerConfig("power_law", 10, 60, param=1.5)
degree_cfg = SamplerConfig("uniform", 3, 12, mix_ratio=0.7)

sizes = sample_sizes(size_cfg, 6, rng)
print("community sizes:", sizes.sizes, "->", sizes.node_count, "nodes")

total = sample_degrees(degree_cfg, sizes.node_count, rng)
print("degree range:", min(total), "..", max(total), " sum:", sum(total))

# 70% of each node's degree goes inside its community (stochastic rounding)
spec = split_degrees(total, 0.7, "fixed", "stochastic", rng)
spec = fix_parity(spec, rng, (3, 12))
print("intra sum:", sum(spec.intra), " inter sum:", sum(spec.inter), " (both even)")

report = check_graphable(sizes, spec)
print("pre-assignment gate:", "graphable" if report.ok else report.failing_condition)

# the pieces are available separately as well
print("\nsingle checks:")
print("  erdos_gallai([3,3,3,3])      ->", erdos_gallai([3, 3, 3, 3]))
print("  erdos_gallai([4,4,1,1,1,1])  ->", erdos_gallai([4, 4, 1, 1, 1, 1]))
print("  inter_graphable([3,2,1])     ->", inter_graphable([3, 2, 1]))
print("  inter_graphable([5,1,1])     ->", inter_graphable([5, 1, 1]))
print("  assignment_feasible([2,2], e=[3,1,1,1]) ->", assignment_feasible([2, 2], [3, 1, 1, 1]))

# an infeasible request: a node demanding more intra links than any community
# can host
bad = check_graphable(sizes, split_degrees((sizes.sizes[0] + 5,) * sizes.node_count, 1.0,
                                           "fixed", "nearest", rng))
print("\noversized intra degrees ->", bad.failing_condition, "-", bad.detail)
