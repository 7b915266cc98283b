"""Snapshot assembly: degree/community placement and the modified configuration model.

Wiring pairs degree stubs one node at a time.  Partner stubs are drawn
i.i.d. by sampling a position, through a Beta(alpha, beta) variate, in the
list of open stubs sorted by owner total degree: alpha >> beta biases links
toward high-degree partners (assortative), the uniform case alpha = beta = 1
reproduces plain configuration-model pairing conditioned on simplicity.
Self-loops and duplicate links are excluded by construction; dead ends are
repaired by breaking an existing link of an otherwise-eligible node, within
a configurable budget.
"""

from __future__ import annotations

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GraphabilityError, WiringError
from .graphability import check_graphable
from .sequences import CommunitySpec, DegreeSpec

log = logging.getLogger(__name__)

DEFAULT_REPAIR_BUDGET_FACTOR = 50


@dataclass
class ShapeParams:
    """Beta-distribution shape parameters steering a position draw."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        self.alpha = float(self.alpha)
        self.beta = float(self.beta)
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigurationError("beta shape parameters must be positive")

    @property
    def is_uniform(self) -> bool:
        return self.alpha == 1.0 and self.beta == 1.0


@dataclass
class Node:
    """One node of a snapshot; ids stay stable across timesteps."""

    id: int
    degree: int
    intra_degree: int
    community: int
    born_at: int = 0
    died_at: int | None = None

    @property
    def inter_degree(self) -> int:
        return self.degree - self.intra_degree


@dataclass
class Snapshot:
    """A realized simple graph with its ground-truth clustering."""

    t: int
    nodes: dict[int, Node]
    links: set[tuple[int, int]]  # (u, v) with u < v
    clustering: list[set[int]]
    community_labels: list[int] = field(default_factory=list)
    wiring_repairs: int = 0
    disconnected_communities: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.community_labels:
            self.community_labels = list(range(len(self.clustering)))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def link_count(self) -> int:
        return len(self.links)

    @property
    def community_count(self) -> int:
        return len(self.clustering)

    def degrees(self) -> dict[int, int]:
        d = dict.fromkeys(self.nodes, 0)
        for u, v in self.links:
            d[u] += 1
            d[v] += 1
        return d

    def intra_degrees(self) -> dict[int, int]:
        comm = {nid: node.community for nid, node in self.nodes.items()}
        d = dict.fromkeys(self.nodes, 0)
        for u, v in self.links:
            if comm[u] == comm[v]:
                d[u] += 1
                d[v] += 1
        return d

    def validate(self) -> None:
        """Hard postconditions: simplicity, partition validity, exact degrees."""
        seen = set()
        for u, v in self.links:
            if u == v:
                raise AssertionError(f"self-loop at node {u}")
            if u not in self.nodes or v not in self.nodes:
                raise AssertionError(f"link ({u}, {v}) references unknown nodes")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise AssertionError(f"duplicate link {key}")
            seen.add(key)
        covered = set()
        for c, group in enumerate(self.clustering):
            if covered & group:
                raise AssertionError(f"community {c} overlaps another community")
            covered |= group
        if covered != set(self.nodes):
            raise AssertionError("clustering does not cover the node set")
        for nid, node in self.nodes.items():
            if nid not in self.clustering[node.community]:
                raise AssertionError(f"node {nid} missing from its community")
        realized = self.degrees()
        realized_intra = self.intra_degrees()
        for nid, node in self.nodes.items():
            if realized[nid] != node.degree:
                raise AssertionError(
                    f"node {nid}: realized degree {realized[nid]} != spec {node.degree}"
                )
            if realized_intra[nid] != node.intra_degree:
                raise AssertionError(
                    f"node {nid}: realized intra degree {realized_intra[nid]}"
                    f" != spec {node.intra_degree}"
                )


# ---------------------------------------------------------------------------
# node assignment
# ---------------------------------------------------------------------------


def assign_nodes(
    sizes: CommunitySpec,
    spec: DegreeSpec,
    rng: np.random.Generator,
    surviving: dict[int, int] | None = None,
    temporal_shape: ShapeParams | None = None,
    prev_degrees: dict[int, int] | None = None,
    start_id: int = 0,
    retries: int = 20,
) -> dict[int, tuple[int, int, int]]:
    """Assign communities and degree tuples to nodes; returns id -> (community, d, e).

    Bootstrap mode (``surviving`` is None): fresh ids ``start_id + slot`` take
    the slot's degree tuple and are placed into a random community drawn with
    probability proportional to remaining capacity, never where ``e`` reaches
    the community size.

    Temporal mode: every id in ``surviving`` keeps its flow-dictated
    community; nodes with a previous degree draw their new tuple by sampling
    a Beta(``temporal_shape``) position in the remaining degree-ordered tuple
    list (restricted to tuples that fit the community), largest previous
    degrees drawing first.  Ids without history (newborns) draw uniformly.
    """
    k = len(sizes)
    n = len(spec)
    if surviving is None:
        order = sorted(range(n), key=lambda i: (-spec.intra[i], -spec.total[i], i))
        for _ in range(max(1, retries)):
            caps = np.array(sizes.sizes, dtype=np.int64)
            out: dict[int, tuple[int, int, int]] = {}
            ok = True
            for slot in order:
                e = spec.intra[slot]
                eligible = np.flatnonzero((caps > 0) & (np.array(sizes.sizes) - 1 >= e))
                if eligible.size == 0:
                    ok = False
                    break
                weights = caps[eligible].astype(np.float64)
                c = int(rng.choice(eligible, p=weights / weights.sum()))
                caps[c] -= 1
                out[start_id + slot] = (c, spec.total[slot], spec.intra[slot])
            if ok:
                return out
        raise GraphabilityError("node assignment ran out of community capacity")

    if len(surviving) != n:
        raise ConfigurationError(
            f"{len(surviving)} surviving memberships for {n} degree slots"
        )
    shape = temporal_shape or ShapeParams()
    prev_degrees = prev_degrees or {}
    survivors = sorted(
        (nid for nid in surviving if nid in prev_degrees),
        key=lambda nid: (-prev_degrees[nid], nid),
    )
    newborns = sorted(nid for nid in surviving if nid not in prev_degrees)
    tuples = sorted(zip(spec.total, spec.intra), key=lambda de: (de[0], de[1]))
    d_arr = np.array([d for d, _ in tuples], dtype=np.int64)
    e_arr = np.array([e for _, e in tuples], dtype=np.int64)
    for _ in range(max(1, retries)):
        alive = np.ones(n, dtype=bool)
        out = {}
        ok = True
        for nid in survivors + newborns:
            cap = sizes.sizes[surviving[nid]] - 1
            eligible = np.flatnonzero(alive & (e_arr <= cap))
            if eligible.size == 0:
                ok = False
                break
            if nid in prev_degrees:
                pos = float(rng.beta(shape.alpha, shape.beta))
                idx = min(int(pos * eligible.size), eligible.size - 1)
            else:
                idx = int(rng.integers(eligible.size))
            pick = int(eligible[idx])
            alive[pick] = False
            out[nid] = (surviving[nid], int(d_arr[pick]), int(e_arr[pick]))
        if ok:
            return out
    raise GraphabilityError(
        "degree tuples could not be matched to the flow-dictated communities"
    )


def repair_intra_parity(
    assignment: dict[int, tuple[int, int, int]],
    sizes: CommunitySpec,
) -> dict[int, tuple[int, int, int]]:
    """Make every community's intra degree sum even by swapping degree tuples.

    Swaps exchange the (d, e) tuples of two nodes in different odd-parity
    communities with different intra parity, preferring pairs with equal
    total degree (which also preserves per-community degree sums).  For
    deterministic splits the intra degree is a function of the total degree,
    so equal-degree pairs cannot differ in parity and the unequal-degree
    fallback is required.  Community sizes and the global tuple multiset stay
    intact either way; raises ``GraphabilityError`` when no swap sequence
    exists.
    """
    out = dict(assignment)
    parity = defaultdict(int)
    for c, d, e in out.values():
        parity[c] ^= e & 1
    odd = sorted(c for c in range(len(sizes)) if parity[c])
    if not odd:
        return out
    if len(odd) % 2 == 1:
        raise GraphabilityError("odd number of odd-parity communities; global parity broken")

    by_comm: dict[int, list[int]] = defaultdict(list)
    for nid, (c, _, _) in out.items():
        by_comm[c].append(nid)

    def find_swap(c1: int, c2: int):
        s1, s2 = sizes.sizes[c1], sizes.sizes[c2]
        by_degree: dict[int, list[int]] = defaultdict(list)
        for nid in by_comm[c1]:
            by_degree[out[nid][1]].append(nid)
        fallback = None
        for nid2 in sorted(by_comm[c2]):
            _, d2, e2 = out[nid2]
            for nid1 in by_degree.get(d2, ()):
                e1 = out[nid1][2]
                if (e1 ^ e2) & 1 and e1 <= s2 - 1 and e2 <= s1 - 1:
                    return nid1, nid2
        for nid2 in sorted(by_comm[c2]):
            _, _, e2 = out[nid2]
            for nid1 in sorted(by_comm[c1]):
                e1 = out[nid1][2]
                if (e1 ^ e2) & 1 and e1 <= s2 - 1 and e2 <= s1 - 1:
                    fallback = (nid1, nid2)
                    break
            if fallback:
                break
        return fallback

    while odd:
        c1 = odd.pop(0)
        for pos, c2 in enumerate(odd):
            pair = find_swap(c1, c2)
            if pair:
                nid1, nid2 = pair
                _, d1, e1 = out[nid1]
                _, d2, e2 = out[nid2]
                out[nid1] = (c1, d2, e2)
                out[nid2] = (c2, d1, e1)
                by_comm[c1].remove(nid1)
                by_comm[c1].append(nid2)
                by_comm[c2].remove(nid2)
                by_comm[c2].append(nid1)
                odd.pop(pos)
                break
        else:
            raise GraphabilityError(
                f"community {c1}: no parity-fixing tuple swap with any other odd community"
            )
    return out


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


class _StubPool:
    """Open stubs of one wiring phase, indexable by degree-ordered position."""

    def __init__(self, entries):
        # entries: iterable of (node_id, total_degree, stubs)
        entries = sorted(entries, key=lambda t: (t[1], t[0]))
        self.ids = [nid for nid, _, _ in entries]
        self.pos = {nid: p for p, nid in enumerate(self.ids)}
        self.rem = np.array([s for _, _, s in entries], dtype=np.int64)

    def draw(self, rng, shape: ShapeParams, banned_positions) -> int | None:
        """Pick an open stub's owner by Beta position among eligible stubs."""
        weights = self.rem.copy()
        if banned_positions:
            weights[banned_positions] = 0
        cum = np.cumsum(weights)
        total = int(cum[-1]) if cum.size else 0
        if total <= 0:
            return None
        rank = min(int(rng.beta(shape.alpha, shape.beta) * total), total - 1)
        p = int(np.searchsorted(cum, rank, side="right"))
        return self.ids[p]


def _wire_phase(
    entries,
    shape: ShapeParams,
    rng: np.random.Generator,
    budget: int,
    community_of: dict[int, int] | None = None,
) -> tuple[set[tuple[int, int]], int]:
    """Pair all stubs into simple links; returns (links, repairs used).

    ``community_of`` switches inter mode: partners must then live in a
    different community.  Raises ``WiringError`` when the repair budget is
    exhausted.
    """
    pool = _StubPool(entries)
    total_open = int(pool.rem.sum())
    if total_open % 2 == 1:
        raise WiringError("odd number of stubs in a wiring phase")
    adjacency: dict[int, set[int]] = defaultdict(set)
    links: set[tuple[int, int]] = set()
    repairs = 0
    if community_of is not None:
        comm_positions: dict[int, list[int]] = defaultdict(list)
        for nid in pool.ids:
            comm_positions[community_of[nid]].append(pool.pos[nid])
        comm_positions = {c: np.array(ps) for c, ps in comm_positions.items()}

    heap = [(-d, nid) for nid, d, s in entries if s > 0]
    heapq.heapify(heap)
    degree_of = {nid: d for nid, d, _ in entries}

    def banned_for(u: int) -> list[int]:
        banned = [pool.pos[u]]
        banned.extend(pool.pos[v] for v in adjacency[u])
        if community_of is not None:
            banned.extend(int(p) for p in comm_positions[community_of[u]])
        return banned

    def add_link(a: int, b: int) -> None:
        links.add((a, b) if a < b else (b, a))
        adjacency[a].add(b)
        adjacency[b].add(a)
        pool.rem[pool.pos[a]] -= 1
        pool.rem[pool.pos[b]] -= 1

    def repair(u: int) -> None:
        nonlocal repairs
        # candidates: eligible partners with all stubs taken but >= 1 link to break
        mask = pool.rem == 0
        cands = []
        for p in np.flatnonzero(mask):
            w = pool.ids[int(p)]
            if w == u or w in adjacency[u] or not adjacency[w]:
                continue
            if community_of is not None and community_of[w] == community_of[u]:
                continue
            cands.append(w)
        if not cands:
            raise WiringError(
                f"node {u}: no candidate links to rewire ({int(pool.rem[pool.pos[u]])} stubs left)"
            )
        w = cands[int(rng.integers(len(cands)))]
        neighbors = sorted(adjacency[w])
        v = neighbors[int(rng.integers(len(neighbors)))]
        key = (w, v) if w < v else (v, w)
        links.discard(key)
        adjacency[w].discard(v)
        adjacency[v].discard(w)
        pool.rem[pool.pos[w]] += 1
        pool.rem[pool.pos[v]] += 1
        add_link(u, w)
        heapq.heappush(heap, (-degree_of[v], v))
        repairs += 1
        if repairs > budget:
            raise WiringError(f"wiring repair budget ({budget}) exhausted")

    while heap:
        _, u = heapq.heappop(heap)
        while pool.rem[pool.pos[u]] > 0:
            v = pool.draw(rng, shape, banned_for(u))
            if v is None:
                repair(u)
            else:
                add_link(u, v)
    if int(pool.rem.sum()) != 0:
        raise WiringError("stubs left unpaired after the wiring loop")
    return links, repairs


def wire_intra(
    members,
    pairing_shape: ShapeParams,
    rng: np.random.Generator,
    budget: int | None = None,
) -> tuple[set[tuple[int, int]], int]:
    """Wire one community's intra links; ``members`` is (id, total d, intra e) triples.

    Every member's realized intra degree equals its ``e`` exactly; the intra
    sequence must pass the Erdos-Gallai test beforehand.
    """
    members = list(members)
    if budget is None:
        budget = DEFAULT_REPAIR_BUDGET_FACTOR * max(1, len(members))
    entries = [(nid, d, e) for nid, d, e in members]
    return _wire_phase(entries, pairing_shape, rng, budget)


def wire_inter(
    nodes,
    pairing_shape: ShapeParams,
    rng: np.random.Generator,
    budget: int | None = None,
) -> tuple[set[tuple[int, int]], int]:
    """Wire all inter-community links; ``nodes`` is (id, total d, inter f, community).

    Partners always live in different communities, so no inter link can
    duplicate an intra link.
    """
    nodes = list(nodes)
    if budget is None:
        budget = DEFAULT_REPAIR_BUDGET_FACTOR * max(1, len(nodes))
    entries = [(nid, d, f) for nid, d, f, _ in nodes]
    community_of = {nid: c for nid, _, _, c in nodes}
    return _wire_phase(entries, pairing_shape, rng, budget, community_of=community_of)


def check_connectivity(member_ids, links) -> int:
    """Number of connected components of a community subgraph (union-find)."""
    parent = {nid: nid for nid in member_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in links:
        if u in parent and v in parent:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    return len({find(x) for x in parent})


def degree_joint_distribution_baseline(degrees) -> np.ndarray:
    """Plain configuration-model pairing probabilities ``k_i k_j / (S - 1)``.

    Test-suite baseline for the uniform-pairing regime before the
    no-self-loop/no-multi-edge exclusions distort it at small stub counts.
    """
    d = np.asarray(list(degrees), dtype=np.float64)
    s = d.sum()
    if s < 2:
        raise ConfigurationError("need at least two stubs")
    p = np.outer(d, d) / (s - 1.0)
    np.fill_diagonal(p, 0.0)
    return p


# ---------------------------------------------------------------------------
# snapshot orchestration
# ---------------------------------------------------------------------------


def assemble_snapshot(
    t: int,
    sizes: CommunitySpec,
    spec: DegreeSpec,
    rng: np.random.Generator,
    pairing_shape: ShapeParams | None = None,
    temporal_shape: ShapeParams | None = None,
    surviving: dict[int, int] | None = None,
    prev_degrees: dict[int, int] | None = None,
    born_at: dict[int, int] | None = None,
    start_id: int = 0,
    repair_budget_factor: int = DEFAULT_REPAIR_BUDGET_FACTOR,
    assignment_retries: int = 10,
) -> Snapshot:
    """Build one snapshot: assign, repair parity, gate, wire, and validate.

    The full post-assignment graphability check runs before any wiring; a
    failing assignment is retried with fresh randomness up to
    ``assignment_retries`` times before raising ``GraphabilityError``.
    """
    pairing_shape = pairing_shape or ShapeParams()
    last_error: Exception | None = None
    for _ in range(max(1, assignment_retries)):
        try:
            assignment = assign_nodes(
                sizes,
                spec,
                rng,
                surviving=surviving,
                temporal_shape=temporal_shape,
                prev_degrees=prev_degrees,
                start_id=start_id,
            )
            assignment = repair_intra_parity(assignment, sizes)
        except GraphabilityError as exc:
            last_error = exc
            continue
        ids = sorted(assignment)
        membership = [assignment[nid][0] for nid in ids]
        aligned = DegreeSpec(
            tuple(assignment[nid][1] for nid in ids),
            tuple(assignment[nid][2] for nid in ids),
        )
        report = check_graphable(sizes, aligned, membership)
        if report.ok:
            break
        last_error = GraphabilityError(
            f"timestep {t}: {report.failing_condition.value}: {report.detail}"
        )
    else:
        raise last_error or GraphabilityError(f"timestep {t}: assignment failed")

    born_at = born_at or {}
    nodes = {
        nid: Node(
            id=nid,
            degree=assignment[nid][1],
            intra_degree=assignment[nid][2],
            community=assignment[nid][0],
            born_at=born_at.get(nid, t),
        )
        for nid in ids
    }
    clustering: list[set[int]] = [set() for _ in range(len(sizes))]
    for nid, node in nodes.items():
        clustering[node.community].add(nid)

    links: set[tuple[int, int]] = set()
    repairs = 0
    disconnected = []
    for c, group in enumerate(clustering):
        members = [(nid, nodes[nid].degree, nodes[nid].intra_degree) for nid in sorted(group)]
        budget = repair_budget_factor * max(1, len(members))
        community_links, used = wire_intra(members, pairing_shape, rng, budget)
        links |= community_links
        repairs += used
        if check_connectivity(group, community_links) > 1:
            disconnected.append(c)
    if disconnected:
        log.warning(
            "timestep %d: communities %s wired with multiple components", t, disconnected
        )

    inter_entries = [
        (nid, nodes[nid].degree, nodes[nid].inter_degree, nodes[nid].community)
        for nid in ids
    ]
    inter_links, used = wire_inter(
        inter_entries, pairing_shape, rng, repair_budget_factor * max(1, len(ids))
    )
    links |= inter_links
    repairs += used

    snap = Snapshot(
        t=t,
        nodes=nodes,
        links=links,
        clustering=clustering,
        wiring_repairs=repairs,
        disconnected_communities=disconnected,
    )
    snap.validate()
    return snap
