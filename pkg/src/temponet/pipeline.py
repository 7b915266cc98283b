"""End-to-end temporal network generation.

Per boundary the pipeline: acquires and gates the next timestep's sequences,
applies the kill set, balances populations with birth/death adjustment
communities, searches the flow polytope for the minimum-VI node flow (kept
flows pinned to the user kills), materializes the flow into concrete node
moves, re-assigns degree tuples with the temporal-correlation draw, wires the
new snapshot and reports metrics plus lifecycle events.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .assembler import (
    DEFAULT_REPAIR_BUDGET_FACTOR,
    ShapeParams,
    Snapshot,
    assemble_snapshot,
)
from .errors import ConfigurationError, GraphabilityError
from .graphability import check_graphable
from .lifecycle import LifecycleThresholds, classify_events, jaccard
from .metrics import (
    assortativity_details,
    modularity,
    temporal_degree_correlation_details,
)
from .output import (
    BoundaryReport,
    RunReport,
    SnapshotMetrics,
    export_temporal_csv,
    write_report,
)
from .sequences import (
    CommunitySpec,
    DegreeSpec,
    SamplerConfig,
    fix_parity,
    load_sequences,
    sample_degrees,
    sample_sizes,
    split_degrees,
)
from .transition import (
    SearchConfig,
    build_flow_system,
    kernel_basis,
    materialize_flow,
    seed_pool,
    taboo_search,
    variation_of_information,
)


@dataclass
class TransitionPlan:
    """Death/birth bookkeeping that balances populations across a boundary."""

    survivors: int
    deaths: int
    births: int
    kill_ids: tuple[int, ...]
    sizes_from_augmented: tuple[int, ...]
    sizes_to_augmented: tuple[int, ...]
    birth_row: int | None
    death_col: int | None


def plan_transition(
    sizes_t: CommunitySpec,
    sizes_t1: CommunitySpec,
    kill_ids,
    rng: np.random.Generator,
    alive_ids=None,
) -> TransitionPlan:
    """Balance node counts across a boundary.

    Deaths are the explicit kill set plus, depending on the sign of
    ``sum(S_t) - sum(S_t+1) - |O|``, additional uniformly drawn kills; the
    opposite sign births new nodes instead.  The death-adjustment community
    is appended to the t+1 side and the birth-adjustment community to the t
    side (only when non-empty).  When ``alive_ids`` is given the extra
    victims are drawn from it, completing ``kill_ids``.
    """
    kill_ids = tuple(sorted(set(int(x) for x in kill_ids)))
    n_t, n_t1 = sizes_t.node_count, sizes_t1.node_count
    if len(kill_ids) > n_t:
        raise ConfigurationError(f"kill set of {len(kill_ids)} exceeds the population {n_t}")
    gap = n_t1 - (n_t - len(kill_ids))
    births = max(0, gap)
    extra = max(0, -gap)
    deaths = len(kill_ids) + extra
    survivors = n_t - deaths
    if survivors < 0:
        raise ConfigurationError("more deaths than nodes at the boundary")
    if alive_ids is not None:
        pool = sorted(set(alive_ids) - set(kill_ids))
        if len(kill_ids) + len(pool) < deaths:
            raise ConfigurationError("not enough alive nodes to draw the extra kills from")
        if extra:
            picks = rng.choice(len(pool), size=extra, replace=False)
            kill_ids = tuple(sorted(kill_ids + tuple(pool[int(p)] for p in picks)))
    sizes_from = sizes_t.sizes + ((births,) if births else ())
    sizes_to = sizes_t1.sizes + ((deaths,) if deaths else ())
    return TransitionPlan(
        survivors=survivors,
        deaths=deaths,
        births=births,
        kill_ids=kill_ids,
        sizes_from_augmented=sizes_from,
        sizes_to_augmented=sizes_to,
        birth_row=len(sizes_t.sizes) if births else None,
        death_col=len(sizes_t1.sizes) if deaths else None,
    )


@dataclass
class RunConfig:
    """Everything a reproducible run needs."""

    timesteps: int
    seed: int
    community_cfg: SamplerConfig | None = None
    degree_cfg: SamplerConfig | None = None
    community_count: int = 4
    sequence_file: str | None = None
    kills: object = 0  # int per boundary, or a per-boundary list of int / id lists
    pairing_shape: ShapeParams = field(default_factory=ShapeParams)
    temporal_shape: ShapeParams = field(default_factory=ShapeParams)
    search: SearchConfig = field(default_factory=SearchConfig)
    thresholds: LifecycleThresholds = field(default_factory=LifecycleThresholds)
    no_search: bool = False
    interactive: bool = False
    max_sequence_retries: int = 10
    on_disconnected: str = "warn"  # or "abort"
    repair_budget_factor: int = DEFAULT_REPAIR_BUDGET_FACTOR
    output_dir: str | None = None

    def __post_init__(self):
        if self.timesteps < 1:
            raise ConfigurationError("timesteps must be >= 1")
        if self.sequence_file is None:
            if self.community_cfg is None or self.degree_cfg is None:
                raise ConfigurationError(
                    "either a sequence file or community and degree sampler configs are required"
                )
            if self.community_count < 1:
                raise ConfigurationError("community_count must be >= 1")
        if self.on_disconnected not in ("warn", "abort"):
            raise ConfigurationError("on_disconnected must be 'warn' or 'abort'")

    def echo(self) -> dict:
        def shape(s):
            return {"alpha": s.alpha, "beta": s.beta}

        out = {
            "timesteps": self.timesteps,
            "seed": self.seed,
            "community_count": self.community_count,
            "sequence_file": self.sequence_file,
            "kills": self.kills if isinstance(self.kills, int) else list(self.kills),
            "pairing_shape": shape(self.pairing_shape),
            "temporal_shape": shape(self.temporal_shape),
            "no_search": self.no_search,
            "interactive": self.interactive,
            "on_disconnected": self.on_disconnected,
            "search": {
                "local_tries_threshold": self.search.local_tries_threshold,
                "global_tries_threshold": self.search.global_tries_threshold,
            },
            "thresholds": {
                "continuation": self.thresholds.continuation,
                "share": self.thresholds.share,
            },
        }
        for name, cfg in (("communities", self.community_cfg), ("degrees", self.degree_cfg)):
            if cfg is not None:
                out[name] = {
                    "family": cfg.family,
                    "min": cfg.minimum,
                    "max": cfg.maximum,
                    "param": cfg.param,
                }
                if name == "degrees":
                    out[name].update(
                        {
                            "mix_ratio": cfg.mix_ratio,
                            "mix_mode": cfg.mix_mode,
                            "rounding": cfg.rounding,
                        }
                    )
        return out


@dataclass
class RunResult:
    snapshots: list[Snapshot]
    report: RunReport
    output_dir: str | None = None


def _kills_for_boundary(cfg: RunConfig, boundary: int):
    """Resolve the kill spec for boundary t -> t+1 into (explicit ids, random count)."""
    spec = cfg.kills
    if isinstance(spec, (list, tuple)) and spec and isinstance(spec[0], (list, tuple, int)):
        if len(spec) <= boundary:
            raise ConfigurationError("kill list shorter than the number of boundaries")
        spec = spec[boundary]
    if isinstance(spec, int):
        return (), spec
    return tuple(int(x) for x in spec), 0


class _SequenceSource:
    """Per-timestep sequence acquisition with the graphability gate."""

    def __init__(self, cfg: RunConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.steps = None
        if cfg.sequence_file is not None:
            self.steps = load_sequences(cfg.sequence_file)
            if len(self.steps) < cfg.timesteps:
                raise ConfigurationError(
                    f"sequence file provides {len(self.steps)} timesteps,"
                    f" the run needs {cfg.timesteps}"
                )

    def acquire(self, t: int) -> tuple[CommunitySpec, DegreeSpec]:
        if self.steps is not None:
            sizes, spec = self.steps[t]
            report = check_graphable(sizes, spec)
            if not report.ok:
                raise GraphabilityError(
                    f"timestep {t}: {report.failing_condition.value}: {report.detail}"
                )
            return sizes, spec
        cfg = self.cfg
        attempts = cfg.max_sequence_retries if cfg.interactive else 1
        last = None
        for _ in range(max(1, attempts)):
            sizes = sample_sizes(cfg.community_cfg, cfg.community_count, self.rng)
            total = sample_degrees(cfg.degree_cfg, sizes.node_count, self.rng)
            spec = split_degrees(
                total,
                cfg.degree_cfg.mix_ratio,
                cfg.degree_cfg.mix_mode,
                cfg.degree_cfg.rounding,
                self.rng,
            )
            spec = fix_parity(
                spec, self.rng, (cfg.degree_cfg.minimum, cfg.degree_cfg.maximum)
            )
            report = check_graphable(sizes, spec)
            if report.ok:
                return sizes, spec
            last = report
        raise GraphabilityError(
            f"timestep {t}: {last.failing_condition.value}: {last.detail}"
            + ("" if cfg.interactive else " (batch mode: not resampling)")
        )


def _snapshot_metrics(snap: Snapshot) -> SnapshotMetrics:
    assort, degenerate = assortativity_details(snap)
    return SnapshotMetrics(
        t=snap.t,
        nodes=snap.node_count,
        links=snap.link_count,
        communities=snap.community_count,
        assortativity=assort,
        assortativity_degenerate=degenerate,
        modularity=modularity(snap),
        wiring_repairs=snap.wiring_repairs,
        disconnected_communities=list(snap.disconnected_communities),
    )


def _inherit_labels(jac: np.ndarray, labels_t, threshold: float, counter: int):
    """Carry community labels across the boundary by greedy Jaccard matching."""
    k, l = jac.shape
    pairs = sorted(
        ((jac[i, j], i, j) for i in range(k) for j in range(l)),
        key=lambda p: (-p[0], p[1], p[2]),
    )
    labels1: list[int | None] = [None] * l
    used = set()
    for value, i, j in pairs:
        if value < threshold:
            break
        if i in used or labels1[j] is not None:
            continue
        labels1[j] = labels_t[i]
        used.add(i)
    for j in range(l):
        if labels1[j] is None:
            labels1[j] = counter
            counter += 1
    return labels1, counter


def _advance_boundary(cfg, rng, snap, sizes_t, sizes_t1, spec_t1, t, next_id):
    """Plan kills, search the flow, materialize moves and assemble T(t+1).

    Returns (plan, flow, pool_vi, surviving, new_snap, next_id); raises
    ``GraphabilityError`` when the new step's sequences cannot be assembled,
    leaving the current snapshot untouched so the caller may resample.
    """
    explicit_ids, random_count = _kills_for_boundary(cfg, t)
    alive = sorted(snap.nodes)
    bad = [nid for nid in explicit_ids if nid not in snap.nodes]
    if bad:
        raise ConfigurationError(f"boundary {t}: kill ids {bad} are not alive at T{t}")
    kill_ids = set(explicit_ids)
    if random_count:
        pool = [nid for nid in alive if nid not in kill_ids]
        if random_count > len(pool):
            raise ConfigurationError(f"boundary {t}: cannot kill {random_count} nodes")
        picks = rng.choice(len(pool), size=random_count, replace=False)
        kill_ids |= {pool[int(p)] for p in picks}
    plan = plan_transition(sizes_t, sizes_t1, sorted(kill_ids), rng, alive_ids=alive)

    k_real, l_real = len(sizes_t), len(sizes_t1)
    lower = np.zeros((len(plan.sizes_from_augmented), len(plan.sizes_to_augmented)), np.int64)
    kills_per_comm = [0] * k_real
    for nid in plan.kill_ids:
        kills_per_comm[snap.nodes[nid].community] += 1
    if plan.death_col is not None:
        for i in range(k_real):
            lower[i, plan.death_col] = kills_per_comm[i]
    system = build_flow_system(plan.sizes_from_augmented, plan.sizes_to_augmented, lower=lower)
    pool_flows = seed_pool(system)
    pool_vi = [variation_of_information(u) for u in pool_flows]
    flow = pool_flows[int(np.argmin(pool_vi))]
    if not cfg.no_search:
        flow = taboo_search(system, flow, kernel_basis(system), cfg.search)

    # concrete node moves: survivors only; the pinned death column is the kill set
    victims = set(plan.kill_ids)
    groups = [
        [nid for nid in alive if snap.nodes[nid].community == i and nid not in victims]
        for i in range(k_real)
    ]
    moved = materialize_flow(flow[:k_real, :l_real], groups, rng)
    surviving: dict[int, int] = {}
    for i in range(k_real):
        for j in range(l_real):
            for nid in moved[i][j]:
                surviving[nid] = j
    born_at: dict[int, int] = {}
    if plan.birth_row is not None:
        for j in range(l_real):
            for _ in range(int(flow[plan.birth_row, j])):
                surviving[next_id] = j
                born_at[next_id] = t + 1
                next_id += 1

    prev_degrees = {nid: snap.nodes[nid].degree for nid in surviving if nid in snap.nodes}
    new_snap = assemble_snapshot(
        t + 1,
        sizes_t1,
        spec_t1,
        rng,
        pairing_shape=cfg.pairing_shape,
        temporal_shape=cfg.temporal_shape,
        surviving=surviving,
        prev_degrees=prev_degrees,
        born_at=born_at,
        repair_budget_factor=cfg.repair_budget_factor,
    )
    if new_snap.disconnected_communities and cfg.on_disconnected == "abort":
        raise GraphabilityError(
            f"timestep {t + 1}: communities {new_snap.disconnected_communities}"
            " are internally disconnected"
        )
    return plan, flow, pool_vi, surviving, new_snap, next_id


def run(cfg: RunConfig) -> RunResult:
    """Execute the full generation loop; identical configs give identical outputs."""
    rng = np.random.default_rng(cfg.seed)
    source = _SequenceSource(cfg, rng)
    report = RunReport(seed=cfg.seed, config=cfg.echo())
    snapshots: list[Snapshot] = []
    # graphability can also fail after assignment (per-community conditions);
    # interactive sampling re-draws the step's sequences in that case
    resamples = max(1, cfg.max_sequence_retries) if cfg.interactive and source.steps is None else 1

    snap = None
    last_error: GraphabilityError | None = None
    for _ in range(resamples):
        sizes_t, spec_t = source.acquire(0)
        try:
            snap = assemble_snapshot(
                0,
                sizes_t,
                spec_t,
                rng,
                pairing_shape=cfg.pairing_shape,
                start_id=0,
                repair_budget_factor=cfg.repair_budget_factor,
            )
            break
        except GraphabilityError as exc:
            last_error = exc
    if snap is None:
        raise last_error
    if snap.disconnected_communities and cfg.on_disconnected == "abort":
        raise GraphabilityError(
            f"timestep 0: communities {snap.disconnected_communities} are internally disconnected"
        )
    snapshots.append(snap)
    report.snapshots.append(_snapshot_metrics(snap))
    next_id = snap.node_count
    label_counter = snap.community_count  # labels 0..k-1 already taken

    for t in range(cfg.timesteps - 1):
        boundary = None
        for _ in range(resamples):
            sizes_t1, spec_t1 = source.acquire(t + 1)
            try:
                boundary = _advance_boundary(
                    cfg, rng, snap, sizes_t, sizes_t1, spec_t1, t, next_id
                )
                break
            except GraphabilityError as exc:
                last_error = exc
        if boundary is None:
            raise last_error
        plan, flow, pool_vi, surviving, new_snap, next_id = boundary
        search_vi = variation_of_information(flow)
        for nid in plan.kill_ids:
            snap.nodes[nid].died_at = t
        k_real, l_real = len(sizes_t), len(sizes_t1)

        # realized contingency must reproduce the flow exactly
        recount = np.zeros((k_real, l_real), dtype=np.int64)
        for nid, j in surviving.items():
            if nid in snap.nodes:
                recount[snap.nodes[nid].community, j] += 1
        if not np.array_equal(recount, flow[:k_real, :l_real]):
            raise AssertionError("realized contingency deviates from the searched flow")

        members_t = [set(g) for g in snap.clustering]
        members_t1 = [set(g) for g in new_snap.clustering]
        events = classify_events(
            members_t,
            members_t1,
            flow,
            cfg.thresholds,
            death_col=plan.death_col,
            birth_row=plan.birth_row,
        )
        jac = np.zeros((k_real, l_real))
        for i in range(k_real):
            for j in range(l_real):
                jac[i, j] = jaccard(members_t[i], members_t1[j])
        labels_t1, label_counter = _inherit_labels(
            jac, snap.community_labels, cfg.thresholds.continuation, label_counter
        )
        new_snap.community_labels = labels_t1

        corr, corr_degenerate = temporal_degree_correlation_details(snap, new_snap)
        row_labels = [str(x) for x in snap.community_labels] + (
            ["births"] if plan.birth_row is not None else []
        )
        col_labels = [str(x) for x in labels_t1] + (
            ["deaths"] if plan.death_col is not None else []
        )
        report.boundaries.append(
            BoundaryReport(
                t_from=t,
                t_to=t + 1,
                vi=search_vi,
                contingency=[[int(x) for x in row] for row in flow],
                row_labels=row_labels,
                col_labels=col_labels,
                temporal_degree_correlation=corr,
                correlation_degenerate=corr_degenerate,
                deaths=plan.deaths,
                births=plan.births,
                seed_pool_vi=pool_vi,
                search_vi=search_vi,
                events=events,
            )
        )
        snapshots.append(new_snap)
        report.snapshots.append(_snapshot_metrics(new_snap))
        snap = new_snap
        sizes_t = sizes_t1

    output_dir = None
    if cfg.output_dir is not None:
        output_dir = cfg.output_dir
        export_temporal_csv(snapshots, output_dir)
        write_report(report, output_dir)
    return RunResult(snapshots=snapshots, report=report, output_dir=output_dir)


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def load_run_config(path, overrides=None) -> RunConfig:
    """Read a RunConfig from an INI-style key/value file (see README)."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path}")
    overrides = overrides or {}

    def section(name):
        return parser[name] if parser.has_section(name) else {}

    run_sec = section("run")
    sampler_cfgs = {}
    for name in ("communities", "degrees"):
        sec = section(name)
        if sec:
            try:
                sampler_cfgs[name] = SamplerConfig(
                    family=sec.get("family", "uniform"),
                    minimum=int(sec.get("min", 1)),
                    maximum=int(sec.get("max", 1)),
                    param=float(sec.get("param", 1.0)),
                    mix_ratio=float(sec.get("mix_ratio", 0.5)),
                    mix_mode=sec.get("mix_mode", "fixed"),
                    rounding=sec.get("rounding", "stochastic"),
                )
            except ValueError as exc:
                raise ConfigurationError(f"[{name}] section: {exc}") from None
    shapes = section("shapes")
    search_sec = section("search")
    life = section("lifecycle")
    try:
        cfg = RunConfig(
            timesteps=int(overrides.get("timesteps", run_sec.get("timesteps", 1))),
            seed=int(overrides.get("seed", run_sec.get("seed", 0))),
            community_cfg=sampler_cfgs.get("communities"),
            degree_cfg=sampler_cfgs.get("degrees"),
            community_count=int(section("communities").get("count", 4))
            if section("communities")
            else 4,
            sequence_file=run_sec.get("sequence_file") or None,
            kills=int(run_sec.get("kills", 0)),
            pairing_shape=ShapeParams(
                float(shapes.get("pairing_alpha", 1.0)), float(shapes.get("pairing_beta", 1.0))
            ),
            temporal_shape=ShapeParams(
                float(shapes.get("temporal_alpha", 1.0)),
                float(shapes.get("temporal_beta", 1.0)),
            ),
            search=SearchConfig(
                local_tries_threshold=int(search_sec.get("local_tries", 50)),
                global_tries_threshold=int(search_sec.get("global_tries", 10)),
                enumeration_cap=int(search_sec.get("enumeration_cap", 500_000)),
            ),
            thresholds=LifecycleThresholds(
                continuation=float(life.get("continuation", 0.3)),
                share=float(life.get("share", 0.1)),
            ),
            no_search=run_sec.get("no_search", "false").strip().lower()
            in ("1", "true", "yes"),
            interactive=run_sec.get("interactive", "false").strip().lower()
            in ("1", "true", "yes"),
            on_disconnected=run_sec.get("on_disconnected", "warn"),
            output_dir=overrides.get("output", run_sec.get("output")) or None,
        )
    except ValueError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    return cfg
