"""Agent-based simulation of the explicit-cost recommendation experiment.

Simulated receivers see explained recommendations, decide whether to send
a message by expected utility, and collect points according to the
recommended user's sampled reply. Everything is a pure function of
(snapshot, configuration, seed): every user owns a private decision stream
and reply stream spawned from the seed, so results do not depend on
condition assignment order or on how many worker threads are used.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean, stdev
from typing import Any, Mapping, Sequence

import jsonschema
import numpy as np

from recipx.explain import (
    DEFAULT_K,
    METHODS,
    MODES,
    RECOMMENDERS,
    ExplainedRecommendation,
    recommend_with_explanations,
)
from recipx.model import DatasetSnapshot
from recipx.recon import directional_interest
from recipx.stats import welch_t


DESIGNS = ("between", "paired")


class InsufficientPopulation(ValueError):
    pass


@dataclass(frozen=True)
class CostConfig:
    rejection_penalty: float = 3.0
    gain_floor: float = 3.0
    gain_ceiling: float = 4.0
    acceptance_cost: float = 0.0

    def __post_init__(self) -> None:
        if self.gain_ceiling < self.gain_floor:
            raise ValueError("gain-ceiling must be >= gain-floor")
        if min(self.rejection_penalty, self.gain_floor, self.acceptance_cost) < 0:
            raise ValueError("penalties, gains and costs must be non-negative")

    def gain(self, fit: float) -> float:
        return self.gain_floor + fit * (self.gain_ceiling - self.gain_floor)


@dataclass(frozen=True)
class AgentPolicy:
    """Expected-utility agent.

    ``confidence[mode]`` is the fraction of the true reply probability the
    agent believes in after seeing an explanation of that mode. ``tremble``
    is the probability of ignoring the utility rule and flipping a coin.
    """

    risk_aversion: float = 0.0
    confidence: Mapping[str, float] = field(
        default_factory=lambda: {"one-sided": 1.0, "reciprocal": 1.0}
    )
    tremble: float = 0.0
    kind: str = "expected-utility"

    def __post_init__(self) -> None:
        if self.kind != "expected-utility":
            raise ValueError(f"unsupported policy kind {self.kind!r}")
        if self.risk_aversion < 0:
            raise ValueError("risk-aversion must be >= 0")
        for mode, c in self.confidence.items():
            if mode not in MODES or not 0.0 <= c <= 1.0:
                raise ValueError(f"bad confidence entry {mode!r}: {c!r}")
        if not 0.0 <= self.tremble <= 1.0:
            raise ValueError("tremble must lie in [0, 1]")


@dataclass(frozen=True)
class Condition:
    mode: str
    method: str = "correlation"
    recommender: str = "recon"
    name: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.recommender not in RECOMMENDERS:
            raise ValueError(f"unknown recommender {self.recommender!r}")

    @property
    def label(self) -> str:
        return self.name or f"{self.mode}/{self.method}/{self.recommender}"


def reply_probability(y: str, x: str, snapshot: DatasetSnapshot) -> float:
    """Chance that ``y`` answers a message from ``x`` positively."""
    return directional_interest(y, x, snapshot)


def payoff(accepted: bool, reply_positive: bool, fit: float, cfg: CostConfig) -> float:
    if not 0.0 <= fit <= 1.0:
        raise ValueError(f"fit must lie in [0, 1] (got {fit})")
    if not accepted:
        return 0.0
    if not reply_positive:
        return -cfg.rejection_penalty - cfg.acceptance_cost
    return cfg.gain(fit) - cfg.acceptance_cost


def expected_utility(p: float, gain: float, cfg: CostConfig, risk_aversion: float = 0.0) -> float:
    spread = gain + cfg.rejection_penalty
    variance = p * (1.0 - p) * spread * spread
    return p * gain - (1.0 - p) * cfg.rejection_penalty - cfg.acceptance_cost - risk_aversion * variance


def agent_decide(
    policy: AgentPolicy,
    er: ExplainedRecommendation,
    true_p: float,
    cfg: CostConfig,
    rng: np.random.Generator,
    fit: float = 0.5,
) -> bool:
    """True to send a message. Consumes exactly one draw from ``rng``."""
    if not 0.0 <= true_p <= 1.0:
        raise ValueError(f"true-p must lie in [0, 1] (got {true_p})")
    u = rng.random()
    if u < policy.tremble:
        return u < policy.tremble / 2
    perceived = true_p * policy.confidence.get(er.mode, 1.0)
    return expected_utility(perceived, cfg.gain(fit), cfg, policy.risk_aversion) > 0


@dataclass(frozen=True)
class UserOutcome:
    user_id: str
    condition: str
    decisions: tuple[bool, ...]
    payoffs: tuple[float, ...]

    @property
    def received(self) -> int:
        return len(self.decisions)

    @property
    def acceptance_rate(self) -> float:
        return sum(self.decisions) / len(self.decisions)

    @property
    def score(self) -> float:
        return math.fsum(self.payoffs)


@dataclass(frozen=True)
class ConditionSummary:
    label: str
    n: int
    accept_rate_mean: float
    accept_rate_sd: float
    payoff_mean: float


@dataclass(frozen=True)
class PairComparison:
    cond_a: str
    cond_b: str
    t: float
    df: float
    p: float


@dataclass(frozen=True)
class ExperimentReport:
    conditions: tuple[ConditionSummary, ...]
    pairs: tuple[PairComparison, ...]
    seed: int
    outcomes: tuple[UserOutcome, ...] = field(default=(), compare=False, repr=False)

    def summary(self, label: str) -> ConditionSummary:
        for c in self.conditions:
            if c.label == label:
                return c
        raise KeyError(label)


@dataclass(frozen=True)
class ExperimentConfig:
    conditions: tuple[Condition, ...]
    cost: CostConfig = field(default_factory=CostConfig)
    policy: AgentPolicy = field(default_factory=AgentPolicy)
    recs_per_user: int = 5
    k: int = DEFAULT_K
    seed: int = 0
    design: str = "between"


def _simulate_user(
    uid: str,
    cond: Condition,
    snapshot: DatasetSnapshot,
    cfg: CostConfig,
    policy: AgentPolicy,
    recs_per_user: int,
    k: int,
    streams: np.random.SeedSequence,
) -> UserOutcome:
    # derived statelessly so a user replayed under another condition sees identical draws
    decide_rng, reply_rng = (
        np.random.default_rng(np.random.SeedSequence(streams.entropy, spawn_key=streams.spawn_key + (j,)))
        for j in range(2)
    )
    decisions, payoffs = [], []
    for er in recommend_with_explanations(uid, recs_per_user, cond.recommender, cond.method, cond.mode, snapshot, k):
        y = er.recommendation.recommended_id
        fit = directional_interest(uid, y, snapshot)
        p = reply_probability(y, uid, snapshot)
        accepted = agent_decide(policy, er, p, cfg, decide_rng, fit)
        # drawn unconditionally so the stream stays aligned across conditions
        positive = bool(reply_rng.random() < p)
        decisions.append(accepted)
        payoffs.append(payoff(accepted, positive, fit, cfg))
    return UserOutcome(uid, cond.label, tuple(decisions), tuple(payoffs))


def _check_population(snapshot: DatasetSnapshot, n_conditions: int) -> None:
    pools: dict[str | None, int] = {}
    for profile in snapshot.users.values():
        pools[profile.gender] = pools.get(profile.gender, 0) + 1
    if len(snapshot.users) < 2 or min(pools.values()) < 2:
        raise InsufficientPopulation("need at least two users in every pool")
    if len(snapshot.users) < n_conditions:
        raise InsufficientPopulation("fewer users than conditions")


def assign_conditions(user_ids: Sequence[str], n_conditions: int, rng: np.random.Generator) -> dict[str, int]:
    """Seeded even partition: shuffle, then deal round-robin."""
    order = rng.permutation(len(user_ids))
    return {user_ids[j]: i % n_conditions for i, j in enumerate(order)}


def _summaries(conditions: Sequence[Condition], outcomes: Sequence[UserOutcome]):
    rates: dict[str, list[float]] = {c.label: [] for c in conditions}
    scores: dict[str, list[float]] = {c.label: [] for c in conditions}
    for o in outcomes:
        if o.received:
            rates[o.condition].append(o.acceptance_rate)
            scores[o.condition].append(o.score)
    summaries = []
    for c in conditions:
        r = rates[c.label]
        summaries.append(ConditionSummary(
            c.label,
            len(r),
            fmean(r) if r else math.nan,
            stdev(r) if len(r) > 1 else 0.0,
            fmean(scores[c.label]) if r else math.nan,
        ))
    pairs = []
    for i in range(len(conditions)):
        for j in range(i + 1, len(conditions)):
            a, b = conditions[i].label, conditions[j].label
            try:
                t, df, p = welch_t(rates[a], rates[b])
            except ValueError:
                t = df = p = math.nan
            pairs.append(PairComparison(a, b, t, df, p))
    return tuple(summaries), tuple(pairs)


def run_experiment(
    snapshot: DatasetSnapshot,
    conditions: Sequence[Condition],
    cfg: CostConfig,
    policy: AgentPolicy,
    recs_per_user: int,
    seed: int,
    k: int = DEFAULT_K,
    workers: int = 1,
    design: str = "between",
) -> ExperimentReport:
    """Simulate every user and summarise acceptance per condition.

    ``design="between"`` deals each user exactly one condition (seeded even
    partition). ``design="paired"`` replays every user under every condition
    with the same decision and reply streams, which removes between-group
    sampling noise from condition contrasts.

    Users who receive no recommendation at all are left out of the
    per-condition statistics.
    """
    if design not in DESIGNS:
        raise ValueError(f"unknown design {design!r}")
    conditions = list(conditions)
    if not conditions:
        raise ValueError("at least one condition is required")
    labels = [c.label for c in conditions]
    if len(set(labels)) != len(labels):
        raise ValueError("condition labels must be unique")
    if recs_per_user < 1:
        raise ValueError("recs-per-user must be >= 1")
    _check_population(snapshot, len(conditions))

    user_ids = sorted(snapshot.users)
    assign_ss, users_ss = np.random.SeedSequence(seed).spawn(2)
    assignment = assign_conditions(user_ids, len(conditions), np.random.default_rng(assign_ss))
    streams = users_ss.spawn(len(user_ids))

    if design == "between":
        jobs = [(i, assignment[uid]) for i, uid in enumerate(user_ids)]
    else:
        jobs = [(i, c) for i in range(len(user_ids)) for c in range(len(conditions))]

    def one(job: tuple[int, int]) -> UserOutcome:
        i, c = job
        return _simulate_user(user_ids[i], conditions[c], snapshot, cfg, policy, recs_per_user, k, streams[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, jobs))
    else:
        outcomes = [one(job) for job in jobs]
    summaries, pairs = _summaries(conditions, outcomes)
    return ExperimentReport(summaries, pairs, seed, tuple(outcomes))


# -- config and report files ----------------------------------------------

CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["conditions"],
    "additionalProperties": False,
    "properties": {
        "conditions": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["mode"],
                "additionalProperties": False,
                "properties": {
                    "mode": {"enum": list(MODES)},
                    "method": {"enum": list(METHODS)},
                    "recommender": {"enum": list(RECOMMENDERS)},
                    "label": {"type": "string", "minLength": 1},
                },
            },
        },
        "cost": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                key: {"type": "number", "minimum": 0}
                for key in ("rejection-penalty", "gain-floor", "gain-ceiling", "acceptance-cost")
            },
        },
        "policy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "expected-utility"},
                "risk-aversion": {"type": "number", "minimum": 0},
                "tremble": {"type": "number", "minimum": 0, "maximum": 1},
                "explanation-confidence": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {m: {"type": "number", "minimum": 0, "maximum": 1} for m in MODES},
                },
            },
        },
        "recs-per-user": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "design": {"enum": list(DESIGNS)},
    },
}


class ConfigError(ValueError):
    pass


def parse_config(data: Any) -> ExperimentConfig:
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {e.message}") from None
    cost = data.get("cost", {})
    pol = data.get("policy", {})
    try:
        return ExperimentConfig(
            conditions=tuple(
                Condition(c["mode"], c.get("method", "correlation"), c.get("recommender", "recon"), c.get("label"))
                for c in data["conditions"]
            ),
            cost=CostConfig(
                cost.get("rejection-penalty", 3.0),
                cost.get("gain-floor", 3.0),
                cost.get("gain-ceiling", 4.0),
                cost.get("acceptance-cost", 0.0),
            ),
            policy=AgentPolicy(
                pol.get("risk-aversion", 0.0),
                {"one-sided": 1.0, "reciprocal": 1.0, **pol.get("explanation-confidence", {})},
                pol.get("tremble", 0.0),
            ),
            recs_per_user=data.get("recs-per-user", 5),
            k=data.get("k", DEFAULT_K),
            seed=data.get("seed", 0),
            design=data.get("design", "between"),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON at line {e.lineno}: {e.msg}") from None
    return parse_config(data)


CSV_COLUMNS = (
    "row_type", "condition", "n", "accept_rate_mean", "accept_rate_sd", "payoff_mean",
    "cond_a", "cond_b", "t", "df", "p",
)


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6f}"


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.conditions:
        writer.writerow([
            "condition", c.label, c.n,
            _fmt(c.accept_rate_mean), _fmt(c.accept_rate_sd), _fmt(c.payoff_mean),
            "", "", "", "", "",
        ])
    for p in report.pairs:
        writer.writerow(["pair", "", "", "", "", "", p.cond_a, p.cond_b, _fmt(p.t), _fmt(p.df), _fmt(p.p)])
    return buf.getvalue()


def read_report_csv(text: str) -> ExperimentReport:
    """Parse a report CSV back into summaries (seed and outcomes are not stored)."""
    conditions, pairs = [], []
    for row in csv.DictReader(io.StringIO(text)):
        if row["row_type"] == "condition":
            conditions.append(ConditionSummary(
                row["condition"], int(row["n"]),
                float(row["accept_rate_mean"]), float(row["accept_rate_sd"]), float(row["payoff_mean"]),
            ))
        elif row["row_type"] == "pair":
            pairs.append(PairComparison(row["cond_a"], row["cond_b"], float(row["t"]), float(row["df"]), float(row["p"])))
        else:
            raise ValueError(f"unknown row_type {row['row_type']!r}")
    return ExperimentReport(tuple(conditions), tuple(pairs), seed=-1)


def format_table(report: ExperimentReport) -> str:
    width = max([len("condition")] + [len(c.label) for c in report.conditions])
    lines = [f"{'condition':<{width}}  {'n':>4}  {'accept (mean ± sd)':>18}  {'payoff':>8}"]
    for c in report.conditions:
        lines.append(
            f"{c.label:<{width}}  {c.n:>4}  {c.accept_rate_mean:>8.3f} ± {c.accept_rate_sd:<7.3f}  {c.payoff_mean:>8.3f}"
        )
    for p in report.pairs:
        lines.append(f"{p.cond_a} vs {p.cond_b}: t={p.t:.3f} df={p.df:.1f} p={p.p:.4f}")
    return "\n".join(lines) + "\n"
