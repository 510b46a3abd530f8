"""Transparent and correlation-based explanations, reciprocal composition, rendering."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from recipx.cf import cf_directional_interest, recommend_cf
from recipx.model import AttributeValue, DatasetError, DatasetSnapshot
from recipx.recon import Recommendation, directional_interest, harmonic, recommend_recon

DEFAULT_K = 3
METHODS = ("transparent", "correlation")
MODES = ("one-sided", "reciprocal")
RECOMMENDERS = ("recon", "cf")
STYLES = ("full", "privacy")


class InsufficientHistory(DatasetError):
    pass


class ExplanationItem(NamedTuple):
    attribute: str
    value: str
    weight: float


@dataclass(frozen=True)
class Explanation:
    explainer_id: str
    subject_id: str
    items: tuple[ExplanationItem, ...]
    method: str

    def values(self) -> list[AttributeValue]:
        return [AttributeValue(it.attribute, it.value) for it in self.items]

    def to_dict(self) -> dict:
        return {
            "explainer": self.explainer_id,
            "subject": self.subject_id,
            "method": self.method,
            "items": [{"attribute": a, "value": v, "weight": w} for a, v, w in self.items],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Explanation:
        items = tuple(ExplanationItem(i["attribute"], i["value"], float(i["weight"])) for i in data["items"])
        return cls(data["explainer"], data["subject"], items, data["method"])


@dataclass(frozen=True)
class ExplainedRecommendation:
    recommendation: Recommendation
    forward: Explanation
    backward: Explanation | None
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if (self.mode == "reciprocal") != (self.backward is not None):
            raise ValueError("backward explanation must be present exactly in reciprocal mode")

    def to_dict(self) -> dict:
        return {
            "recommendation": self.recommendation.to_dict(),
            "mode": self.mode,
            "forward": self.forward.to_dict(),
            "backward": None if self.backward is None else self.backward.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> ExplainedRecommendation:
        bwd = data.get("backward")
        return cls(
            Recommendation.from_dict(data["recommendation"]),
            Explanation.from_dict(data["forward"]),
            None if bwd is None else Explanation.from_dict(bwd),
            data["mode"],
        )


@dataclass(frozen=True)
class BinaryVectorPair:
    over: tuple[str, ...]
    m: tuple[int, ...]
    s: tuple[int, ...]


def _top_k(x: str, y: str, scored: list[ExplanationItem], k: int, method: str) -> Explanation:
    if k < 1:
        raise ValueError(f"k must be >= 1 (got {k})")
    kept = sorted((it for it in scored if it.weight > 0), key=lambda it: (-it.weight, it.attribute))
    return Explanation(x, y, tuple(kept[:k]), method)


def explain_transparent(x: str, y: str, k: int, snapshot: DatasetSnapshot) -> Explanation:
    """Rank y's attribute values by how many of x's messages went to that value."""
    pref = snapshot.preference(x)
    target = snapshot.require(y)
    scored = [
        ExplanationItem(a, target.attributes[a], float(pref.count(a, target.attributes[a])))
        for a in snapshot.schema.ids
    ]
    return _top_k(x, y, scored, k, "transparent")


def build_vectors(x: str, value: AttributeValue, snapshot: DatasetSnapshot) -> BinaryVectorPair:
    """Messaged/has-value indicator vectors over the users x has viewed."""
    snapshot.require(x)
    spec = snapshot.schema.get(value.attribute)
    if value.value not in spec.values:
        raise DatasetError(f"{value.value!r} is not a value of {value.attribute!r}")
    over = snapshot.viewed[x]
    if not over:
        raise InsufficientHistory(f"user {x!r} has not viewed anyone")
    messaged = snapshot.recipients[x]
    m = tuple(int(i in messaged) for i in over)
    s = tuple(int(snapshot.users[i].carries(value)) for i in over)
    return BinaryVectorPair(over, m, s)


def pearson(m: Sequence[float], s: Sequence[float]) -> float:
    """Sample Pearson correlation; 0 when either input is constant."""
    if len(m) != len(s):
        raise ValueError(f"length mismatch ({len(m)} vs {len(s)})")
    n = len(m)
    if n < 2:
        raise ValueError("need at least two paired samples")
    a = np.asarray(m, dtype=np.float64)
    b = np.asarray(s, dtype=np.float64)
    sa, sb = a.sum(), b.sum()
    va = n * np.dot(a, a) - sa * sa
    vb = n * np.dot(b, b) - sb * sb
    if va <= 0 or vb <= 0:
        return 0.0
    r = (n * np.dot(a, b) - sa * sb) / math.sqrt(va * vb)
    return float(min(1.0, max(-1.0, r)))


def explain_correlation(x: str, y: str, k: int, snapshot: DatasetSnapshot) -> Explanation:
    """Rank y's attribute values by correlation with x's decision to message a viewed profile."""
    target = snapshot.require(y)
    snapshot.require(x)
    if len(snapshot.viewed[x]) < 2:
        raise InsufficientHistory(f"user {x!r} viewed fewer than two users")
    scored = []
    for a in snapshot.schema.ids:
        vec = build_vectors(x, target.value(a), snapshot)
        scored.append(ExplanationItem(a, target.attributes[a], pearson(vec.m, vec.s)))
    return _top_k(x, y, scored, k, "correlation")


def explain(x: str, y: str, method: str, k: int, snapshot: DatasetSnapshot) -> Explanation:
    if method == "transparent":
        return explain_transparent(x, y, k, snapshot)
    if method == "correlation":
        return explain_correlation(x, y, k, snapshot)
    raise ValueError(f"unknown explanation method {method!r}")


def recommend(x: str, count: int, recommender: str, snapshot: DatasetSnapshot) -> list[Recommendation]:
    if recommender == "recon":
        return recommend_recon(x, count, snapshot)
    if recommender == "cf":
        return recommend_cf(x, count, snapshot)
    raise ValueError(f"unknown recommender {recommender!r}")


def _attach(rec: Recommendation, method: str, mode: str, k: int, snapshot: DatasetSnapshot) -> ExplainedRecommendation:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    x, r = rec.receiver_id, rec.recommended_id
    forward = explain(x, r, method, k, snapshot)
    backward = None
    if mode == "reciprocal":
        try:
            backward = explain(r, x, method, k, snapshot)
        except InsufficientHistory:
            backward = Explanation(r, x, (), method)
    return ExplainedRecommendation(rec, forward, backward, mode)


def recommend_with_explanations(
    x: str,
    count: int,
    recommender: str,
    method: str,
    mode: str,
    snapshot: DatasetSnapshot,
    k: int = DEFAULT_K,
) -> list[ExplainedRecommendation]:
    """Recommend, then explain each pick one-sidedly or in both directions."""
    if method not in METHODS:
        raise ValueError(f"unknown explanation method {method!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return [_attach(rec, method, mode, k, snapshot) for rec in recommend(x, count, recommender, snapshot)]


def explain_pair(
    x: str,
    y: str,
    method: str,
    mode: str,
    snapshot: DatasetSnapshot,
    k: int = DEFAULT_K,
    recommender: str = "recon",
) -> ExplainedRecommendation:
    """Explain an arbitrary (x, y) pair as if y had been recommended to x."""
    if recommender == "recon":
        fwd, bwd = directional_interest(x, y, snapshot), directional_interest(y, x, snapshot)
    elif recommender == "cf":
        fwd, bwd = cf_directional_interest(x, y, snapshot), cf_directional_interest(y, x, snapshot)
    else:
        raise ValueError(f"unknown recommender {recommender!r}")
    rec = Recommendation(x, y, harmonic(fwd, bwd), (fwd, bwd))
    return _attach(rec, method, mode, k, snapshot)


# -- rendering -------------------------------------------------------------


def parse_phrases(text: str) -> dict[str, str]:
    table = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, phrase = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"phrase table line {n}: expected 'key = phrase'")
        table[key.strip()] = phrase.strip()
    return table


def load_phrases(path: str | Path | None = None) -> dict[str, str]:
    if path is None:
        text = resources.files("recipx").joinpath("data/phrases.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_phrases(text)


def phrase(item: AttributeValue | ExplanationItem, table: Mapping[str, str]) -> str:
    qualified = f"{item.attribute}.{item.value}"
    return table.get(qualified) or table.get(item.value) or f"{item.attribute}: {item.value}"


def _listing(expl: Explanation, table: Mapping[str, str]) -> str:
    if not expl.items:
        return "no specific attributes stood out"
    return ", ".join(phrase(it, table) for it in expl.items)


PRIVACY_SENTENCE = "We believe you fit {who}'s preferences, so {who} is likely to reply positively."


def render(er: ExplainedRecommendation, style: str = "full", phrases: Mapping[str, str] | None = None) -> str:
    """Human-readable text for one explained recommendation.

    The privacy style never discloses what the recommended user likes; the
    backward list is replaced by a fixed statement.
    """
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}")
    table = load_phrases() if phrases is None else phrases
    rec = er.recommendation
    who = rec.recommended_id
    lines = [
        f"{who} (match score {rec.score:.3f})",
        f"  Why you may like {who}: {_listing(er.forward, table)}",
    ]
    if er.backward is not None:
        if style == "privacy":
            lines.append("  " + PRIVACY_SENTENCE.format(who=who))
        else:
            lines.append(f"  Why {who} may like you: {_listing(er.backward, table)}")
    return "\n".join(lines) + "\n"
