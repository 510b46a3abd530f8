"""Content-based reciprocal scoring in the style of RECON."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from recipx.model import DatasetSnapshot


@dataclass(frozen=True)
class Recommendation:
    receiver_id: str
    recommended_id: str
    score: float
    directional: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "receiver": self.receiver_id,
            "recommended": self.recommended_id,
            "score": self.score,
            "directional": list(self.directional),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Recommendation:
        fwd, bwd = data["directional"]
        return cls(data["receiver"], data["recommended"], float(data["score"]), (float(fwd), float(bwd)))


def harmonic(a: float, b: float) -> float:
    """Harmonic mean of two non-negative scores, 0 when both vanish."""
    if a + b == 0:
        return 0.0
    return 2 * a * b / (a + b)


def directional_interest(x: str, y: str, snapshot: DatasetSnapshot) -> float:
    """Mean over attributes of the share of x's messages that went to y's value.

    Zero for a user who has never sent a message.
    """
    pref = snapshot.preference(x)
    target = snapshot.require(y)
    if pref.total_messages == 0:
        return 0.0
    shares = [pref.count(a, target.attributes[a]) / pref.total_messages for a in snapshot.schema.ids]
    return min(1.0, sum(shares) / len(shares))


def reciprocal_score(x: str, y: str, snapshot: DatasetSnapshot) -> float:
    return harmonic(directional_interest(x, y, snapshot), directional_interest(y, x, snapshot))


def rank(
    x: str,
    candidates: Iterable[str],
    count: int,
    interest: Callable[[str, str], float],
) -> list[Recommendation]:
    """Score candidates both ways and keep the best ``count`` (ties by user-id)."""
    if count < 1:
        raise ValueError(f"count must be >= 1 (got {count})")
    recs = []
    for y in candidates:
        fwd, bwd = interest(x, y), interest(y, x)
        recs.append(Recommendation(x, y, harmonic(fwd, bwd), (fwd, bwd)))
    recs.sort(key=lambda r: (-r.score, r.recommended_id))
    return recs[:count]


def fresh_candidates(x: str, snapshot: DatasetSnapshot) -> list[str]:
    """Opposite seek-pool minus users ``x`` already messaged."""
    done = snapshot.recipients[x]
    return [y for y in snapshot.pool(x) if y not in done]


def recommend_recon(x: str, count: int, snapshot: DatasetSnapshot) -> list[Recommendation]:
    snapshot.require(x)
    return rank(
        x,
        fresh_candidates(x, snapshot),
        count,
        lambda a, b: directional_interest(a, b, snapshot),
    )
