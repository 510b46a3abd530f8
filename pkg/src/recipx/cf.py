"""Two-sided collaborative filtering over message recipients."""

from __future__ import annotations

import math

from recipx.model import DatasetSnapshot
from recipx.recon import Recommendation, fresh_candidates, rank


def user_similarity(x: str, u: str, snapshot: DatasetSnapshot) -> float:
    """Cosine similarity of the binary recipient vectors of ``x`` and ``u``."""
    snapshot.require(x)
    snapshot.require(u)
    rx, ru = snapshot.recipients[x], snapshot.recipients[u]
    if not rx or not ru:
        return 0.0
    return min(1.0, len(rx & ru) / math.sqrt(len(rx) * len(ru)))


def cf_directional_interest(x: str, y: str, snapshot: DatasetSnapshot) -> float:
    """Mean similarity of ``x`` to the users who messaged ``y``."""
    snapshot.require(x)
    snapshot.require(y)
    senders = sorted(snapshot.senders[y] - {x})
    if not senders:
        return 0.0
    memo = snapshot._memo.setdefault("cf-sim", {})
    total = 0.0
    for s in senders:
        key = (x, s) if x <= s else (s, x)
        if key not in memo:
            memo[key] = user_similarity(x, s, snapshot)
        total += memo[key]
    return total / len(senders)


def recommend_cf(x: str, count: int, snapshot: DatasetSnapshot) -> list[Recommendation]:
    """Rank candidates who have received at least one message by the harmonic mean of both CF interests."""
    snapshot.require(x)
    eligible = [y for y in fresh_candidates(x, snapshot) if snapshot.received_count[y] > 0]
    return rank(x, eligible, count, lambda a, b: cf_directional_interest(a, b, snapshot))
