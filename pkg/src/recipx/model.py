"""Domain types, dataset ingestion and synthetic population generation."""

from __future__ import annotations

import bisect
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple

import numpy as np

FORMAT_VERSION = 1
CATEGORICAL = "categorical"
BUCKETED = "bucketed-numeric"


class DatasetError(ValueError):
    """Base class for invalid datasets and bad lookups against them."""


class ParseError(DatasetError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class SchemaViolation(DatasetError):
    pass


class ReferentialViolation(DatasetError):
    pass


class DuplicateUserError(DatasetError):
    def __init__(self, user_id: str):
        super().__init__(f"duplicate user-id {user_id!r}")
        self.user_id = user_id


class UnknownUserError(DatasetError, LookupError):
    def __init__(self, user_id: str):
        super().__init__(f"unknown user-id {user_id!r}")
        self.user_id = user_id


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeSpec:
    """One profile attribute and its allowed (discretized) values.

    Bucketed-numeric attributes carry ``len(values) - 1`` strictly increasing
    cut-points; bucket ``i`` covers ``[bounds[i-1], bounds[i])``.
    """

    id: str
    kind: str
    values: tuple[str, ...]
    bounds: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.values:
            raise SchemaViolation(f"attribute {self.id!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise SchemaViolation(f"attribute {self.id!r} has duplicate value-ids")
        if self.kind == CATEGORICAL:
            if self.bounds is not None:
                raise SchemaViolation(f"categorical attribute {self.id!r} cannot have bounds")
        elif self.kind == BUCKETED:
            if self.bounds is None or len(self.bounds) != len(self.values) - 1:
                raise SchemaViolation(
                    f"bucketed attribute {self.id!r} needs {len(self.values) - 1} cut-points"
                )
            if any(not math.isfinite(b) for b in self.bounds):
                raise SchemaViolation(f"attribute {self.id!r} has non-finite cut-points")
            if any(lo >= hi for lo, hi in zip(self.bounds, self.bounds[1:])):
                raise SchemaViolation(f"cut-points of {self.id!r} are not strictly increasing")
        else:
            raise SchemaViolation(f"attribute {self.id!r} has unknown kind {self.kind!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "kind": self.kind, "values": list(self.values)}
        if self.bounds is not None:
            out["bounds"] = list(self.bounds)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> AttributeSpec:
        bounds = data.get("bounds")
        return cls(
            id=str(data["id"]),
            kind=str(data["kind"]),
            values=tuple(str(v) for v in data["values"]),
            bounds=None if bounds is None else tuple(float(b) for b in bounds),
        )


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple[AttributeSpec, ...]

    def __post_init__(self) -> None:
        ids = [a.id for a in self.attributes]
        if len(set(ids)) != len(ids):
            raise SchemaViolation("attribute-ids must be unique")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.attributes)

    def __len__(self) -> int:
        return len(self.attributes)

    def get(self, attribute_id: str) -> AttributeSpec:
        for spec in self.attributes:
            if spec.id == attribute_id:
                return spec
        raise SchemaViolation(f"unknown attribute {attribute_id!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"attributes": [a.to_dict() for a in self.attributes]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> AttributeSchema:
        return cls(tuple(AttributeSpec.from_dict(a) for a in data["attributes"]))


class AttributeValue(NamedTuple):
    attribute: str
    value: str


class Event(NamedTuple):
    """A view or message from ``source`` to ``target`` at ordinal time ``t``."""

    source: str
    target: str
    t: int


def discretize(schema: AttributeSchema, attribute_id: str, raw: float) -> AttributeValue:
    """Map a raw number onto its half-open, lower-inclusive bucket."""
    spec = schema.get(attribute_id)
    if spec.kind != BUCKETED:
        raise SchemaViolation(f"attribute {attribute_id!r} is not bucketed-numeric")
    if not math.isfinite(raw):
        raise ValueError(f"cannot discretize non-finite value {raw!r}")
    assert spec.bounds is not None
    return AttributeValue(attribute_id, spec.values[bisect.bisect_right(spec.bounds, raw)])


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    attributes: Mapping[str, str]
    gender: str | None = None
    seek: str | None = None

    def value(self, attribute_id: str) -> AttributeValue:
        return AttributeValue(attribute_id, self.attributes[attribute_id])

    def carries(self, av: AttributeValue) -> bool:
        return self.attributes.get(av.attribute) == av.value


@dataclass(frozen=True)
class PreferenceModel:
    """Per-attribute message counts by recipient value (zero counts omitted)."""

    user_id: str
    counts: Mapping[str, Mapping[str, int]]
    total_messages: int

    def count(self, attribute_id: str, value_id: str) -> int:
        return self.counts.get(attribute_id, {}).get(value_id, 0)


@dataclass(frozen=True)
class InteractionLog:
    views: tuple[Event, ...] = ()
    messages: tuple[Event, ...] = ()


def _validate(schema: AttributeSchema, users: Mapping[str, UserProfile], log: InteractionLog) -> None:
    for uid, profile in users.items():
        if uid != profile.user_id:
            raise DatasetError(f"user map key {uid!r} does not match profile id {profile.user_id!r}")
        missing = set(schema.ids) - set(profile.attributes)
        if missing:
            raise SchemaViolation(f"user {uid!r} is missing attributes {sorted(missing)}")
        for attr, value in profile.attributes.items():
            spec = schema.get(attr)
            if value not in spec.values:
                raise SchemaViolation(f"user {uid!r}: {value!r} is not a value of {attr!r}")

    first_view: dict[tuple[str, str], int] = {}
    for kind, events in (("view", log.views), ("message", log.messages)):
        for ev in events:
            for end in (ev.source, ev.target):
                if end not in users:
                    raise ReferentialViolation(f"{kind} {ev.source}->{ev.target} references unknown user {end!r}")
            if ev.source == ev.target:
                raise ReferentialViolation(f"self-{kind} by {ev.source!r}")
            if kind == "view":
                key = (ev.source, ev.target)
                first_view[key] = min(ev.t, first_view.get(key, ev.t))
    for ev in log.messages:
        seen = first_view.get((ev.source, ev.target))
        if seen is None or seen > ev.t:
            raise ReferentialViolation(
                f"message {ev.source}->{ev.target} at t={ev.t} has no earlier view"
            )


@dataclass(frozen=True)
class DatasetSnapshot:
    """Validated, immutable dataset with derived preference models.

    ``preferences`` is recomputed from the log when not supplied.
    """

    schema: AttributeSchema
    users: Mapping[str, UserProfile]
    log: InteractionLog = field(default_factory=InteractionLog)
    preferences: Mapping[str, PreferenceModel] | None = None
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        _validate(self.schema, self.users, self.log)
        derived = {uid: _derive(uid, self) for uid in self.users}
        if self.preferences is not None and dict(self.preferences) != derived:
            raise DatasetError("supplied preferences disagree with the interaction log")
        object.__setattr__(self, "preferences", derived)

    def require(self, user_id: str) -> UserProfile:
        try:
            return self.users[user_id]
        except KeyError:
            raise UnknownUserError(user_id) from None

    def preference(self, user_id: str) -> PreferenceModel:
        self.require(user_id)
        assert self.preferences is not None
        return self.preferences[user_id]

    @cached_property
    def sent(self) -> Mapping[str, tuple[str, ...]]:
        """Recipients of every message event, per sender (duplicates kept)."""
        out: dict[str, list[str]] = defaultdict(list)
        for ev in self.log.messages:
            out[ev.source].append(ev.target)
        return {uid: tuple(out.get(uid, ())) for uid in self.users}

    @cached_property
    def recipients(self) -> Mapping[str, frozenset[str]]:
        return {uid: frozenset(r) for uid, r in self.sent.items()}

    @cached_property
    def senders(self) -> Mapping[str, frozenset[str]]:
        out: dict[str, set[str]] = defaultdict(set)
        for ev in self.log.messages:
            out[ev.target].add(ev.source)
        return {uid: frozenset(out.get(uid, ())) for uid in self.users}

    @cached_property
    def received_count(self) -> Mapping[str, int]:
        c = Counter(ev.target for ev in self.log.messages)
        return {uid: c.get(uid, 0) for uid in self.users}

    @cached_property
    def viewed(self) -> Mapping[str, tuple[str, ...]]:
        """Distinct users each user has viewed, sorted by user-id."""
        out: dict[str, set[str]] = defaultdict(set)
        for ev in self.log.views:
            out[ev.source].add(ev.target)
        return {uid: tuple(sorted(out.get(uid, ()))) for uid in self.users}

    def pool(self, user_id: str) -> tuple[str, ...]:
        """Candidate counterparts for ``user_id`` under gender/seek filtering, sorted."""
        x = self.require(user_id)
        out = []
        for uid in sorted(self.users):
            if uid == user_id:
                continue
            y = self.users[uid]
            if x.seek is not None and y.gender != x.seek:
                continue
            if y.seek is not None and x.gender is not None and y.seek != x.gender:
                continue
            out.append(uid)
        return tuple(out)


def _derive(user_id: str, snapshot: DatasetSnapshot) -> PreferenceModel:
    counts: dict[str, Counter] = {a: Counter() for a in snapshot.schema.ids}
    total = 0
    for ev in snapshot.log.messages:
        if ev.source != user_id:
            continue
        total += 1
        recipient = snapshot.users[ev.target]
        for a in counts:
            counts[a][recipient.attributes[a]] += 1
    return PreferenceModel(user_id, {a: dict(sorted(c.items())) for a, c in counts.items()}, total)


def derive_preferences(user_id: str, snapshot: DatasetSnapshot) -> PreferenceModel:
    """Count messages sent by ``user_id`` per recipient attribute value."""
    snapshot.require(user_id)
    return _derive(user_id, snapshot)


# -- JSON-lines file format ------------------------------------------------


def _records(snapshot: DatasetSnapshot) -> Iterable[dict[str, Any]]:
    yield {"kind": "header", "format-version": FORMAT_VERSION}
    yield {"kind": "schema", **snapshot.schema.to_dict()}
    for profile in snapshot.users.values():
        rec: dict[str, Any] = {"kind": "user", "id": profile.user_id}
        if profile.gender is not None:
            rec["gender"] = profile.gender
        if profile.seek is not None:
            rec["seek"] = profile.seek
        rec["attributes"] = dict(profile.attributes)
        yield rec
    for ev in snapshot.log.views:
        yield {"kind": "view", "viewer": ev.source, "viewed": ev.target, "t": ev.t}
    for ev in snapshot.log.messages:
        yield {"kind": "message", "sender": ev.source, "recipient": ev.target, "t": ev.t}


def dumps(snapshot: DatasetSnapshot) -> str:
    return "".join(
        json.dumps(rec, ensure_ascii=False, separators=(",", ":")) + "\n" for rec in _records(snapshot)
    )


def store_dataset(snapshot: DatasetSnapshot, path: str | Path) -> None:
    Path(path).write_text(dumps(snapshot), encoding="utf-8")


def _event(rec: Mapping[str, Any], src: str, dst: str, line: int) -> Event:
    try:
        source, target, t = rec[src], rec[dst], rec["t"]
    except KeyError as e:
        raise ParseError(line, f"missing field {e.args[0]!r}") from None
    if not isinstance(source, str) or not isinstance(target, str):
        raise ParseError(line, "user references must be strings")
    if not isinstance(t, int) or isinstance(t, bool):
        raise ParseError(line, "ordinal timestamp must be an integer")
    return Event(source, target, t)


def _user(rec: Mapping[str, Any], schema: AttributeSchema, line: int) -> UserProfile:
    uid = rec.get("id")
    attrs = rec.get("attributes")
    if not isinstance(uid, str) or not isinstance(attrs, dict):
        raise ParseError(line, "user record needs string 'id' and object 'attributes'")
    values: dict[str, str] = {}
    for attr, raw in attrs.items():
        try:
            spec = schema.get(attr)
        except SchemaViolation as e:
            raise SchemaViolation(f"line {line}: {e}") from None
        if isinstance(raw, (int, float)) and not isinstance(raw, bool) and spec.kind == BUCKETED:
            values[attr] = discretize(schema, attr, float(raw)).value
        elif isinstance(raw, str):
            values[attr] = raw
        else:
            raise ParseError(line, f"bad value for attribute {attr!r}: {raw!r}")
    # keep schema order so round-trips are byte-stable
    ordered = {a: values[a] for a in schema.ids if a in values}
    ordered.update({a: v for a, v in values.items() if a not in ordered})
    return UserProfile(uid, ordered, rec.get("gender"), rec.get("seek"))


def loads(text: str) -> DatasetSnapshot:
    schema: AttributeSchema | None = None
    users: dict[str, UserProfile] = {}
    views: list[Event] = []
    messages: list[Event] = []
    header_seen = False
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(line_no, f"malformed JSON ({e.msg})") from None
        if not isinstance(rec, dict):
            raise ParseError(line_no, "record must be a JSON object")
        kind = rec.get("kind")
        if not header_seen:
            if kind != "header":
                raise ParseError(line_no, "first record must be the header")
            if rec.get("format-version") != FORMAT_VERSION:
                raise ParseError(line_no, f"unsupported format-version {rec.get('format-version')!r}")
            header_seen = True
            continue
        if kind == "schema":
            if schema is not None:
                raise ParseError(line_no, "more than one schema record")
            try:
                schema = AttributeSchema.from_dict(rec)
            except (KeyError, TypeError, ValueError) as e:
                if isinstance(e, SchemaViolation):
                    raise SchemaViolation(f"line {line_no}: {e}") from None
                raise ParseError(line_no, f"bad schema record ({e})") from None
        elif kind == "user":
            if schema is None:
                raise ParseError(line_no, "user record before schema record")
            profile = _user(rec, schema, line_no)
            if profile.user_id in users:
                raise DuplicateUserError(profile.user_id)
            users[profile.user_id] = profile
        elif kind == "view":
            views.append(_event(rec, "viewer", "viewed", line_no))
        elif kind == "message":
            messages.append(_event(rec, "sender", "recipient", line_no))
        else:
            raise ParseError(line_no, f"unknown record kind {kind!r}")
    if not header_seen:
        raise ParseError(1, "empty dataset (header required)")
    if schema is None:
        raise ParseError(line_no, "no schema record")
    return DatasetSnapshot(schema, users, InteractionLog(tuple(views), tuple(messages)))


def load_dataset(path: str | Path) -> DatasetSnapshot:
    """Load and validate a JSON-lines dataset; any violation rejects the whole file."""
    return loads(Path(path).read_text(encoding="utf-8"))


# -- synthetic populations -------------------------------------------------


def default_schema() -> AttributeSchema:
    """Illustrative five-attribute dating-profile schema."""
    return AttributeSchema((
        AttributeSpec("age", BUCKETED, ("under-25", "25-34", "35-plus"), (25.0, 35.0)),
        AttributeSpec("smoke", CATEGORICAL, ("regularly", "occasionally", "never")),
        AttributeSpec("body-type", CATEGORICAL, ("slim", "average", "athletic", "curvy")),
        AttributeSpec("occupation", CATEGORICAL, ("student", "professional", "service", "creative", "technical")),
        AttributeSpec("education", CATEGORICAL, ("high-school", "bachelor", "master", "doctorate")),
    ))


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for :func:`generate_population`.

    ``concentration`` is the Dirichlet parameter of each archetype's
    per-attribute taste; smaller values give sharper preferences.
    """

    n_users: int = 118
    schema: AttributeSchema = field(default_factory=default_schema)
    n_archetypes: int = 4
    messages_range: tuple[int, int] = (8, 16)
    views_range: tuple[int, int] = (40, 60)
    concentration: float = 0.5

    def validate(self) -> None:
        if self.n_users < 2:
            raise ConfigError(f"n-users must be >= 2 (got {self.n_users})")
        if len(self.schema) == 0:
            raise ConfigError("schema must define at least one attribute")
        if self.n_archetypes < 1:
            raise ConfigError("need at least one preference archetype")
        for name, (lo, hi) in (("messages", self.messages_range), ("views", self.views_range)):
            if lo < 0 or hi < lo:
                raise ConfigError(f"{name} range must satisfy 0 <= lo <= hi (got {lo}, {hi})")
        if self.concentration <= 0:
            raise ConfigError("concentration must be positive")


def generate_population(config: SynthConfig, seed: int) -> DatasetSnapshot:
    """Seeded two-pool population whose messaging follows latent taste archetypes."""
    config.validate()
    rng = np.random.default_rng(seed)
    schema = config.schema
    width = max(3, len(str(config.n_users - 1)))
    ids = [f"u{i:0{width}d}" for i in range(config.n_users)]

    value_idx = np.empty((config.n_users, len(schema)), dtype=np.int64)
    users: dict[str, UserProfile] = {}
    for i, uid in enumerate(ids):
        attrs = {}
        for j, spec in enumerate(schema.attributes):
            if spec.kind == BUCKETED:
                assert spec.bounds is not None
                span = spec.bounds[-1] - spec.bounds[0] or 1.0
                raw = rng.uniform(spec.bounds[0] - span, spec.bounds[-1] + span)
                value = discretize(schema, spec.id, raw).value
            else:
                value = spec.values[rng.integers(len(spec.values))]
            attrs[spec.id] = value
            value_idx[i, j] = spec.values.index(value)
        gender, seek = ("female", "male") if i % 2 == 0 else ("male", "female")
        users[uid] = UserProfile(uid, attrs, gender, seek)

    archetypes = [
        [rng.dirichlet(np.full(len(spec.values), config.concentration)) for spec in schema.attributes]
        for _ in range(config.n_archetypes)
    ]
    membership = rng.integers(config.n_archetypes, size=config.n_users)

    views: list[Event] = []
    messages: list[Event] = []
    t = 0
    for i, uid in enumerate(ids):
        pool = np.array([k for k in range(config.n_users) if k % 2 != i % 2])
        n_views = min(int(rng.integers(config.views_range[0], config.views_range[1] + 1)), len(pool))
        n_msgs = min(int(rng.integers(config.messages_range[0], config.messages_range[1] + 1)), n_views)
        seen = rng.choice(pool, size=n_views, replace=False)
        taste = archetypes[membership[i]]
        weights = np.ones(n_views)
        for j in range(len(schema)):
            weights *= taste[j][value_idx[seen, j]]
        weights = np.maximum(weights, 1e-12)
        chosen = rng.choice(seen, size=n_msgs, replace=False, p=weights / weights.sum())
        for k in seen:
            t += 1
            views.append(Event(uid, ids[k], t))
        for k in chosen:
            t += 1
            messages.append(Event(uid, ids[k], t))
    return DatasetSnapshot(schema, users, InteractionLog(tuple(views), tuple(messages)))
