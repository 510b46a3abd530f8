import pytest
from hypothesis import HealthCheck, settings

from recipx.cli import bundled_fixture
from recipx.model import AttributeSchema, SynthConfig, default_schema, generate_population, load_dataset

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# smoke + body-type, the two attributes of the worked example
TWO_ATTR = AttributeSchema(default_schema().attributes[1:3])


@pytest.fixture(scope="session")
def bob():
    return load_dataset(bundled_fixture())


@pytest.fixture(scope="session")
def small_pop():
    return generate_population(SynthConfig(n_users=40, views_range=(8, 15), messages_range=(2, 6)), seed=3)


@pytest.fixture(scope="session")
def pop118():
    return generate_population(SynthConfig(), seed=7)


def small_config(n: int = 30) -> SynthConfig:
    return SynthConfig(n_users=n, views_range=(5, 12), messages_range=(0, 5))


def make_snapshot(profiles, messages=(), views=(), schema=TWO_ATTR):
    """Hand-built snapshot; every message gets an implicit view one tick earlier.

    ``profiles`` maps user-id to (smoke, body-type[, gender, seek]).
    """
    from recipx.model import DatasetSnapshot, Event, InteractionLog, UserProfile

    users = {}
    for uid, spec in profiles.items():
        smoke, body, *rest = spec
        gender, seek = (rest + [None, None])[:2]
        users[uid] = UserProfile(uid, {"smoke": smoke, "body-type": body}, gender, seek)
    evs_v, evs_m = [], []
    t = 0
    for src, dst in views:
        t += 1
        evs_v.append(Event(src, dst, t))
    for src, dst in messages:
        t += 2
        evs_v.append(Event(src, dst, t - 1))
        evs_m.append(Event(src, dst, t))
    return DatasetSnapshot(schema, users, InteractionLog(tuple(evs_v), tuple(evs_m)))


ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{outcome}] criterion {number:>2}: {title}")
