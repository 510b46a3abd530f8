import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_snapshot, small_config
from recipx.cf import cf_directional_interest, recommend_cf, user_similarity
from recipx.model import generate_population
from recipx.recon import rank

N = ("never", "slim")


def snap_from(recipients):
    ids = set(recipients) | {r for rs in recipients.values() for r in rs}
    return make_snapshot({u: N for u in sorted(ids)}, [(s, r) for s, rs in recipients.items() for r in rs])


def cosine_oracle(snap, x, u):
    ids = sorted(snap.users)
    vx = np.array([float(i in snap.recipients[x]) for i in ids])
    vu = np.array([float(i in snap.recipients[u]) for i in ids])
    nx, nu = np.linalg.norm(vx), np.linalg.norm(vu)
    return 0.0 if nx == 0 or nu == 0 else float(vx @ vu / (nx * nu))


def test_similarity_examples():
    snap = snap_from({"x": ["a", "b"], "u": ["b", "c"], "v": ["a", "b"], "w": ["c", "d"]})
    assert user_similarity("x", "v", snap) == 1.0
    assert user_similarity("x", "w", snap) == 0.0
    assert user_similarity("x", "u", snap) == pytest.approx(0.5, abs=1e-15)
    assert user_similarity("x", "a", snap) == 0.0  # a never messaged


def test_directional_examples():
    snap = snap_from({"x": ["a", "b"], "s1": ["b", "y"], "s2": ["y"], "t": ["a", "b", "z"]})
    assert cf_directional_interest("x", "s1", snap) == 0.0  # nobody messaged s1
    assert cf_directional_interest("x", "y", snap) == pytest.approx(0.25, abs=1e-15)
    twin = snap_from({"x": ["a", "z"], "t": ["a", "z"]})
    assert cf_directional_interest("x", "z", twin) == 1.0


def test_no_received_messages_gives_empty():
    snap = make_snapshot({"x": N + ("m", "f"), "y": N + ("f", "m"), "z": N + ("f", "m")}, views=[("x", "y")])
    assert recommend_cf("x", 5, snap) == []


def test_single_eligible_candidate():
    snap = make_snapshot(
        {"x": N + ("m", "f"), "q": N + ("m", "f"), "y": N + ("f", "m"), "z": N + ("f", "m")},
        messages=[("q", "y")],
    )
    recs = recommend_cf("x", 5, snap)
    assert [r.recommended_id for r in recs] == ["y"]
    assert recs[0].score == 0.0


def test_balanced_beats_one_sided():
    table = {("x", "p"): 0.5, ("p", "x"): 0.5, ("x", "q"): 1.0, ("q", "x"): 0.0}
    recs = rank("x", ["q", "p"], 2, lambda a, b: table[(a, b)])
    assert [r.recommended_id for r in recs] == ["p", "q"]
    assert [r.score for r in recs] == [0.5, 0.0]


@given(seed=st.integers(0, 10**6))
def test_similarity_matches_oracle_and_is_symmetric(seed):
    snap = generate_population(small_config(14), seed)
    ids = sorted(snap.users)
    for x in ids:
        for u in ids:
            s = user_similarity(x, u, snap)
            assert 0.0 <= s <= 1.0
            assert s == user_similarity(u, x, snap)
            assert abs(s - cosine_oracle(snap, x, u)) <= 1e-12


@given(seed=st.integers(0, 10**6))
def test_recommend_cf_properties(seed):
    snap = generate_population(small_config(20), seed)
    for x in sorted(snap.users):
        recs = recommend_cf(x, 5, snap)
        assert recs == recommend_cf(x, 5, snap)
        for r in recs:
            assert snap.received_count[r.recommended_id] > 0
            assert 0.0 <= r.score <= 1.0
            fwd, bwd = r.directional
            assert fwd == cf_directional_interest(x, r.recommended_id, snap)
        keys = [(-r.score, r.recommended_id) for r in recs]
        assert keys == sorted(keys)


@given(seed=st.integers(0, 10**6))
def test_cf_reciprocal_symmetry(seed):
    from recipx.recon import harmonic

    snap = generate_population(small_config(14), seed)
    ids = sorted(snap.users)
    for x in ids:
        for y in ids:
            if x != y:
                a = harmonic(cf_directional_interest(x, y, snap), cf_directional_interest(y, x, snap))
                b = harmonic(cf_directional_interest(y, x, snap), cf_directional_interest(x, y, snap))
                assert abs(a - b) <= 1e-12
