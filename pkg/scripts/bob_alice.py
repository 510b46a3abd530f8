"""Print both explanation methods for Bob and Alice on the bundled fixture.

Shows the case where the two methods disagree: Bob messaged non-smokers most
often, but slimness is what best separates the profiles he messaged from
those he only viewed.
"""

from recipx.cli import bundled_fixture
from recipx.explain import build_vectors, explain_pair, pearson, render
from recipx.model import load_dataset


def main():
    snap = load_dataset(bundled_fixture())
    alice = snap.users["alice"]
    print("Bob's message counts:", dict(snap.preference("bob").counts))
    for attr in snap.schema.ids:
        vec = build_vectors("bob", alice.value(attr), snap)
        print(f"  {attr}={alice.attributes[attr]}: viewed={len(vec.over)} messaged={sum(vec.m)} "
              f"carrying={sum(vec.s)} both={sum(a * b for a, b in zip(vec.m, vec.s))} r={pearson(vec.m, vec.s):+.5f}")
    for method in ("transparent", "correlation"):
        for style in ("full", "privacy"):
            print(f"\n[{method}, reciprocal, {style}]")
            print(render(explain_pair("bob", "alice", method, "reciprocal", snap), style), end="")


if __name__ == "__main__":
    main()
