"""Smoke test for the invlim extension. Run from the repository root."""
import os

import invlim

FIX = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def fixture(name):
    return os.path.join(FIX, name)


d = invlim.DirectedSet.powerset(2)
assert len(d) == 4
assert d.maximum() is not None
g = d.play_game(rounds=6, seed=3)
assert g["verdict"] in ("I-immediate", "I-provisional"), g

try:
    invlim.DirectedSet.load(fixture("not_directed_poset.json"))
    raise SystemExit("expected a ValueError")
except ValueError:
    pass

assert invlim.reduce_word("a.b.b^-1.a") == "a^2"

s = invlim.InverseSystem.restriction(2)
assert len(s.threads()) == 4
assert s.check_good(4, 4)["good"]

t = invlim.Tree.full_binary(4)
assert len(t.cofinal_branches()) == 8
assert len(t.inverse_system().threads()) == 8

collapse = invlim.InverseSystem.load(fixture("collapse_system.json"))
free = invlim.GroupSystem(collapse, "free")
x = free.element({"p": "c^2", "q": "a.b"})
assert free.stabilization_point(x) == ("q", 2)
dec = free.decompose(x)
assert [term["exp"] for term in dec["terms"]] == [1, 1], dec
y = free.recompose([(term["thread"], term["exp"]) for term in dec["terms"]])
assert free.equal(x, y)
assert free.equal(free.multiply(x, free.invert(x)), free.identity())
assert free.evaluate(x, "p") == "c^2"

ab = invlim.GroupSystem(collapse, "abelian")
z = ab.element({"p": "{c:1}", "q": "{a:2,b:-1}"})
assert [term["exp"] for term in ab.decompose(z)["terms"]] == [2, -1]

fg = invlim.FiniteGroupSystem.load(fixture("z4_z2_group.json"))
report = fg.verify_phi()
assert report["pass"], report
assert fg.limit_size == report["limit_size"]

print("smoke test passed")
