import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from riskiness import NotConditionalGamble, ShapeMismatch, static_riskiness
from riskiness.gamble import DiscreteGamble
from riskiness.tree import (
    GambleTree, conditional_max_loss, conditional_riskiness, riskiness_process,
    time_consistency_check,
)
from riskiness.phi import phi

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def two_by_two(u1, d1, u2, d2, names=("state1", "state2")):
    return GambleTree.from_dict({
        "children": [
            {"p": 0.5, "name": names[0], "children": [{"p": 0.5, "payoff": u1}, {"p": 0.5, "payoff": d1}]},
            {"p": 0.5, "name": names[1], "children": [{"p": 0.5, "payoff": u2}, {"p": 0.5, "payoff": d2}]},
        ]
    })


@pytest.fixture
def x1():
    return two_by_two(600, -100, 1000, -200)


@pytest.fixture
def x2():
    return two_by_two(840, -105, 6000, -240)


def test_sample_files_match_fixtures(x1, x2):
    for name, t in (("tree_x1.json", x1), ("tree_x2.json", x2)):
        loaded = GambleTree.from_dict(json.loads((SAMPLES / name).read_text()))
        assert riskiness_process(loaded)["root"].rho == riskiness_process(t)["root"].rho


def test_max_loss(x1):
    assert conditional_max_loss(x1, "state1") == 100.0
    assert conditional_max_loss(x1, "root") == 200.0


def test_depth_one_values(x1, x2):
    for t, (a, b) in ((x1, (120, 250)), (x2, (120, 250))):
        assert conditional_riskiness(t, "state1").rho == pytest.approx(a, rel=1e-9)
        assert conditional_riskiness(t, "state2").rho == pytest.approx(b, rel=1e-9)


def test_roots(x1, x2):
    r1 = conditional_riskiness(x1, "root")
    r2 = conditional_riskiness(x2, "root")
    assert r1.rho == pytest.approx(219.426, abs=1e-2)
    assert r2.rho == pytest.approx(243.76, abs=1e-2)
    # same root as the flat four-outcome gamble
    flat = DiscreteGamble([600, -100, 1000, -200], [0.25] * 4)
    assert r1.rho == pytest.approx(static_riskiness(flat).rho, rel=1e-12)


def test_process(x1):
    proc = riskiness_process(x1)
    assert proc.horizon == 2
    assert {n.name for n in proc.at_depth(1)} == {"state1", "state2"}
    assert all(n.rho >= n.max_loss for n in proc.nodes.values())
    for n in proc.nodes.values():
        lam = 1.0 / n.rho
        law = DiscreteGamble(*x1.conditional_law(n.name))
        assert abs(phi(law, lam).value) <= 1e-10
    table = proc.table()
    assert "219.42" in table and "state2" in table


def test_one_period_tree():
    t = GambleTree.from_dict({"children": [{"p": 0.3, "payoff": -50}, {"p": 0.7, "payoff": 80}]})
    proc = riskiness_process(t)
    expected = static_riskiness(DiscreteGamble([-50, 80], [0.3, 0.7])).rho
    assert proc["root"].rho == expected


def test_identical_subtrees():
    proc = riskiness_process(two_by_two(300, -40, 300, -40))
    a, b = proc.at_depth(1)
    assert a.rho == b.rho


def test_counterexample_witnessed(x1, x2):
    rep = time_consistency_check(x1, x2)
    assert rep.violated
    w = [w for w in rep.witnesses if w.depth == 0]
    assert w and w[0].node == "root"
    assert w[0].rho_first == pytest.approx(219.426, abs=1e-2)
    assert w[0].rho_second == pytest.approx(243.76, abs=1e-2)


def test_identical_trees_consistent(x1):
    assert not time_consistency_check(x1, x1).violated


def test_scaled_tree_consistent(x1):
    assert not time_consistency_check(x1, x1.scaled(2.0)).violated


def test_shape_mismatch(x1):
    one = GambleTree.from_dict({"children": [{"p": 0.5, "payoff": -1}, {"p": 0.5, "payoff": 3}]})
    with pytest.raises(ShapeMismatch):
        time_consistency_check(x1, one)


def test_no_loss_node():
    t = two_by_two(600, -100, 50, 20)
    with pytest.raises(NotConditionalGamble):
        conditional_max_loss(t, "state2")
    with pytest.raises(NotConditionalGamble):
        riskiness_process(t)


@pytest.mark.parametrize(
    "spec",
    [
        {"children": [{"p": 0.5, "payoff": 1}, {"p": 0.4, "payoff": -1}]},
        {"children": [{"p": 0.5, "payoff": 1}, {"p": 0.5, "children": [{"p": 1.0, "payoff": -1}]}]},
        {"children": [{"payoff": 1}]},
        {"children": [{"p": 1.0, "payoff": 1, "children": []}]},
        {"children": [{"p": 1.0, "payoff": 1, "colour": "red"}]},
    ],
)
def test_malformed_trees(spec):
    with pytest.raises(ValueError):
        GambleTree.from_dict(spec)


def test_round_trip(x2):
    again = GambleTree.from_dict(json.loads(json.dumps(x2.to_dict())))
    assert again.to_dict() == x2.to_dict()


payoff = st.floats(1.0, 5000.0)


@given(payoff, payoff, payoff, payoff, st.floats(0.2, 20.0))
def test_nodewise_homogeneity(u1, d1, u2, d2, c):
    t = two_by_two(u1 + d1, -d1, u2 + d2, -d2)
    base, scaled = riskiness_process(t), riskiness_process(t.scaled(c))
    for name, node in base.nodes.items():
        assert scaled[name].rho == pytest.approx(c * node.rho, rel=1e-8)


@given(payoff, payoff, payoff, payoff, st.floats(1.0, 20.0))
def test_homogeneous_pairs_consistent(u1, d1, u2, d2, c):
    t = two_by_two(u1 + d1, -d1, u2 + d2, -d2)
    assert not time_consistency_check(t, t.scaled(c)).violated
