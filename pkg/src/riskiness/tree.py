"""Conditional riskiness on finite event trees.

Every non-terminal node at depth s carries the conditional law of the time-t
payoff given the information at s: the leaf payoffs below it weighted by the
products of one-step probabilities. On a finite tree that law is a discrete
gamble, so the static solver applies node by node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Optional

import numpy as np

from .core import Regime, RiskinessResult, riskiness
from .errors import NotAGamble, NotConditionalGamble, ShapeMismatch
from .gamble import DiscreteGamble

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TreeNode:
    name: str
    prob: float = 1.0
    children: tuple["TreeNode", ...] = ()
    payoff: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _node_from_dict(d: Mapping[str, Any], name: str, is_root: bool) -> TreeNode:
    if not isinstance(d, Mapping):
        raise ValueError(f"node {name}: expected a JSON object")
    allowed = {"p", "children", "payoff", "name"}
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"node {name}: unknown field(s) {sorted(unknown)}")
    label = str(d.get("name", name))
    if "p" in d:
        prob = float(d["p"])
    elif is_root:
        prob = 1.0
    else:
        raise ValueError(f"node {label}: missing one-step probability 'p'")
    if ("children" in d) == ("payoff" in d):
        raise ValueError(f"node {label}: exactly one of 'children' or 'payoff' is required")
    if "payoff" in d:
        return TreeNode(label, prob, (), float(d["payoff"]))
    kids = d["children"]
    if not isinstance(kids, list) or not kids:
        raise ValueError(f"node {label}: 'children' must be a non-empty list")
    children = tuple(
        _node_from_dict(c, f"{label}.{i}", False) for i, c in enumerate(kids)
    )
    return TreeNode(label, prob, children, None)


def _node_to_dict(node: TreeNode, is_root: bool) -> dict[str, Any]:
    out: dict[str, Any] = {"name": node.name}
    if not is_root:
        out["p"] = node.prob
    if node.is_leaf:
        out["payoff"] = node.payoff
    else:
        out["children"] = [_node_to_dict(c, False) for c in node.children]
    return out


@dataclass(frozen=True)
class GambleTree:
    """Finite event tree; leaves all sit at the horizon and carry payoffs."""

    root: TreeNode
    horizon: int = field(init=False)

    def __post_init__(self):
        depths = set()
        names = set()
        for node, depth in self._walk():
            if node.name in names:
                raise ValueError(f"duplicate node name {node.name!r}")
            names.add(node.name)
            if node.is_leaf:
                if node.payoff is None or not math.isfinite(node.payoff):
                    raise ValueError(f"leaf {node.name}: payoff must be finite")
                depths.add(depth)
                continue
            probs = [c.prob for c in node.children]
            if any(not (0.0 < p <= 1.0) for p in probs):
                raise ValueError(f"node {node.name}: transition probabilities must lie in (0, 1]")
            if abs(math.fsum(probs) - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"node {node.name}: transition probabilities sum to {math.fsum(probs)!r}")
        if len(depths) != 1:
            raise ValueError(f"leaves must share one horizon, found depths {sorted(depths)}")
        horizon = depths.pop()
        if horizon < 1:
            raise ValueError("tree needs at least one period")
        object.__setattr__(self, "horizon", horizon)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "GambleTree":
        return cls(_node_from_dict(d, "root", True))

    def to_dict(self) -> dict[str, Any]:
        return _node_to_dict(self.root, True)

    def _walk(self) -> Iterator[tuple[TreeNode, int]]:
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            stack.extend((c, depth + 1) for c in reversed(node.children))

    def nodes_at_depth(self, depth: int) -> list[TreeNode]:
        return [n for n, d in self._walk() if d == depth]

    def node(self, name: str) -> TreeNode:
        for n, _ in self._walk():
            if n.name == name:
                return n
        raise KeyError(name)

    def depth_of(self, name: str) -> int:
        for n, d in self._walk():
            if n.name == name:
                return d
        raise KeyError(name)

    def conditional_law(self, node: TreeNode | str) -> tuple[np.ndarray, np.ndarray]:
        """Leaf payoffs under ``node`` and their conditional probabilities."""
        node = self.node(node) if isinstance(node, str) else node
        values, probs = [], []
        stack = [(node, 1.0)]
        while stack:
            n, w = stack.pop()
            if n.is_leaf:
                values.append(n.payoff)
                probs.append(w)
            else:
                stack.extend((c, w * c.prob) for c in reversed(n.children))
        return np.array(values), np.array(probs)

    def scaled(self, c: float) -> "GambleTree":
        def walk(n: TreeNode) -> TreeNode:
            if n.is_leaf:
                return TreeNode(n.name, n.prob, (), n.payoff * c)
            return TreeNode(n.name, n.prob, tuple(walk(k) for k in n.children), None)

        return GambleTree(walk(self.root))


def _resolve(tree: GambleTree, node: TreeNode | str) -> TreeNode:
    node = tree.node(node) if isinstance(node, str) else node
    if node.is_leaf:
        raise ValueError(f"node {node.name} is terminal; conditional riskiness needs depth < horizon")
    return node


def conditional_max_loss(tree: GambleTree, node: TreeNode | str) -> float:
    """Largest loss among the leaves reachable from ``node``."""
    node = _resolve(tree, node)
    values, _ = tree.conditional_law(node)
    loss = float(-values.min())
    if not loss > 0:
        raise NotConditionalGamble(node.name, "no loss is possible given this node")
    return loss


def conditional_gamble(tree: GambleTree, node: TreeNode | str) -> DiscreteGamble:
    node = _resolve(tree, node)
    values, probs = tree.conditional_law(node)
    # leaf weights are products of one-step probabilities; renormalize away rounding
    probs = probs / math.fsum(probs)
    return DiscreteGamble(values, probs)


def conditional_riskiness(tree: GambleTree, node: TreeNode | str) -> RiskinessResult:
    """rho_s at ``node``: root of E[log(1 + X_t/rho) | node], or L_s on the set B.

    A finite tree gives discrete conditional laws with an atom at -L_s, so the
    regime split is decided by the static solver and B is empty here.
    """
    node = _resolve(tree, node)
    g = conditional_gamble(tree, node)
    try:
        return riskiness(g)
    except NotAGamble as exc:
        raise NotConditionalGamble(node.name, exc.reason) from exc


@dataclass(frozen=True)
class NodeRiskiness:
    name: str
    depth: int
    rho: float
    regime: Regime
    max_loss: float
    residual: Optional[float]


@dataclass(frozen=True)
class RiskinessProcess:
    horizon: int
    nodes: dict[str, NodeRiskiness]

    def at_depth(self, depth: int) -> list[NodeRiskiness]:
        return [n for n in self.nodes.values() if n.depth == depth]

    def __getitem__(self, name: str) -> NodeRiskiness:
        return self.nodes[name]

    def table(self) -> str:
        lines = [f"{'depth':>5}  {'node':<16} {'rho':>22} {'max_loss':>14}  regime"]
        for depth in range(self.horizon):
            for n in self.at_depth(depth):
                lines.append(
                    f"{n.depth:>5}  {n.name:<16} {n.rho:>22.17g} {n.max_loss:>14.10g}  {n.regime.value}"
                )
        return "\n".join(lines)


def riskiness_process(tree: GambleTree) -> RiskinessProcess:
    """Conditional riskiness at every non-terminal node, depth by depth."""
    nodes: dict[str, NodeRiskiness] = {}
    for depth in range(tree.horizon):
        for node in tree.nodes_at_depth(depth):
            res = conditional_riskiness(tree, node)
            nodes[node.name] = NodeRiskiness(
                node.name, depth, res.rho, res.regime,
                conditional_max_loss(tree, node), res.residual,
            )
    return RiskinessProcess(tree.horizon, nodes)


@dataclass(frozen=True)
class Witness:
    depth: int
    node: str
    rho_first: float
    rho_second: float
    order: str  # "a>=b tomorrow" or "b>=a tomorrow"


@dataclass(frozen=True)
class ConsistencyReport:
    violated: bool
    witnesses: list[Witness]


def _same_shape(a: TreeNode, b: TreeNode) -> bool:
    if len(a.children) != len(b.children) or abs(a.prob - b.prob) > PROB_SUM_TOL:
        return False
    return all(_same_shape(x, y) for x, y in zip(a.children, b.children))


def time_consistency_check(
    tree_a: GambleTree, tree_b: GambleTree, rtol: float = 1e-9
) -> ConsistencyReport:
    """Look for a depth s where one tree is at least as risky at every node of
    depth s+1 but strictly less risky at some node of depth s."""
    if tree_a.horizon != tree_b.horizon or not _same_shape(tree_a.root, tree_b.root):
        raise ShapeMismatch("trees do not share the same filtration")
    pa, pb = riskiness_process(tree_a), riskiness_process(tree_b)

    def ordered(depth: int, first: RiskinessProcess, second: RiskinessProcess):
        return [
            (x, y) for x, y in zip(first.at_depth(depth), second.at_depth(depth))
        ]

    witnesses: list[Witness] = []
    for s in range(tree_a.horizon - 1):
        for label, first, second in (("a>=b tomorrow", pa, pb), ("b>=a tomorrow", pb, pa)):
            tomorrow = ordered(s + 1, first, second)
            if not all(x.rho >= y.rho * (1.0 - rtol) for x, y in tomorrow):
                continue
            for x, y in ordered(s, first, second):
                if x.rho < y.rho * (1.0 - rtol):
                    witnesses.append(Witness(s, x.name, x.rho, y.rho, label))
    return ConsistencyReport(bool(witnesses), witnesses)
