"""
Achievability: connecting trees in the message graph, spanning trees of the
message-connected leaf SCCs, and the pairwise XOR index code built from them.

    l* <= V_out(G) - (N_connected + N_tree)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from msic import gf2
from msic.config import Config
from msic.graphs import classify_all
from msic.models import (
    SCHEMA_VERSION,
    AlgorithmError,
    GraphPair,
    InstanceError,
    LeafClass,
    PreconditionError,
    ProblemInstance,
    RowKind,
)

logger = logging.getLogger(__name__)

EXACT = "exact"
GREEDY = "greedy"

Edge = Tuple[int, int]


@dataclass(frozen=True)
class ConnectingTree:
    vertices: FrozenSet[int]
    edges: Tuple[Edge, ...]

    def to_document(self) -> Dict:
        return {"vertices": sorted(self.vertices), "edges": [list(e) for e in self.edges]}


@dataclass
class CodeBlueprint:
    connecting_trees: List[ConnectingTree]
    scc_spanning_trees: List[ConnectingTree]
    uncoded: FrozenSet[int]

    @property
    def n_tree(self) -> int:
        return len(self.connecting_trees)

    @property
    def n_connected(self) -> int:
        return len(self.scc_spanning_trees)

    @property
    def length(self) -> int:
        return (
            sum(len(t.edges) for t in self.connecting_trees)
            + sum(len(t.edges) for t in self.scc_spanning_trees)
            + len(self.uncoded)
        )

    def to_document(self) -> Dict:
        return {
            "connecting_trees": [t.to_document() for t in self.connecting_trees],
            "scc_spanning_trees": [t.to_document() for t in self.scc_spanning_trees],
            "uncoded": sorted(self.uncoded),
            "length": self.length,
        }


@dataclass(frozen=True)
class CodeRow:
    sender: int
    vector: int
    kind: RowKind = RowKind.CUSTOM

    @property
    def support(self) -> List[int]:
        return gf2.support(self.vector)


@dataclass
class LinearIndexCode:
    num_messages: int
    rows: List[CodeRow] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.rows)

    @property
    def vectors(self) -> List[int]:
        return [row.vector for row in self.rows]

    def check_supports(self, inst: ProblemInstance):
        """Every row must be computable by its sender from the messages it knows"""
        if self.num_messages != inst.num_messages:
            raise PreconditionError(f"code is over {self.num_messages} messages, instance has {inst.num_messages}")
        for k, row in enumerate(self.rows):
            if not 1 <= row.sender <= inst.num_senders:
                raise PreconditionError(f"row {k}: sender {row.sender} does not exist")
            outside = set(row.support) - inst.senders[row.sender - 1]
            if outside:
                raise PreconditionError(f"row {k}: sender {row.sender} does not know messages {sorted(outside)}")

    def to_document(self) -> Dict:
        return {
            "schema": SCHEMA_VERSION,
            "num_messages": self.num_messages,
            "rows": [
                {"sender": row.sender, "coeffs": gf2.to_bits(row.vector, self.num_messages), "kind": row.kind.value}
                for row in self.rows
            ],
        }

    def __repr__(self):
        return f"<LinearIndexCode m={self.num_messages} length={self.length}>"


def code_from_document(document: Union[Dict, List], num_messages: Optional[int] = None) -> LinearIndexCode:
    """Accepts {"num_messages": m, "rows": [...]} or a bare list of rows"""
    if isinstance(document, dict):
        schema = document.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise InstanceError(f"unsupported schema version {schema!r}", "schema")
        rows_doc = document.get("rows")
        num_messages = document.get("num_messages", num_messages)
    else:
        rows_doc = document
    if not isinstance(rows_doc, list):
        raise InstanceError("expected a list of rows", "rows")

    rows = []
    for k, row_doc in enumerate(rows_doc):
        path = f"rows[{k}]"
        if not isinstance(row_doc, dict) or "sender" not in row_doc or "coeffs" not in row_doc:
            raise InstanceError("a row needs 'sender' and 'coeffs'", path)
        coeffs = row_doc["coeffs"]
        if not isinstance(coeffs, list):
            raise InstanceError("coeffs must be a list of bits", f"{path}.coeffs")
        if num_messages is None:
            num_messages = len(coeffs)
        if len(coeffs) != num_messages:
            raise InstanceError(f"expected {num_messages} coefficients, got {len(coeffs)}", f"{path}.coeffs")
        try:
            vector = gf2.from_bits(coeffs)
            kind = RowKind(row_doc.get("kind", RowKind.CUSTOM.value))
        except ValueError as e:
            raise InstanceError(str(e), path)
        sender = row_doc["sender"]
        if isinstance(sender, bool) or not isinstance(sender, int):
            raise InstanceError(f"expected an integer sender id, got {sender!r}", f"{path}.sender")
        rows.append(CodeRow(sender=sender, vector=vector, kind=kind))
    if num_messages is None:
        raise InstanceError("cannot infer num_messages from an empty code", "num_messages")
    return LinearIndexCode(num_messages=num_messages, rows=rows)


def encode(code: LinearIndexCode, messages: np.ndarray) -> np.ndarray:
    """Codewords for 0/1 message assignments, one assignment per row of `messages`"""
    messages = np.atleast_2d(np.asarray(messages, dtype=np.int64))
    rows = gf2.to_matrix(code.vectors, code.num_messages).astype(np.int64)
    return (messages @ rows.T) % 2


def sender_xor_code(inst: ProblemInstance) -> LinearIndexCode:
    """Each sender broadcasts the XOR of all messages it knows"""
    rows = [
        CodeRow(sender=s, vector=gf2.from_support(owned), kind=RowKind.CUSTOM)
        for s, owned in enumerate(inst.senders, start=1) if owned
    ]
    return LinearIndexCode(num_messages=inst.num_messages, rows=rows)


def spanning_tree(g: GraphPair, vertices: Iterable[int]) -> Tuple[Edge, ...]:
    """Kruskal over the edges of U[vertices] taken in lexicographic order"""
    vertices = set(vertices)
    forest = UnionFind(vertices)
    chosen = []
    for i, j in sorted(g.edges):
        if i in vertices and j in vertices and forest[i] != forest[j]:
            forest.union(i, j)
            chosen.append((i, j))
    if len(chosen) != len(vertices) - 1:
        raise PreconditionError(f"U restricted to {sorted(vertices)} is not connected")
    return tuple(chosen)


def _message_connected_vertices(g: GraphPair) -> Tuple[List[FrozenSet[int]], Set[int]]:
    connected = classify_all(g).leaf_sets(LeafClass.MESSAGE_CONNECTED)
    return connected, set().union(*connected) if connected else set()


def _eligible_closures(g: GraphPair) -> Tuple[Set[int], Dict[int, FrozenSet[int]]]:
    _, excluded = _message_connected_vertices(g)
    eligible = {v for v in g.non_leaves() if v not in excluded and v not in g.dummies}
    closures = {}
    for v in sorted(eligible):
        closure = frozenset(nx.descendants(g.g, v) | {v})
        if closure <= eligible:
            closures[v] = closure
    return eligible, closures


def candidate_tree_sets(g: GraphPair) -> List[FrozenSet[int]]:
    """
    Vertex sets that satisfy the connecting-tree properties: arc-closed, all
    non-leaf, outside message-connected leaf SCCs, and connected in U.
    """
    _, closures = _eligible_closures(g)
    seen: Set[FrozenSet[int]] = set(closures.values())
    frontier = list(seen)
    while frontier:
        current = frontier.pop()
        for v, closure in closures.items():
            if v in current:
                continue
            grown = current | closure
            if grown not in seen:
                seen.add(grown)
                frontier.append(grown)

    candidates = [s for s in seen if len(s) >= 2 and nx.is_connected(g.u.subgraph(s))]
    return sorted(candidates, key=lambda s: (len(s), sorted(s)))


def _touches(g: GraphPair, current: FrozenSet[int], closure: FrozenSet[int]) -> bool:
    return any(w in current for v in closure - current for w in g.u.neighbors(v))


def _greedy_tree_sets(g: GraphPair) -> List[FrozenSet[int]]:
    """
    Pairwise disjoint connecting-tree vertex sets grown one at a time: each
    seed closure absorbs the smallest closure adjacent to it in U until U
    restricted to the set is connected.
    """
    _, closures = _eligible_closures(g)
    ordered = sorted(set(closures.values()), key=lambda s: (len(s), sorted(s)))
    chosen: List[FrozenSet[int]] = []
    covered: Set[int] = set()
    for seed in ordered:
        if seed & covered:
            continue
        current = seed
        while not (len(current) >= 2 and nx.is_connected(g.u.subgraph(current))):
            grow = next(
                (c for c in ordered if not c <= current and not c & covered and _touches(g, current, c)),
                None,
            )
            if grow is None:
                break
            current = current | grow
        else:
            chosen.append(current)
            covered |= current
    return chosen


def _packing_key(chosen: Sequence[FrozenSet[int]], open_vertices: Set[int]) -> Tuple:
    covered = set().union(*chosen) if chosen else set()
    return (-len(chosen), len(covered), tuple(sorted(open_vertices - covered)))


def _exact_packing(candidates: List[FrozenSet[int]], open_vertices: Set[int]) -> List[FrozenSet[int]]:
    """
    Maximum number of pairwise disjoint candidates; ties go to the family
    covering fewest vertices, then to the one leaving the smallest uncoded set.
    """
    best: List = [_packing_key([], open_vertices), []]

    def visit(start: int, chosen: List[FrozenSet[int]], covered: FrozenSet[int]):
        key = _packing_key(chosen, open_vertices)
        if key < best[0]:
            best[0], best[1] = key, list(chosen)
        available = len(open_vertices - covered)
        if len(chosen) + available // 2 < -best[0][0]:
            return
        for k in range(start, len(candidates)):
            candidate = candidates[k]
            if candidate & covered:
                continue
            chosen.append(candidate)
            visit(k + 1, chosen, covered | candidate)
            chosen.pop()

    visit(0, [], frozenset())
    return best[1]


def find_connecting_trees(g: GraphPair, mode: str = EXACT, limit: Optional[int] = None) -> List[ConnectingTree]:
    if mode not in (EXACT, GREEDY):
        raise PreconditionError(f"unknown tree search mode {mode!r}")
    if limit is None:
        limit = Config.EXACT_TREE_LIMIT
    if mode == EXACT and g.n > limit:
        logger.warning(f"{g.n} vertices exceed the exact connecting-tree limit of {limit}; using greedy search")
        mode = GREEDY

    if mode == EXACT:
        open_vertices, _ = _eligible_closures(g)
        candidates = candidate_tree_sets(g)
        families = _exact_packing(candidates, open_vertices)
        logger.debug(f"Packed {len(families)} of {len(candidates)} candidate sets")
    else:
        families = _greedy_tree_sets(g)
    trees = [ConnectingTree(vertices=s, edges=spanning_tree(g, s)) for s in sorted(families, key=min)]
    logger.info(f"Found {len(trees)} connecting trees ({mode})")
    return trees


def plan_code(g: GraphPair, trees: Sequence[ConnectingTree]) -> CodeBlueprint:
    connected, excluded = _message_connected_vertices(g)
    used: Set[int] = set(excluded)
    for tree in trees:
        if tree.vertices & used:
            raise PreconditionError(
                f"connecting tree {sorted(tree.vertices)} overlaps another tree or a message-connected leaf SCC"
            )
        if any(w not in tree.vertices for v in tree.vertices for w in g.g.successors(v)):
            raise PreconditionError(f"connecting tree {sorted(tree.vertices)} has an arc leaving it")
        used |= tree.vertices

    scc_trees = [ConnectingTree(vertices=scc, edges=spanning_tree(g, scc)) for scc in connected]
    uncoded = frozenset(v for v in g.non_leaves() if v not in used and v not in g.dummies)
    blueprint = CodeBlueprint(connecting_trees=list(trees), scc_spanning_trees=scc_trees, uncoded=uncoded)

    expected = g.v_out() - (blueprint.n_connected + blueprint.n_tree)
    if blueprint.length != expected:
        raise AlgorithmError(f"blueprint length {blueprint.length} differs from V_out - (N_connected + N_tree) = {expected}")
    return blueprint


def _smallest_owner(inst: ProblemInstance, messages: Iterable[int]) -> int:
    messages = sorted(set(messages))
    owners = set(inst.message_owners(messages[0])).intersection(*(inst.message_owners(i) for i in messages[1:]))
    if owners:
        return min(owners)
    raise PreconditionError(f"no sender knows all of messages {sorted(messages)}")


def assign_senders(inst: ProblemInstance, blueprint: CodeBlueprint) -> LinearIndexCode:
    rows = []
    for trees, kind in ((blueprint.connecting_trees, RowKind.TREE_XOR), (blueprint.scc_spanning_trees, RowKind.SCC_XOR)):
        for tree in trees:
            for i, j in tree.edges:
                rows.append(CodeRow(sender=_smallest_owner(inst, (i, j)), vector=gf2.unit(i) ^ gf2.unit(j), kind=kind))
    for i in sorted(blueprint.uncoded):
        rows.append(CodeRow(sender=_smallest_owner(inst, (i,)), vector=gf2.unit(i), kind=RowKind.UNCODED))
    code = LinearIndexCode(num_messages=inst.num_messages, rows=rows)
    code.check_supports(inst)
    return code


def upper_bound(g: GraphPair, trees: Sequence[ConnectingTree], inst: Optional[ProblemInstance] = None) -> int:
    """V_out(G) - (N_connected + N_tree), cross-checked against the assigned code when inst is given"""
    blueprint = plan_code(g, trees)
    if inst is not None:
        rows = assign_senders(inst, blueprint).length
        if rows != blueprint.length:
            raise AlgorithmError(f"code has {rows} rows, blueprint promises {blueprint.length}")
    return blueprint.length
