"""
Strongly connected components of the information-flow digraph, groundedness,
m-neighbourhoods and the classification of leaf SCCs against the message graph.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

import networkx as nx

from msic.models import AlgorithmError, GraphPair, LeafClass, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegeneracyWitness:
    """(S', V_S'') pair proving that a semi leaf SCC is degenerated"""

    s_prime: FrozenSet[int]
    outside: FrozenSet[int]
    non_leaf: Optional[int] = None  # the single non-leaf member of `outside`, if any
    vacuous: bool = False  # S' has no m-neighbour at all

    def to_document(self) -> Dict:
        return {
            "s_prime": sorted(self.s_prime),
            "outside": sorted(self.outside),
            "non_leaf": self.non_leaf,
            "vacuous": self.vacuous,
        }


@dataclass
class SccReport:
    sccs: List[FrozenSet[int]]
    leaf_sccs: List[int]
    classes: Dict[int, LeafClass] = field(default_factory=dict)
    witnesses: Dict[int, DegeneracyWitness] = field(default_factory=dict)

    def leaf_sets(self, *wanted: LeafClass) -> List[FrozenSet[int]]:
        """Vertex sets of the leaf SCCs, optionally filtered by class"""
        return [
            self.sccs[k] for k in self.leaf_sccs
            if not wanted or self.classes.get(k) in wanted
        ]

    def count(self, cls: LeafClass) -> int:
        return sum(1 for k in self.leaf_sccs if self.classes.get(k) is cls)

    def to_document(self) -> Dict:
        table = []
        for k in self.leaf_sccs:
            row = {"vertices": sorted(self.sccs[k]), "class": self.classes[k].value if k in self.classes else None}
            if k in self.witnesses:
                row["witness"] = self.witnesses[k].to_document()
            table.append(row)
        return {"sccs": [sorted(scc) for scc in self.sccs], "leaf_sccs": table}


def _ordered(sets: Iterable[Iterable[int]]) -> List[FrozenSet[int]]:
    return sorted((frozenset(s) for s in sets), key=lambda s: min(s))


def is_leaf_scc(g: GraphPair, vs: FrozenSet[int]) -> bool:
    if len(vs) < 2:
        return False
    if any(w not in vs for v in vs for w in g.g.successors(v)):
        return False
    return nx.is_strongly_connected(g.g.subgraph(vs))


def scc_decompose(g: GraphPair) -> SccReport:
    sccs = _ordered(nx.strongly_connected_components(g.g))
    leaf_sccs = [k for k, scc in enumerate(sccs) if len(scc) >= 2 and not any(
        w not in scc for v in scc for w in g.g.successors(v)
    )]
    return SccReport(sccs=sccs, leaf_sccs=leaf_sccs)


def predecessors(g: GraphPair, i: int) -> Set[int]:
    """All j with a directed path j ~> i; i itself is included when it lies on a cycle"""
    ancestors = nx.ancestors(g.g, i)
    if ancestors & nx.descendants(g.g, i):
        ancestors.add(i)
    return ancestors


def grounded_set(g: GraphPair) -> Set[int]:
    grounded = g.leaves()
    for leaf in list(grounded):
        grounded |= nx.ancestors(g.g, leaf)
    return grounded


def condensation_is_grounded(g: GraphPair) -> bool:
    """Grounded iff the supergraph of SCCs has no leaf supernode"""
    supergraph = nx.condensation(g.g)
    for node, members in supergraph.nodes(data="members"):
        if len(members) >= 2 and supergraph.out_degree(node) == 0:
            return False
    return True


def is_grounded_digraph(g: GraphPair) -> bool:
    direct = grounded_set(g) == set(g.g.nodes)
    via_condensation = condensation_is_grounded(g)
    if direct != via_condensation:
        raise AlgorithmError(
            f"groundedness tests disagree on {g!r}: direct={direct}, condensation={via_condensation}"
        )
    return direct


def m_neighbors(g: GraphPair, vs: Iterable[int]) -> Set[int]:
    vs = set(vs)
    return {i for v in vs for i in g.u.neighbors(v) if i not in vs}


def message_components(g: GraphPair, scc: Iterable[int]) -> List[FrozenSet[int]]:
    """Connected components of U restricted to scc, ordered by smallest member"""
    return _ordered(nx.connected_components(g.u.subgraph(scc)))


def _is_message_connected(g: GraphPair, scc: FrozenSet[int]) -> bool:
    return nx.is_connected(g.u.subgraph(scc))


def _is_message_disconnected(g: GraphPair, scc: FrozenSet[int]) -> bool:
    # Paths may leave the SCC here, unlike the message-connected test
    anchor = next(iter(scc))
    reachable = nx.node_connected_component(g.u, anchor)
    return not scc <= reachable


def _covers(g: GraphPair, neighbours: Set[int], outside: Set[int]) -> bool:
    covered = set(outside)
    for v in outside:
        covered |= nx.ancestors(g.g, v)
    return neighbours <= covered


def iter_degeneracy_witnesses(g: GraphPair, scc: FrozenSet[int]) -> Iterator[DegeneracyWitness]:
    """
    All witnesses in search order: S' ranges over nonempty proper unions of the
    message components of the SCC (fewest components first), and V_S'' is every
    leaf outside the SCC plus at most one non-leaf w (no w first, then w ascending).
    Adding leaves to V_S'' never breaks a witness, so this loses none.
    """
    scc = frozenset(scc)
    components = message_components(g, scc)
    leaves = frozenset(v for v in g.leaves() if v not in scc)
    candidates = sorted(v for v in g.non_leaves() if v not in scc)

    for size in range(1, len(components)):
        for chosen in itertools.combinations(components, size):
            s_prime = frozenset().union(*chosen)
            neighbours = m_neighbors(g, s_prime)
            vacuous = not neighbours
            if _covers(g, neighbours, set(leaves)):
                yield DegeneracyWitness(s_prime, leaves, None, vacuous)
            for w in candidates:
                outside = leaves | {w}
                if _covers(g, neighbours, set(outside)):
                    yield DegeneracyWitness(s_prime, outside, w, vacuous)


def _require_leaf_scc(g: GraphPair, scc: FrozenSet[int]):
    if not is_leaf_scc(g, scc):
        raise PreconditionError(f"{sorted(scc)} is not a leaf SCC")


def _require_semi(g: GraphPair, scc: FrozenSet[int]):
    _require_leaf_scc(g, scc)
    if _is_message_connected(g, scc) or _is_message_disconnected(g, scc):
        raise PreconditionError(f"{sorted(scc)} is not a semi leaf SCC")


def is_degenerated(g: GraphPair, scc: Iterable[int]) -> Optional[DegeneracyWitness]:
    """First degeneracy witness of a semi leaf SCC, or None when it is not degenerated"""
    scc = frozenset(scc)
    _require_semi(g, scc)
    return next(iter_degeneracy_witnesses(g, scc), None)


def classify_leaf_scc(g: GraphPair, scc: Iterable[int]) -> Tuple[LeafClass, Optional[DegeneracyWitness]]:
    scc = frozenset(scc)
    _require_leaf_scc(g, scc)
    if _is_message_connected(g, scc):
        return LeafClass.MESSAGE_CONNECTED, None
    if _is_message_disconnected(g, scc):
        return LeafClass.MESSAGE_DISCONNECTED, None
    witness = next(iter_degeneracy_witnesses(g, scc), None)
    if witness is None:
        return LeafClass.SEMI_NON_DEGENERATED, None
    logger.debug(f"Leaf SCC {sorted(scc)} is degenerated, witness {witness.to_document()}")
    return LeafClass.SEMI_DEGENERATED, witness


def classify_all(g: GraphPair) -> SccReport:
    report = scc_decompose(g)
    for k in report.leaf_sccs:
        cls, witness = classify_leaf_scc(g, report.sccs[k])
        report.classes[k] = cls
        if witness is not None:
            report.witnesses[k] = witness
    return report
