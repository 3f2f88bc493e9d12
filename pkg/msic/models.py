"""
Problem instances of the multi-sender uniprior multicast index coding problem
and the graph pair derived from them.

Receivers and messages share the index space 1..m: receiver r knows exactly
message r a priori, so K_r = {r} is structural and never stored.
"""

import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

Arc = Tuple[int, int]
Edge = Tuple[int, int]


# Enums shared across the pipeline
class LeafClass(Enum):
    MESSAGE_CONNECTED = "message-connected"
    MESSAGE_DISCONNECTED = "message-disconnected"
    SEMI_DEGENERATED = "semi-degenerated"
    SEMI_NON_DEGENERATED = "semi-non-degenerated"

    @property
    def is_semi(self):
        return self in (LeafClass.SEMI_DEGENERATED, LeafClass.SEMI_NON_DEGENERATED)


class StepKind(Enum):
    PRUNE = "i"
    APPEND_DUMMY = "ii"
    ARC_TO_NON_LEAF = "iii-a"
    ARC_TO_LEAF = "iii-b"
    PRUNE_ONE = "iv-0"
    SELECT_SEMI = "iv-a"
    CONNECT_SEMI = "iv-b"
    BREAK_AGAIN = "iv-c"


class RowKind(Enum):
    TREE_XOR = "tree-xor"
    SCC_XOR = "scc-xor"
    UNCODED = "uncoded"
    CUSTOM = "custom"


# Exceptions
class MsicError(Exception):
    """Base class for all errors raised by this package"""


class InstanceError(MsicError, ValueError):
    """A document does not describe a valid instance (or code)"""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(MsicError, ValueError):
    """An operation was called on a state that violates its precondition"""


class GuardError(MsicError):
    """The instance is too large for a brute-force routine"""


class AlgorithmError(MsicError, AssertionError):
    """An internal identity did not hold; signals a bug, never bad input"""


@dataclass(frozen=True)
class ProblemInstance:
    num_messages: int
    senders: Tuple[FrozenSet[int], ...]
    wants: Tuple[FrozenSet[int], ...]
    simplified: bool = False

    def __post_init__(self):
        if len(self.wants) != self.num_messages:
            raise InstanceError(f"expected {self.num_messages} want sets, got {len(self.wants)}", "wants")
        for r, wanted in enumerate(self.wants, start=1):
            if r in wanted:
                raise InstanceError(f"receiver {r} wants its own message", f"wants[{r - 1}]")

    @property
    def num_receivers(self) -> int:
        return self.num_messages

    @property
    def num_senders(self) -> int:
        return len(self.senders)

    @property
    def messages(self) -> range:
        return range(1, self.num_messages + 1)

    def owned_messages(self) -> FrozenSet[int]:
        return frozenset().union(*self.senders) if self.senders else frozenset()

    def wanted_messages(self) -> FrozenSet[int]:
        return frozenset().union(*self.wants) if self.wants else frozenset()

    def message_owners(self, i: int) -> Tuple[int, ...]:
        """1-based ids of the senders that know message i"""
        return tuple(s for s, owned in enumerate(self.senders, start=1) if i in owned)

    def is_partitioned(self) -> bool:
        seen: Set[int] = set()
        for owned in self.senders:
            if seen & owned:
                return False
            seen |= owned
        return True

    def to_document(self) -> Dict:
        return {
            "schema": SCHEMA_VERSION,
            "num_messages": self.num_messages,
            "senders": [sorted(owned) for owned in self.senders],
            "wants": [sorted(wanted) for wanted in self.wants],
        }

    def summary(self) -> Dict:
        return {
            "num_messages": self.num_messages,
            "num_senders": self.num_senders,
            "simplified": self.simplified,
            "partitioned": self.is_partitioned(),
        }

    def __repr__(self):
        return f"<ProblemInstance m={self.num_messages} S={self.num_senders}>"


class GraphPair:
    """
    Information-flow digraph G (arc i->j iff receiver j wants x_i) and message
    graph U (edge i-j iff some sender knows both) over the shared vertex set.

    Dummy vertices appended while breaking leaf SCCs are tagged; they carry no message
    and never count towards V_out.
    """

    def __init__(self, n: int, arcs: Iterable[Arc] = (), edges: Iterable[Edge] = (), dummies: Iterable[int] = ()):
        self.g = nx.DiGraph()
        self.u = nx.Graph()
        self.g.add_nodes_from(range(1, n + 1))
        self.u.add_nodes_from(range(1, n + 1))
        self.dummies: Set[int] = set(dummies)
        for i, j in arcs:
            self.add_arc(i, j)
        for i, j in edges:
            self.add_edge(i, j)

    # Read access
    @property
    def n(self) -> int:
        return self.g.number_of_nodes()

    @property
    def vertices(self) -> List[int]:
        return sorted(self.g.nodes)

    @property
    def arcs(self) -> FrozenSet[Arc]:
        return frozenset(self.g.edges)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return frozenset((min(i, j), max(i, j)) for i, j in self.u.edges)

    def out_neighbors(self, v: int) -> Set[int]:
        return set(self.g.successors(v))

    def is_leaf(self, v: int) -> bool:
        return self.g.out_degree(v) == 0

    def leaves(self) -> Set[int]:
        return {v for v in self.g.nodes if self.is_leaf(v)}

    def non_leaves(self) -> Set[int]:
        return {v for v in self.g.nodes if not self.is_leaf(v)}

    def v_out(self) -> int:
        """Number of non-leaf vertices, dummies excluded"""
        return sum(1 for v in self.g.nodes if v not in self.dummies and not self.is_leaf(v))

    # Mutation, used only on private working copies
    def add_arc(self, i: int, j: int):
        if i == j:
            raise PreconditionError(f"self-loop arc on vertex {i}")
        if i not in self.g or j not in self.g:
            raise PreconditionError(f"arc ({i}->{j}) leaves the vertex set 1..{self.n}")
        self.g.add_edge(i, j)

    def add_edge(self, i: int, j: int):
        if i == j:
            raise PreconditionError(f"self-loop edge on vertex {i}")
        if i not in self.u or j not in self.u:
            raise PreconditionError(f"edge ({i},{j}) leaves the vertex set 1..{self.n}")
        self.u.add_edge(i, j)

    def remove_out_arcs(self, v: int) -> List[Arc]:
        removed = sorted((v, w) for w in self.g.successors(v))
        self.g.remove_edges_from(removed)
        return removed

    def add_dummy(self) -> int:
        vertex = self.n + 1
        self.g.add_node(vertex)
        self.u.add_node(vertex)
        self.dummies.add(vertex)
        return vertex

    def copy(self) -> "GraphPair":
        return GraphPair(self.n, self.arcs, self.edges, self.dummies)

    def canonical(self) -> Tuple:
        """Hashable key identifying the state"""
        return (self.n, tuple(sorted(self.arcs)), tuple(sorted(self.edges)), tuple(sorted(self.dummies)))

    def __eq__(self, other):
        return isinstance(other, GraphPair) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"<GraphPair n={self.n} arcs={len(self.arcs)} edges={len(self.edges)} dummies={len(self.dummies)}>"


def _require_int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"expected an integer, got {value!r}", path)
    return value


def _require_list(value, path):
    if not isinstance(value, list):
        raise InstanceError(f"expected a list, got {type(value).__name__}", path)
    return value


def _index_set(values, m, path):
    indices = set()
    for k, value in enumerate(_require_list(values, path)):
        index = _require_int(value, f"{path}[{k}]")
        if index < 1 or index > m:
            raise InstanceError(f"index {index} out of range 1..{m}", f"{path}[{k}]")
        indices.add(index)
    return frozenset(indices)


def parse_instance(text: Union[str, bytes, Dict]) -> ProblemInstance:
    """
    Parse and validate an instance document:
    {"num_messages": int, "senders": [[int, ...], ...], "wants": [[int, ...], ...]}
    Indices are 1-based; wants[k] is the want set of receiver k+1.
    """
    if isinstance(text, (str, bytes)):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise InstanceError(f"not valid JSON: {e}")
    else:
        document = text

    if not isinstance(document, dict):
        raise InstanceError("document must be a JSON object")
    schema = document.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise InstanceError(f"unsupported schema version {schema!r}", "schema")
    for key in ("num_messages", "senders", "wants"):
        if key not in document:
            raise InstanceError("missing field", key)

    m = _require_int(document["num_messages"], "num_messages")
    if m < 1:
        raise InstanceError("must be a positive integer", "num_messages")

    senders_doc = _require_list(document["senders"], "senders")
    if not senders_doc:
        raise InstanceError("at least one sender is required", "senders")
    senders = []
    for s, owned_doc in enumerate(senders_doc):
        owned = _index_set(owned_doc, m, f"senders[{s}]")
        if not owned:
            raise InstanceError("sender set is empty", f"senders[{s}]")
        senders.append(owned)

    wants_doc = _require_list(document["wants"], "wants")
    if len(wants_doc) != m:
        raise InstanceError(f"expected {m} want sets, got {len(wants_doc)}", "wants")
    wants = []
    for k, wanted_doc in enumerate(wants_doc):
        wanted = _index_set(wanted_doc, m, f"wants[{k}]")
        if k + 1 in wanted:
            position = wanted_doc.index(k + 1)
            raise InstanceError(f"receiver {k + 1} wants its own message (self-want)", f"wants[{k}][{position}]")
        wants.append(wanted)

    missing = set(range(1, m + 1)) - frozenset().union(*senders)
    if missing:
        raise InstanceError(f"messages {sorted(missing)} are known to no sender", "senders")

    instance = ProblemInstance(num_messages=m, senders=tuple(senders), wants=tuple(wants))
    logger.debug(f"Parsed {instance!r}")
    return instance


def simplify(inst: ProblemInstance) -> Tuple[ProblemInstance, FrozenSet[int]]:
    """
    Remove every message nobody wants from all sender sets (x_i = empty).
    Receiver vertices stay, and so do senders left with an empty set, so that
    sender ids remain stable.
    """
    wanted = inst.wanted_messages()
    removed = inst.owned_messages() - wanted
    senders = tuple(owned & wanted for owned in inst.senders)
    if removed:
        logger.info(f"Simplification removed messages {sorted(removed)}")
    simplified = ProblemInstance(
        num_messages=inst.num_messages,
        senders=senders,
        wants=inst.wants,
        simplified=True,
    )
    return simplified, frozenset(removed)


def build_graphs(inst: ProblemInstance) -> GraphPair:
    if not inst.simplified:
        raise PreconditionError("build_graphs requires a simplified instance; call simplify() first")
    arcs = [(i, j) for j, wanted in enumerate(inst.wants, start=1) for i in wanted]
    edges = set()
    for owned in inst.senders:
        ordered = sorted(owned)
        for a, i in enumerate(ordered):
            for j in ordered[a + 1:]:
                edges.add((i, j))
    return GraphPair(inst.num_messages, arcs, edges)


def random_instance(
    rng: random.Random,
    m: int,
    want_probability: float = 0.35,
    num_senders: Optional[int] = None,
    share_probability: float = 0.3,
    partitioned: bool = False,
) -> ProblemInstance:
    """
    Random valid (unsimplified) instance: every message is known to at least
    one sender and every sender set is nonempty.
    """
    wants = tuple(
        frozenset(i for i in range(1, m + 1) if i != r and rng.random() < want_probability)
        for r in range(1, m + 1)
    )
    num_senders = num_senders or rng.randint(1, m)
    num_senders = min(num_senders, m) if partitioned else num_senders

    if partitioned:
        order = list(range(1, m + 1))
        rng.shuffle(order)
        cuts = sorted(rng.sample(range(1, m), num_senders - 1)) if num_senders > 1 else []
        blocks = [order[a:b] for a, b in zip([0] + cuts, cuts + [m])]
        senders = [set(block) for block in blocks]
    else:
        senders = [set() for _ in range(num_senders)]
        for i in range(1, m + 1):
            senders[rng.randrange(num_senders)].add(i)
            for owned in senders:
                if rng.random() < share_probability:
                    owned.add(i)
        for owned in senders:
            if not owned:
                owned.add(rng.randint(1, m))

    return ProblemInstance(num_messages=m, senders=tuple(frozenset(s) for s in senders), wants=wants)
