"""
Breaking all leaf SCCs of the information-flow digraph and the
resulting lower bound on the optimal multi-sender index codelength:

    l* >= V_out(G) - (N_connected + N_iv)

Every arbitrary choice of the algorithm goes through a chooser. The
deterministic chooser always takes the first (smallest) option; exhaustive
mode enumerates every choice sequence and keeps the run with the fewest
phase-2 iterations.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from msic.config import Config
from msic.graphs import (
    DegeneracyWitness,
    classify_all,
    is_leaf_scc,
    iter_degeneracy_witnesses,
    m_neighbors,
    message_components,
    scc_decompose,
)
from msic.models import AlgorithmError, GraphPair, LeafClass, PreconditionError, StepKind

logger = logging.getLogger(__name__)

DETERMINISTIC = "deterministic"
EXHAUSTIVE = "exhaustive"
MODES = (DETERMINISTIC, EXHAUSTIVE)


@dataclass(frozen=True)
class Step:
    kind: StepKind
    scc: Tuple[int, ...] = ()
    vertex: Optional[int] = None
    arcs_removed: Tuple[Tuple[int, int], ...] = ()
    arcs_added: Tuple[Tuple[int, int], ...] = ()
    edges_added: Tuple[Tuple[int, int], ...] = ()
    dummy: Optional[int] = None

    def key(self) -> Tuple:
        return (
            self.kind.value, self.scc, self.vertex or 0,
            self.arcs_removed, self.arcs_added, self.edges_added, self.dummy or 0,
        )

    def to_document(self) -> Dict:
        document = {"step": self.kind.value, "scc": list(self.scc)}
        if self.vertex is not None:
            document["vertex"] = self.vertex
        if self.arcs_removed:
            document["arcs_removed"] = [list(a) for a in self.arcs_removed]
        if self.arcs_added:
            document["arcs_added"] = [list(a) for a in self.arcs_added]
        if self.edges_added:
            document["edges_added"] = [list(e) for e in self.edges_added]
        if self.dummy is not None:
            document["dummy"] = self.dummy
        return document


@dataclass
class AlgorithmTrace:
    original: GraphPair
    state: GraphPair
    mode: str = DETERMINISTIC
    log: List[Step] = field(default_factory=list)
    n_connected: int = 0
    n_iv: int = 0
    n_remaining: int = 0
    dummy_count: int = 0
    phase: int = 1

    @classmethod
    def start(cls, g: GraphPair, mode: str = DETERMINISTIC) -> "AlgorithmTrace":
        return cls(original=g.copy(), state=g.copy(), mode=mode)

    def record(self, step: Step):
        logger.debug(f"Step ({step.kind.value}) on {list(step.scc)}")
        self.log.append(step)

    def log_key(self) -> Tuple:
        return tuple(step.key() for step in self.log)

    def to_document(self) -> Dict:
        return {
            "mode": self.mode,
            "n_connected": self.n_connected,
            "n_remaining": self.n_remaining,
            "n_iv": self.n_iv,
            "dummy_count": self.dummy_count,
            "v_out_original": self.original.v_out(),
            "v_out_final": self.state.v_out(),
            "steps": [step.to_document() for step in self.log],
        }


class FirstChoice:
    """Always takes the first option; options are supplied smallest first"""

    def choose(self, options: Sequence):
        if not options:
            raise AlgorithmError("a choice point offered no options")
        return options[0]


class ScriptedChoice:
    """Replays a prefix of option indices, then takes the first option, recording every choice point"""

    def __init__(self, script: Sequence[int] = ()):
        self.script = list(script)
        self.taken: List[int] = []
        self.counts: List[int] = []

    def choose(self, options: Sequence):
        if not options:
            raise AlgorithmError("a choice point offered no options")
        position = len(self.taken)
        index = self.script[position] if position < len(self.script) else 0
        if index >= len(options):
            raise AlgorithmError(f"choice script index {index} out of range at point {position}")
        self.taken.append(index)
        self.counts.append(len(options))
        return options[index]


class SearchBudgetExceeded(Exception):
    pass


def _step_budget(g: GraphPair) -> int:
    return 16 * (g.n + 2) ** 3


# Elementary steps
def prune_scc(trace: AlgorithmTrace, scc: Iterable[int], v: int, kind: StepKind = StepKind.PRUNE):
    scc = frozenset(scc)
    if v not in scc:
        raise PreconditionError(f"vertex {v} is not in {sorted(scc)}")
    if not is_leaf_scc(trace.state, scc):
        raise PreconditionError(f"{sorted(scc)} is not a leaf SCC")
    removed = trace.state.remove_out_arcs(v)
    trace.record(Step(kind, tuple(sorted(scc)), vertex=v, arcs_removed=tuple(removed)))


def append_dummy(trace: AlgorithmTrace, scc: Iterable[int]) -> int:
    scc = frozenset(scc)
    report = classify_all(trace.state)
    if scc not in report.leaf_sets(LeafClass.MESSAGE_DISCONNECTED):
        raise PreconditionError(f"{sorted(scc)} is not a message-disconnected leaf SCC")
    v = min(scc)
    dummy = trace.state.add_dummy()
    trace.state.add_arc(v, dummy)
    trace.dummy_count += 1
    trace.record(Step(StepKind.APPEND_DUMMY, tuple(sorted(scc)), vertex=v, arcs_added=((v, dummy),), dummy=dummy))
    return dummy


def _witness_holds(g: GraphPair, scc: FrozenSet[int], witness: DegeneracyWitness) -> bool:
    s_prime, outside = witness.s_prime, witness.outside
    if not s_prime or not s_prime < scc or outside & scc:
        return False
    rest = scc - s_prime
    if any(w in rest for v in s_prime for w in g.u.neighbors(v)):
        return False
    if sum(1 for v in outside if not g.is_leaf(v)) > 1:
        return False
    covered = set(outside)
    for v in outside:
        covered |= nx.ancestors(g.g, v)
    return m_neighbors(g, s_prime) <= covered


def add_degenerate_arc(
    trace: AlgorithmTrace,
    scc: Iterable[int],
    witness: DegeneracyWitness,
    source: Optional[int] = None,
    target: Optional[int] = None,
) -> Tuple[int, int]:
    """
    Step (iii): add an arc from S' to the single non-leaf of V_S'' (iii-a), or
    to a member of an all-leaf V_S'' (iii-b). The witness is re-verified first.
    """
    scc = frozenset(scc)
    state = trace.state
    report = classify_all(state)
    if scc not in report.leaf_sets(LeafClass.SEMI_DEGENERATED) or not _witness_holds(state, scc, witness):
        raise PreconditionError(f"stale degeneracy witness for {sorted(scc)}: {witness.to_document()}")
    if not witness.outside:
        raise PreconditionError(f"witness for {sorted(scc)} has an empty V_S''")

    u = min(witness.s_prime) if source is None else source
    if u not in witness.s_prime:
        raise PreconditionError(f"arc source {u} is not in S' {sorted(witness.s_prime)}")
    non_leaves = [v for v in witness.outside if not state.is_leaf(v)]
    if len(non_leaves) == 1:
        kind, v = StepKind.ARC_TO_NON_LEAF, non_leaves[0]
    else:
        kind = StepKind.ARC_TO_LEAF
        v = min(witness.outside) if target is None else target
        if v not in witness.outside:
            raise PreconditionError(f"arc target {v} is not in V_S'' {sorted(witness.outside)}")
    state.add_arc(u, v)
    trace.record(Step(kind, tuple(sorted(scc)), vertex=u, arcs_added=((u, v),)))
    return u, v


def make_message_connected(trace: AlgorithmTrace, scc: Iterable[int]) -> List[Tuple[int, int]]:
    """Step (iv-b): chain the message components of a semi leaf SCC through their smallest members"""
    scc = frozenset(scc)
    report = classify_all(trace.state)
    if scc not in report.leaf_sets(LeafClass.SEMI_DEGENERATED, LeafClass.SEMI_NON_DEGENERATED):
        raise PreconditionError(f"{sorted(scc)} is not a semi leaf SCC")
    representatives = [min(component) for component in message_components(trace.state, scc)]
    added = list(zip(representatives, representatives[1:]))
    for i, j in added:
        trace.state.add_edge(i, j)
    trace.record(Step(StepKind.CONNECT_SEMI, tuple(sorted(scc)), edges_added=tuple(added)))
    return added


def _degenerated_options(state: GraphPair, report) -> List[Tuple[FrozenSet[int], DegeneracyWitness]]:
    return [
        (report.sccs[k], report.witnesses[k])
        for k in report.leaf_sccs
        if report.classes[k] is LeafClass.SEMI_DEGENERATED
    ]


def break_leaf_sccs(trace: AlgorithmTrace, prune_limit: Optional[int] = None, chooser=None):
    """
    The BreakLeafSCC procedure. prune_limit=None prunes every message-connected
    leaf SCC (phase 1 and step (iv-c)); prune_limit=1 prunes exactly one (step (iv-0)).
    """
    chooser = chooser or FirstChoice()
    state = trace.state
    report = classify_all(state)

    connected = report.leaf_sets(LeafClass.MESSAGE_CONNECTED)
    if prune_limit is not None and connected:
        connected = [chooser.choose(connected)]
    kind = StepKind.PRUNE_ONE if prune_limit == 1 else StepKind.PRUNE
    for scc in connected:
        prune_scc(trace, scc, chooser.choose(sorted(scc)), kind)
        if trace.phase == 1:
            trace.n_connected += 1

    budget = _step_budget(state)
    while True:
        report = classify_all(state)
        disconnected = report.leaf_sets(LeafClass.MESSAGE_DISCONNECTED)
        if not disconnected and not report.count(LeafClass.SEMI_DEGENERATED):
            break
        for scc in disconnected:
            append_dummy(trace, scc)

        while True:
            budget -= 1
            if budget < 0:
                raise AlgorithmError("breaking leaf SCCs did not terminate")
            report = classify_all(state)
            options = _degenerated_options(state, report)
            if not options:
                break
            scc, _ = chooser.choose(options)
            witness = chooser.choose(list(iter_degeneracy_witnesses(state, scc)))
            source = chooser.choose(sorted(witness.s_prime))
            target = None
            if witness.non_leaf is None:
                target = chooser.choose(sorted(witness.outside))
            add_degenerate_arc(trace, scc, witness, source, target)


def _phase_one(trace: AlgorithmTrace, chooser):
    trace.phase = 1
    break_leaf_sccs(trace, None, chooser)
    trace.n_remaining = len(scc_decompose(trace.state).leaf_sccs)
    trace.phase = 2


def _phase_two_iteration(trace: AlgorithmTrace, chooser):
    report = classify_all(trace.state)
    trace.n_iv += 1
    if report.count(LeafClass.MESSAGE_CONNECTED):
        break_leaf_sccs(trace, 1, chooser)
        return
    semi = report.leaf_sets(LeafClass.SEMI_DEGENERATED, LeafClass.SEMI_NON_DEGENERATED)
    scc = chooser.choose(semi)
    trace.record(Step(StepKind.SELECT_SEMI, tuple(sorted(scc))))
    make_message_connected(trace, scc)
    trace.record(Step(StepKind.BREAK_AGAIN, tuple(sorted(scc))))
    break_leaf_sccs(trace, None, chooser)


def _has_leaf_scc(g: GraphPair) -> bool:
    return bool(scc_decompose(g).leaf_sccs)


def _run(g: GraphPair, chooser, mode: str = DETERMINISTIC) -> AlgorithmTrace:
    trace = AlgorithmTrace.start(g, mode)
    _phase_one(trace, chooser)
    while _has_leaf_scc(trace.state):
        if trace.n_iv >= trace.n_remaining:
            raise AlgorithmError(f"phase 2 ran {trace.n_iv} iterations for {trace.n_remaining} leaf SCCs")
        _phase_two_iteration(trace, chooser)
    return trace


def _enumerate(make_trace: Callable[[], AlgorithmTrace], step: Callable, counter: List[int], budget: int):
    """Yield (script, trace) for every choice sequence of `step` applied to a fresh trace"""
    script: List[int] = []
    while True:
        counter[0] += 1
        if counter[0] > budget:
            raise SearchBudgetExceeded()
        chooser = ScriptedChoice(script)
        trace = make_trace()
        step(trace, chooser)
        yield list(chooser.taken), trace
        k = len(chooser.taken) - 1
        while k >= 0 and chooser.taken[k] + 1 >= chooser.counts[k]:
            k -= 1
        if k < 0:
            return
        script = chooser.taken[:k] + [chooser.taken[k] + 1]


def _resume(state: GraphPair, n_connected: int, n_remaining: int, dummy_count: int) -> AlgorithmTrace:
    trace = AlgorithmTrace(original=state, state=state.copy(), phase=2)
    trace.n_connected, trace.n_remaining, trace.dummy_count = n_connected, n_remaining, dummy_count
    return trace


def _search(g: GraphPair, budget: int) -> List[int]:
    """Choice script of a run with minimal n_iv, ties broken by the smallest log"""
    counter = [0]
    memo: Dict[Tuple, Tuple[int, Tuple, List[int]]] = {}

    def best_rest(state: GraphPair, n_connected: int, n_remaining: int, dummy_count: int):
        key = state.canonical()
        if key in memo:
            return memo[key]
        if not _has_leaf_scc(state):
            memo[key] = (0, (), [])
            return memo[key]
        best = None
        outcomes = _enumerate(
            lambda: _resume(state, n_connected, n_remaining, dummy_count),
            _phase_two_iteration, counter, budget,
        )
        for script, trace in outcomes:
            rest_n, rest_log, rest_script = best_rest(trace.state, n_connected, n_remaining, trace.dummy_count)
            candidate = (1 + rest_n, trace.log_key() + rest_log, script + rest_script)
            if best is None or candidate[:2] < best[:2]:
                best = candidate
        memo[key] = best
        return best

    best = None
    for script, trace in _enumerate(lambda: AlgorithmTrace.start(g, EXHAUSTIVE), _phase_one, counter, budget):
        rest_n, rest_log, rest_script = best_rest(trace.state, trace.n_connected, trace.n_remaining, trace.dummy_count)
        candidate = (rest_n, trace.log_key() + rest_log, script + rest_script)
        if best is None or candidate[:2] < best[:2]:
            best = candidate
    logger.info(f"Exhaustive search explored {counter[0]} runs, best n_iv={best[0]}")
    return best[2]


def run_algorithm1(g: GraphPair, mode: str = DETERMINISTIC, budget: Optional[int] = None) -> AlgorithmTrace:
    if mode not in MODES:
        raise PreconditionError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if mode == DETERMINISTIC:
        trace = _run(g, FirstChoice())
    else:
        if budget is None:
            budget = Config.EXHAUSTIVE_STATE_BUDGET
        try:
            script = _search(g, budget)
            trace = _run(g, ScriptedChoice(script), EXHAUSTIVE)
        except SearchBudgetExceeded:
            logger.warning(f"Exhaustive search exceeded its budget of {budget} runs; falling back to deterministic mode")
            trace = _run(g, FirstChoice())
            trace.mode = f"{DETERMINISTIC}-fallback"
    logger.info(
        f"Leaf-SCC breaking ({trace.mode}): N_connected={trace.n_connected}, "
        f"N_remaining={trace.n_remaining}, N_iv={trace.n_iv}, dummies={trace.dummy_count}"
    )
    return trace


def lower_bound(trace: AlgorithmTrace) -> int:
    """V_out(G) - (N_connected + N_iv), checked against V_out of the final state"""
    if _has_leaf_scc(trace.state):
        raise PreconditionError("lower_bound requires a completed trace")
    value = trace.original.v_out() - (trace.n_connected + trace.n_iv)
    final = trace.state.v_out()
    if value != final:
        raise AlgorithmError(f"counting identity failed: V_out(G) - (N_connected + N_iv) = {value}, V_out(G') = {final}")
    return value


def lower_bound_prune_all(g: GraphPair) -> int:
    """Prune every leaf SCC at its smallest vertex and count the remaining non-leaf vertices"""
    state = g.copy()
    report = scc_decompose(state)
    for k in report.leaf_sccs:
        state.remove_out_arcs(min(report.sccs[k]))
    return state.v_out()


def replay(g: GraphPair, log: Iterable[Step]) -> GraphPair:
    """Re-apply a logged run to a fresh copy of its starting graphs"""
    state = g.copy()
    for step in log:
        for i, j in step.arcs_removed:
            state.g.remove_edge(i, j)
        if step.dummy is not None:
            state.add_dummy()
        for i, j in step.arcs_added:
            state.add_arc(i, j)
        for i, j in step.edges_added:
            state.add_edge(i, j)
    return state
