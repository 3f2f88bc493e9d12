import json
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

from msic.bound import DETERMINISTIC, EXHAUSTIVE, AlgorithmTrace, lower_bound, run_algorithm1
from msic.coding import EXACT, CodeBlueprint, LinearIndexCode, assign_senders, find_connecting_trees, plan_code
from msic.graphs import SccReport, classify_all
from msic.models import (
    SCHEMA_VERSION,
    AlgorithmError,
    GraphPair,
    InstanceError,
    ProblemInstance,
    build_graphs,
    parse_instance,
    simplify,
)
from msic.verify import OracleResult, oracle_min_linear, rank_decodable

logger = logging.getLogger(__name__)


def read_document(path: str):
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise InstanceError(f"cannot read file: {e.strerror}", path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"not valid JSON: {e}", path)


def load_instance(path: str) -> ProblemInstance:
    document = read_document(path)
    try:
        return parse_instance(document)
    except InstanceError as e:
        raise InstanceError(str(e), path)


def dump_document(document: Dict) -> str:
    """Stable JSON text; every top-level object carries the schema version"""
    if isinstance(document, dict) and "schema" not in document:
        document = {"schema": SCHEMA_VERSION, **document}
    return json.dumps(document, indent=2)


@dataclass
class Analysis:
    instance: ProblemInstance
    simplified: ProblemInstance
    removed: FrozenSet[int]
    graphs: GraphPair
    classification: SccReport


def analyze(inst: ProblemInstance) -> Analysis:
    simplified, removed = simplify(inst)
    g = build_graphs(simplified)
    report = classify_all(g)
    logger.info(f"Built graphs with {len(g.arcs)} arcs and {len(g.edges)} edges, {len(report.leaf_sccs)} leaf SCCs")
    return Analysis(inst, simplified, removed, g, report)


def build_code(analysis: Analysis, tree_mode: str = EXACT) -> Tuple[CodeBlueprint, LinearIndexCode]:
    trees = find_connecting_trees(analysis.graphs, tree_mode)
    blueprint = plan_code(analysis.graphs, trees)
    code = assign_senders(analysis.simplified, blueprint)
    return blueprint, code


def build_report(
    inst: ProblemInstance,
    exhaustive: bool = False,
    with_oracle: bool = False,
    with_trace: bool = False,
    tree_mode: str = EXACT,
    max_len: Optional[int] = None,
    jobs: Optional[int] = None,
) -> Dict:
    """Run the whole pipeline and assemble the report document"""
    analysis = analyze(inst)
    trace: AlgorithmTrace = run_algorithm1(analysis.graphs, EXHAUSTIVE if exhaustive else DETERMINISTIC)
    lower = lower_bound(trace)

    blueprint, code = build_code(analysis, tree_mode)
    upper = blueprint.length
    decoding = rank_decodable(code, analysis.simplified)
    if not decoding.ok:
        raise AlgorithmError(f"planned code fails at receiver {decoding.failure[0]} wanting x_{decoding.failure[1]}")

    oracle: Optional[OracleResult] = None
    if with_oracle:
        oracle = oracle_min_linear(analysis.simplified, max_len=max_len, jobs=jobs)
        if oracle.length is not None and not lower <= oracle.length <= upper:
            raise AlgorithmError(f"sandwich violated: lower={lower}, oracle={oracle.length}, upper={upper}")

    certified = lower == upper or (oracle is not None and oracle.certified(lower))
    if not certified:
        logger.warning(f"Bounds leave a gap: lower={lower}, upper={upper}")

    report = {
        "schema": SCHEMA_VERSION,
        "instance": inst.summary(),
        "removed_messages": sorted(analysis.removed),
        "v_out": analysis.graphs.v_out(),
        "classification": analysis.classification.to_document()["leaf_sccs"],
        "n_connected": trace.n_connected,
        "n_remaining": trace.n_remaining,
        "n_iv": trace.n_iv,
        "lower_bound": lower,
        "n_tree": blueprint.n_tree,
        "upper_bound": upper,
        "gap": upper - lower,
        "mode": trace.mode,
        "tree_mode": tree_mode,
        "code": code.to_document(),
        "oracle": oracle.to_document(lower) if oracle is not None else None,
        "certified": certified,
    }
    if with_trace:
        report["trace"] = trace.to_document()
    return report


def render_dot(g: GraphPair, report: Optional[SccReport] = None) -> str:
    """
    Super-imposed drawing of both graphs: arcs of G in black, edges of U in
    red without arrowheads, leaf SCCs as labelled clusters, dummies dashed.
    """
    report = report if report is not None else classify_all(g)
    clustered = set()
    dot = "digraph msic {\n    node [shape=circle];\n"

    for position, k in enumerate(report.leaf_sccs):
        scc = report.sccs[k]
        cls = report.classes.get(k)
        label = f"leaf SCC {sorted(scc)}" + (f": {cls.value}" if cls else "")
        dot += f'    subgraph cluster_{position} {{\n        label="{label}";\n'
        for v in sorted(scc):
            dot += f"        {_node(g, v)}\n"
        dot += "    }\n"
        clustered |= scc

    for v in g.vertices:
        if v not in clustered:
            dot += f"    {_node(g, v)}\n"

    for i, j in sorted(g.arcs):
        dot += f"    {i} -> {j} [color=black];\n"
    for i, j in sorted(g.edges):
        dot += f"    {i} -> {j} [dir=none, color=red];\n"

    dot += "}\n"
    return dot


def _node(g: GraphPair, v: int) -> str:
    if v in g.dummies:
        return f'{v} [label="d{v}", style=dashed];'
    return f'{v} [label="x{v}"];'
