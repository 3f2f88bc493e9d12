"""
Decodability of linear index codes: rank certificates over GF(2), an
exhaustive simulation that does not rely on linear algebra, and a brute-force
search for the shortest linear code of an instance.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from msic import gf2
from msic.coding import CodeRow, LinearIndexCode, encode
from msic.config import Config
from msic.graphs import classify_all, predecessors
from msic.models import (
    SCHEMA_VERSION,
    GuardError,
    LeafClass,
    ProblemInstance,
    RowKind,
    build_graphs,
    simplify,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    receiver: int
    wanted: int
    rows: Tuple[int, ...]
    uses_own: bool

    def check(self, code: LinearIndexCode) -> bool:
        total = gf2.unit(self.receiver) if self.uses_own else 0
        for k in self.rows:
            total ^= code.rows[k].vector
        return total == gf2.unit(self.wanted)

    def to_document(self) -> Dict:
        return {"receiver": self.receiver, "wanted": self.wanted, "rows": list(self.rows), "uses_own": self.uses_own}


@dataclass
class DecodeCertificate:
    certificates: List[Certificate] = field(default_factory=list)
    failure: Optional[Tuple[int, int]] = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_document(self) -> Dict:
        document = {"schema": SCHEMA_VERSION, "decodable": self.ok}
        if self.ok:
            document["certificates"] = [c.to_document() for c in self.certificates]
        else:
            document["failure"] = {"receiver": self.failure[0], "wanted": self.failure[1]}
        return document


def _receiver_basis(vectors: Sequence[int], receiver: int) -> gf2.EchelonBasis:
    basis = gf2.EchelonBasis()
    for k, vector in enumerate(vectors):
        basis.add(vector, 1 << k)
    basis.add(gf2.unit(receiver), 1 << len(vectors))
    return basis


def rank_decodable(code: LinearIndexCode, inst: ProblemInstance) -> DecodeCertificate:
    """
    Check e_j in span(rows + e_r) for every receiver r and j in W_r, in
    receiver order then wanted order; stops at the first failure.
    """
    code.check_supports(inst)
    vectors = code.vectors
    own_bit = 1 << len(vectors)
    result = DecodeCertificate()
    for r, wanted in enumerate(inst.wants, start=1):
        if not wanted:
            continue
        basis = _receiver_basis(vectors, r)
        for j in sorted(wanted):
            combination = basis.express(gf2.unit(j))
            if combination is None:
                logger.debug(f"Receiver {r} cannot decode x_{j}")
                result.failure = (r, j)
                return result
            rows = tuple(k for k in range(len(vectors)) if combination >> k & 1)
            result.certificates.append(Certificate(r, j, rows, bool(combination & own_bit)))
    return result


def verify_exhaustive(code: LinearIndexCode, inst: ProblemInstance, max_messages: Optional[int] = None) -> bool:
    """
    Simulate every assignment of the owned messages (the others are fixed at
    zero) and require each receiver's wanted bits to be a function of what it
    observes: the codeword and its own message.
    """
    limit = max_messages if max_messages is not None else Config.VERIFY_MAX_MESSAGES
    if inst.num_messages > limit:
        raise GuardError(f"exhaustive verification is limited to {limit} messages, instance has {inst.num_messages}")
    code.check_supports(inst)

    owned = sorted(inst.owned_messages())
    assignments = np.arange(1 << len(owned), dtype=np.int64)
    messages = np.zeros((assignments.size, inst.num_messages), dtype=np.uint8)
    for position, i in enumerate(owned):
        messages[:, i - 1] = (assignments >> position) & 1

    codewords = encode(code, messages)

    for r, wanted in enumerate(inst.wants, start=1):
        if not wanted:
            continue
        observed = np.column_stack([codewords, messages[:, r - 1]])
        wanted_bits = messages[:, [j - 1 for j in sorted(wanted)]]
        classes = np.unique(observed, axis=0).shape[0]
        refined = np.unique(np.column_stack([observed, wanted_bits]), axis=0).shape[0]
        if refined != classes:
            logger.debug(f"Receiver {r} sees identical observations with different wanted bits")
            return False
    return True


@dataclass
class OracleResult:
    length: Optional[int]
    code: Optional[LinearIndexCode]
    searched_up_to: int
    linear_optimal: bool = True

    @property
    def exhausted(self) -> bool:
        return self.length is None

    def certified(self, lower: int) -> bool:
        return self.length is not None and self.length == lower

    def to_document(self, lower: Optional[int] = None) -> Dict:
        document = {
            "length": self.length,
            "exhausted": self.exhausted,
            "searched_up_to": self.searched_up_to,
            "linear_optimal": self.linear_optimal and not self.exhausted,
            "code": self.code.to_document() if self.code is not None else None,
        }
        if lower is not None:
            document["certified"] = self.certified(lower)
        return document


def candidate_rows(inst: ProblemInstance) -> List[CodeRow]:
    """Nonzero vectors supported inside some sender set, each credited to its smallest sender"""
    owners: Dict[int, int] = {}
    for s, owned in enumerate(inst.senders, start=1):
        mask = gf2.from_support(owned)
        subset = mask
        while subset:
            owners.setdefault(subset, s)
            subset = (subset - 1) & mask
    return [CodeRow(sender=owners[v], vector=v, kind=RowKind.CUSTOM) for v in sorted(owners)]


WantTable = Tuple[Tuple[int, Tuple[int, ...]], ...]


def _want_table(inst: ProblemInstance) -> WantTable:
    return tuple((r, tuple(sorted(w))) for r, w in enumerate(inst.wants, start=1) if w)


def _decodes(vectors: Sequence[int], wants: WantTable) -> bool:
    for r, wanted in wants:
        basis = gf2.EchelonBasis()
        hide = ~gf2.unit(r)
        for vector in vectors:
            basis.add(vector & hide, 0)
        if any(gf2.unit(j) not in basis for j in wanted):
            return False
    return True


def _independent_sets(
    vectors: Sequence[int], size: int, start: int, basis: gf2.EchelonBasis, chosen: List[int]
) -> Iterator[Tuple[int, ...]]:
    if len(chosen) == size:
        yield tuple(chosen)
        return
    for k in range(start, len(vectors) - (size - len(chosen)) + 1):
        extended = basis.copy()
        if not extended.add(vectors[k], 0):
            continue
        chosen.append(k)
        yield from _independent_sets(vectors, size, k + 1, extended, chosen)
        chosen.pop()


def _search_partition(vectors: Tuple[int, ...], wants: WantTable, size: int, first: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically first decodable independent set of `size` rows starting with row `first`"""
    basis = gf2.EchelonBasis()
    basis.add(vectors[first], 0)
    for rest in _independent_sets(vectors, size, first + 1, basis, [first]):
        if _decodes([vectors[k] for k in rest], wants):
            return rest
    return None


def _search_length(vectors: Tuple[int, ...], wants: WantTable, size: int, jobs: int) -> Optional[Tuple[int, ...]]:
    if size == 0:
        return () if _decodes([], wants) else None
    firsts = range(len(vectors) - size + 1)
    if jobs > 1 and len(firsts) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = pool.map(_search_partition, *zip(*((vectors, wants, size, f) for f in firsts)))
            # partitions are ordered by first row, so the first hit is the global minimum
            return next((rows for rows in found if rows is not None), None)
    for first in firsts:
        rows = _search_partition(vectors, wants, size, first)
        if rows is not None:
            return rows
    return None


def oracle_min_linear(
    inst: ProblemInstance,
    max_len: Optional[int] = None,
    jobs: Optional[int] = None,
    max_messages: Optional[int] = None,
) -> OracleResult:
    """
    Shortest linear code by exhaustive search over sets of candidate rows.
    Lengths below max_r |W_r| are skipped: receiver r needs |W_r| unit vectors
    plus e_r inside a span of dimension at most length + 1.
    """
    limit = max_messages if max_messages is not None else Config.ORACLE_MAX_MESSAGES
    if inst.num_messages > limit:
        raise GuardError(f"the linear oracle is limited to {limit} messages, instance has {inst.num_messages}")
    if max_len is None:
        max_len = Config.ORACLE_MAX_LENGTH if Config.ORACLE_MAX_LENGTH is not None else inst.num_messages
    jobs = jobs if jobs is not None else Config.JOBS

    candidates = candidate_rows(inst)
    vectors = tuple(row.vector for row in candidates)
    wants = _want_table(inst)
    start = max((len(w) for w in inst.wants), default=0)
    logger.info(f"Oracle searching {len(candidates)} candidate rows for lengths {start}..{max_len}")

    for size in range(start, max_len + 1):
        if size > len(vectors):
            break
        found = _search_length(vectors, wants, size, jobs)
        if found is not None:
            code = LinearIndexCode(num_messages=inst.num_messages, rows=[candidates[k] for k in found])
            logger.info(f"Oracle found a linear code of length {size}")
            return OracleResult(length=size, code=code, searched_up_to=size)

    logger.warning(f"Oracle exhausted max_len={max_len} without a decodable code")
    return OracleResult(length=None, code=None, searched_up_to=max_len, linear_optimal=False)


@dataclass(frozen=True)
class LemmaViolation:
    lemma: str
    vertex: int
    message: int

    def to_document(self) -> Dict:
        return {"lemma": self.lemma, "vertex": self.vertex, "message": self.message}


@dataclass
class LemmaReport:
    checked: Dict[str, int] = field(default_factory=lambda: {"L1": 0, "L2": 0, "L3": 0})
    violations: List[LemmaViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_document(self) -> Dict:
        return {"ok": self.ok, "checked": dict(self.checked), "violations": [v.to_document() for v in self.violations]}


def _project(code: LinearIndexCode, keep: FrozenSet[int]) -> List[int]:
    mask = gf2.from_support(keep)
    return [vector & mask for vector in code.vectors]


def check_lemma_consequences(code: LinearIndexCode, inst: ProblemInstance) -> LemmaReport:
    """
    Rank facts every valid code must satisfy, checked on the simplified
    instance. A code for the raw instance is first projected onto the wanted
    messages, which keeps it decodable.
    """
    simplified = inst if inst.simplified else simplify(inst)[0]
    g = build_graphs(simplified)
    vectors = _project(code, simplified.wanted_messages())

    plain = gf2.EchelonBasis()
    for vector in vectors:
        plain.add(vector, 0)

    report = LemmaReport()

    def expect(lemma: str, vertex: int, j: int, basis: gf2.EchelonBasis):
        report.checked[lemma] += 1
        if gf2.unit(j) not in basis:
            report.violations.append(LemmaViolation(lemma, vertex, j))

    for i in g.vertices:
        with_own = plain.copy()
        with_own.add(gf2.unit(i), 0)
        for j in sorted(predecessors(g, i) - {i}):
            expect("L1", i, j, with_own)

    for leaf in sorted(g.leaves()):
        for j in sorted(predecessors(g, leaf)):
            expect("L2", leaf, j, plain)

    for scc in classify_all(g).leaf_sets(LeafClass.MESSAGE_DISCONNECTED):
        for j in sorted(scc):
            expect("L3", j, j, plain)

    if report.violations:
        logger.warning(f"Rank facts violated: {[v.to_document() for v in report.violations]}")
    return report
