"""
Tests for decodability certificates, exhaustive simulation and the linear oracle
"""

import pytest

from msic import gf2
from msic.coding import CodeRow, LinearIndexCode, sender_xor_code
from msic.models import GuardError, PreconditionError, parse_instance, simplify
from msic.verify import (
    candidate_rows,
    check_lemma_consequences,
    oracle_min_linear,
    rank_decodable,
    verify_exhaustive,
)


def uncoded(m, *pairs):
    return LinearIndexCode(m, [CodeRow(sender, gf2.unit(i)) for sender, i in pairs])


def test_sender_xor_code_decodes_ex_a(ex_a):
    code = sender_xor_code(ex_a)
    certificate = rank_decodable(code, ex_a)
    assert certificate.ok
    assert len(certificate.certificates) == 6
    assert all(c.check(code) for c in certificate.certificates)
    assert verify_exhaustive(code, ex_a)


def test_first_failure_is_reported(ex_a):
    certificate = rank_decodable(uncoded(6, (1, 1), (2, 2)), ex_a)
    assert certificate.failure == (3, 4)
    assert certificate.to_document()["failure"] == {"receiver": 3, "wanted": 4}


def test_rank_decodable_rejects_unowned_rows(ex_a):
    code = LinearIndexCode(6, [CodeRow(1, gf2.from_support([1, 2]))])
    with pytest.raises(PreconditionError):
        rank_decodable(code, ex_a)


def test_certificate_uses_own_message(ex_b):
    code = LinearIndexCode(3, [CodeRow(1, 0b011), CodeRow(1, 0b101)])
    certificate = rank_decodable(code, ex_b)
    assert certificate.ok
    # receiver 1 wants x3: x3 = (x1 + x3) + x1
    first = certificate.certificates[0]
    assert (first.receiver, first.wanted, first.rows, first.uses_own) == (1, 3, (1,), True)


def test_verify_exhaustive_ex_c(ex_c):
    assert not verify_exhaustive(uncoded(2, (1, 1)), ex_c)
    assert verify_exhaustive(uncoded(2, (1, 1), (2, 2)), ex_c)


def test_empty_code_for_empty_wants():
    inst = parse_instance({"num_messages": 2, "senders": [[1, 2]], "wants": [[], []]})
    empty = LinearIndexCode(2, [])
    assert verify_exhaustive(empty, inst)
    assert rank_decodable(empty, inst).ok


def test_verify_exhaustive_guard(ex_a):
    with pytest.raises(GuardError):
        verify_exhaustive(sender_xor_code(ex_a), ex_a, max_messages=5)


def test_candidate_rows_are_deduplicated(ex_c):
    rows = candidate_rows(ex_c)
    assert [(row.sender, row.vector) for row in rows] == [(1, 0b01), (2, 0b10)]


def test_candidate_rows_credit_smallest_sender(ex_a):
    rows = {row.vector: row.sender for row in candidate_rows(ex_a)}
    assert len(rows) == 19
    assert rows[gf2.unit(5)] == 1
    assert rows[gf2.unit(6)] == 4


@pytest.mark.parametrize("name, expected", [("ex_a", 4), ("ex_b", 2), ("ex_c", 2)])
def test_oracle_examples(request, name, expected):
    inst = request.getfixturevalue(name)
    result = oracle_min_linear(inst)
    assert result.length == expected
    assert result.code.length == expected
    assert rank_decodable(result.code, inst).ok
    assert result.certified(expected)


def test_oracle_parallel_matches_sequential(ex_a):
    sequential = oracle_min_linear(ex_a, jobs=1)
    parallel = oracle_min_linear(ex_a, jobs=2)
    assert parallel.code == sequential.code


def test_oracle_exhausted(ex_a):
    result = oracle_min_linear(ex_a, max_len=3)
    assert result.exhausted
    assert result.to_document(lower=4) == {
        "length": None,
        "exhausted": True,
        "searched_up_to": 3,
        "linear_optimal": False,
        "code": None,
        "certified": False,
    }


def test_oracle_guard(ex_a):
    with pytest.raises(GuardError):
        oracle_min_linear(ex_a, max_messages=5)


def test_oracle_empty_wants():
    inst = parse_instance({"num_messages": 2, "senders": [[1, 2]], "wants": [[], []]})
    assert oracle_min_linear(inst).length == 0


def test_lemmas_ex_c(ex_c):
    report = check_lemma_consequences(uncoded(2, (1, 1), (2, 2)), ex_c)
    assert report.ok
    assert report.checked["L3"] == 2


def test_lemmas_path():
    inst = parse_instance({"num_messages": 2, "senders": [[1], [2]], "wants": [[], [1]]})
    report = check_lemma_consequences(uncoded(2, (1, 1)), inst)
    assert report.ok
    assert report.checked["L2"] == 1


def test_lemmas_ex_a_sender_code(ex_a):
    report = check_lemma_consequences(sender_xor_code(ex_a), ex_a)
    assert report.ok
    assert report.checked["L1"] == 6


def test_lemma_violation_is_reported(ex_c):
    """An undecodable code breaks the rank facts and they say so"""
    report = check_lemma_consequences(uncoded(2, (1, 1)), ex_c)
    assert not report.ok
    assert {v.lemma for v in report.violations} >= {"L1", "L3"}


def test_oracle_invariant_under_simplification():
    inst = parse_instance({"num_messages": 3, "senders": [[1, 2], [2, 3]], "wants": [[2], [1], []]})
    simplified, removed = simplify(inst)
    assert removed == frozenset({3})
    assert oracle_min_linear(inst).length == oracle_min_linear(simplified).length == 1
