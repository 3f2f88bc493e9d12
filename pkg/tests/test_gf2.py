import numpy as np
import pytest

from msic import gf2


def test_pack_and_unpack():
    v = gf2.from_support([1, 3])
    assert v == 0b101
    assert gf2.support(v) == [1, 3]
    assert gf2.to_bits(v, 4) == [1, 0, 1, 0]
    assert gf2.from_bits([1, 0, 1, 0]) == v


def test_from_bits_rejects_non_bits():
    with pytest.raises(ValueError):
        gf2.from_bits([0, 2])


def test_to_matrix_shape():
    matrix = gf2.to_matrix([0b11, 0b100], 3)
    assert matrix.dtype == np.uint8
    assert matrix.tolist() == [[1, 1, 0], [0, 0, 1]]
    assert gf2.to_matrix([], 3).shape == (0, 3)


def test_basis_tracks_combinations():
    basis = gf2.EchelonBasis()
    assert basis.add(0b011, 0b01)
    assert basis.add(0b110, 0b10)
    assert not basis.add(0b101, 0b100)
    assert basis.rank == 2
    # x1 + x3 = (x1 + x2) + (x2 + x3)
    assert basis.express(0b101) == 0b11
    assert basis.express(0b001) is None
    assert 0b101 in basis


def test_copy_is_independent():
    basis = gf2.EchelonBasis()
    basis.add(0b1, 1)
    other = basis.copy()
    other.add(0b10, 2)
    assert basis.rank == 1
    assert other.rank == 2
