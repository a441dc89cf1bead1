import numpy as np
import pytest
from scipy import stats

from expost.election.streams import BLOCK_SIZE, blocks, check_seed, map_blocks, normals, uniforms


def test_uniform_range_and_shape():
    u = uniforms(7, 0, 1000)
    assert u.shape == (1000, 4)
    assert u.min() > 0 and u.max() < 1


def test_samples_do_not_depend_on_chunking():
    whole = uniforms(123, 10, 500)
    pieces = np.vstack([uniforms(123, 10, 7), uniforms(123, 17, 300), uniforms(123, 317, 193)])
    np.testing.assert_array_equal(whole, pieces)


def test_seeds_differ():
    assert not np.array_equal(uniforms(1, 0, 10), uniforms(2, 0, 10))


def test_normals_look_normal():
    z = normals(99, 0, 200_000)[:, 0]
    assert stats.kstest(z, "norm").pvalue > 1e-4
    assert abs(z.mean()) < 0.01


def test_seed_range():
    assert check_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(ValueError):
        check_seed(-1)
    with pytest.raises(ValueError):
        check_seed(2**64)


def test_blocks_partition():
    parts = blocks(2 * BLOCK_SIZE + 5)
    assert parts == [(0, BLOCK_SIZE), (BLOCK_SIZE, BLOCK_SIZE), (2 * BLOCK_SIZE, 5)]
    assert blocks(0) == []


def test_map_blocks_order_independent_of_workers():
    fn = lambda s, c: float(uniforms(5, s, c).sum())
    n = 3 * BLOCK_SIZE + 11
    assert map_blocks(fn, n, workers=1) == map_blocks(fn, n, workers=4)
