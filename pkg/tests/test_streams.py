import numpy as np
import pytest

from src.sampling.streams import StreamFactory, draw_blocks, make_stream


def test_stream_depends_only_on_seed_and_index():
    a = make_stream(7, 3).random(5)
    b = StreamFactory(7).stream(3).random(5)
    np.testing.assert_array_equal(a, b)


def test_distinct_indices_give_distinct_draws():
    assert not np.allclose(make_stream(7, 0).random(5), make_stream(7, 1).random(5))
    assert not np.allclose(make_stream(7, 0).random(5), make_stream(8, 0).random(5))


def test_streams_matches_individual_requests():
    factory = StreamFactory(11)
    batch = factory.streams(3, start=4)
    for offset, gen in enumerate(batch):
        np.testing.assert_array_equal(gen.random(3), factory.stream(4 + offset).random(3))


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        make_stream(1, -1)


def test_draw_blocks():
    assert list(draw_blocks(1030, 512)) == [(0, 512), (1, 512), (2, 6)]
    assert list(draw_blocks(0, 512)) == []
    with pytest.raises(ValueError):
        list(draw_blocks(10, 0))
