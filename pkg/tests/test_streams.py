import numpy as np
import pytest
from hypothesis import given, strategies as st

from wilton_lab import streams
from wilton_lab.errors import DomainError


def test_chunk_rng_depends_on_all_keys():
    base = streams.chunk_rng(1, 0, streams.UNIFORM).random(4)
    assert np.array_equal(base, streams.chunk_rng(1, 0, streams.UNIFORM).random(4))
    for other in [(2, 0, streams.UNIFORM), (1, 1, streams.UNIFORM), (1, 0, streams.GAMMA)]:
        assert not np.array_equal(base, streams.chunk_rng(*other).random(4))


@given(st.integers(0, 10**6), st.integers(1, 1 << 17))
def test_chunks_cover_range(total, size):
    cs = streams.chunks(total, size)
    assert [c for c, _, _ in cs] == list(range(len(cs)))
    covered = [i for _, s, e in cs for i in range(s, e)] if total < 5000 else None
    if covered is not None:
        assert covered == list(range(total))
    assert sum(e - s for _, s, e in cs) == total


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("WILTON_LAB_THREADS", raising=False)
    assert streams.resolve_threads(None) == 1
    monkeypatch.setenv("WILTON_LAB_THREADS", "3")
    assert streams.resolve_threads(None) == 3
    assert streams.resolve_threads(2) == 2
    monkeypatch.setenv("WILTON_LAB_THREADS", "x")
    with pytest.raises(DomainError):
        streams.resolve_threads(None)
    with pytest.raises(DomainError):
        streams.resolve_threads(0)


def test_run_ordered_keeps_order():
    items = list(range(50))
    assert streams.run_ordered(lambda i: i * i, items, threads=4) == [i * i for i in items]


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=50), st.integers(0, 2**64 - 1))
def test_floats_to_dyadic_stays_within_float_cell(xs, low):
    x = np.array(xs)
    lows = np.full(x.size, low, dtype=np.uint64)
    bits = streams.floats_to_dyadic64(x, lows)
    assert np.all(bits >= 1)
    back = streams.dyadic64_to_float(bits)
    spacing = np.maximum(np.spacing(x), 2.0 ** -64)
    assert np.all(np.abs(back - x) <= 2 * spacing)
