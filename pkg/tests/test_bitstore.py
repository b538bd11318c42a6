import pytest
from hypothesis import given, strategies as st

from ldcodec.bitstore import BitStore, replay
from ldcodec.errors import AddressError


def test_zero_store_read_records_address():
    s = BitStore(16)
    with s.ledger() as led:
        assert s.read_bit(5) == 0
    assert led.reads == (5,)
    assert led.probe_count == 1


def test_read_after_write():
    s = BitStore(16)
    s.write_bit(5, 1)
    assert s.read_bit(5) == 1


def test_double_read_counts_twice():
    s = BitStore(8)
    with s.ledger() as led:
        s.read_bit(5)
        s.read_bit(5)
    assert led.probe_count == 2


def test_writes_always_counted():
    s = BitStore(8)
    with s.ledger() as led:
        s.write_bit(0, 0)
    assert led.probe_count == 1
    assert s.snapshot() == bytes(8)
    with s.ledger() as led:
        s.write_bit(0, 1)
        s.write_bit(3, 1)
    assert led.probe_count == 2
    assert led.writes == ((0, 1), (3, 1))


@pytest.mark.parametrize("addr", [-1, 8, 100])
def test_out_of_range(addr):
    s = BitStore(8)
    with pytest.raises(AddressError):
        s.read_bit(addr)
    with pytest.raises(AddressError):
        s.write_bit(addr, 1)


def test_field_msb_first():
    assert BitStore(3, [1, 0, 1]).read_field(0, 3) == 5
    assert BitStore(4, [0, 0, 0, 1]).read_field(0, 4) == 1


def test_empty_field_costs_nothing():
    s = BitStore(4, [1, 1, 1, 1])
    with s.ledger() as led:
        assert s.read_field(2, 0) == 0
        s.write_field(2, 0, 0)
    assert led.probe_count == 0


def test_field_overflow():
    s = BitStore(8)
    with pytest.raises(AddressError):
        s.read_field(6, 3)
    with pytest.raises(AddressError):
        s.write_field(6, 3, 0)


def test_write_field_touches_every_bit():
    s = BitStore(8)
    with s.ledger() as led:
        s.write_field(2, 4, 0)
    assert led.write_count == 4


def test_nested_ledgers_aggregate():
    s = BitStore(8)
    with s.ledger() as outer:
        s.read_bit(0)
        with s.ledger() as inner:
            s.write_bit(1, 1)
        s.read_bit(1)
    assert inner.probe_count == 1
    assert outer.probe_count == 3


def test_ledger_frozen_after_operation():
    s = BitStore(4)
    with s.ledger() as led:
        s.read_bit(0)
    s.read_bit(1)
    assert led.closed and led.reads == (0,)


@given(st.integers(1, 64).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, 2**w - 1))))
def test_field_roundtrip(wv):
    width, value = wv
    s = BitStore(70)
    s.write_field(3, width, value)
    assert s.read_field(3, width) == value


ops = st.lists(
    st.tuples(st.sampled_from(["r", "w"]), st.integers(0, 31), st.integers(0, 1)), max_size=60
)


@given(st.lists(st.integers(0, 1), min_size=32, max_size=32), ops)
def test_replay_reproduces_content(initial, seq):
    s = BitStore(32, initial)
    start = s.snapshot()
    with s.ledger() as led:
        for kind, addr, v in seq:
            if kind == "r":
                s.read_bit(addr)
            else:
                s.write_bit(addr, v)
    assert replay(start, led) == s.snapshot()
    assert led.probe_count == len(seq)
    changed = {a for a in range(32) if start[a] != s.snapshot()[a]}
    assert changed <= led.written_addresses()
