"""Bit-addressable storage with exact probe accounting.

Every read or write of a single bit goes through :class:`BitStore`, and is
appended to each ledger that is currently open on the store.  Ledgers are
opened per logical operation::

    store = BitStore(64)
    with store.ledger() as led:
        store.write_field(0, 4, 9)
        store.read_bit(3)
    led.probe_count  # 5

Nested ``ledger()`` blocks all receive the probes made inside them, so a
composite operation's count is the sum of its parts.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterable, Iterator, Sequence

from .errors import AddressError

MAX_FIELD_WIDTH = 64


class ProbeLedger:
    """Reads and writes performed during one logical operation."""

    __slots__ = ("reads", "writes", "_closed")

    def __init__(self) -> None:
        self.reads: list[int] | tuple[int, ...] = []
        self.writes: list[tuple[int, int]] | tuple[tuple[int, int], ...] = []
        self._closed = False

    @property
    def probe_count(self) -> int:
        return len(self.reads) + len(self.writes)

    @property
    def read_count(self) -> int:
        return len(self.reads)

    @property
    def write_count(self) -> int:
        return len(self.writes)

    @property
    def closed(self) -> bool:
        return self._closed

    def written_addresses(self) -> set[int]:
        return {a for a, _ in self.writes}

    def _close(self) -> None:
        self.reads = tuple(self.reads)
        self.writes = tuple(self.writes)
        self._closed = True

    def __repr__(self) -> str:
        return f"ProbeLedger(reads={self.read_count}, writes={self.write_count})"


class BitStore:
    """A fixed-capacity array of bits.

    Parameters
    ----------
    capacity : int
        Number of addressable bits.
    content : iterable of int, optional
        Initial bit values; defaults to all zeros.
    """

    def __init__(self, capacity: int, content: Iterable[int] | None = None) -> None:
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        if content is None:
            self._bits = bytearray(capacity)
        else:
            self._bits = bytearray(1 if b else 0 for b in content)
            if len(self._bits) != capacity:
                raise ValueError("content length does not match capacity")
        self._active: list[ProbeLedger] = []

    # ledger handling

    @contextmanager
    def ledger(self) -> Iterator[ProbeLedger]:
        led = ProbeLedger()
        self._active.append(led)
        try:
            yield led
        finally:
            self._active.remove(led)
            led._close()

    def _check(self, addr: int) -> None:
        if not 0 <= addr < self.capacity:
            raise AddressError(f"bit address {addr} outside [0, {self.capacity})")

    # single bits

    def read_bit(self, addr: int) -> int:
        self._check(addr)
        for led in self._active:
            led.reads.append(addr)
        return self._bits[addr]

    def write_bit(self, addr: int, v: int) -> None:
        self._check(addr)
        v = 1 if v else 0
        for led in self._active:
            led.writes.append((addr, v))
        self._bits[addr] = v

    # fields, most significant bit first

    def _check_field(self, offset: int, width: int) -> None:
        if width < 0 or width > MAX_FIELD_WIDTH:
            raise AddressError(f"field width {width} outside [0, {MAX_FIELD_WIDTH}]")
        if offset < 0 or offset + width > self.capacity:
            raise AddressError(
                f"field [{offset}, {offset + width}) outside [0, {self.capacity})"
            )

    def read_field(self, offset: int, width: int) -> int:
        self._check_field(offset, width)
        value = 0
        for addr in range(offset, offset + width):
            value = (value << 1) | self.read_bit(addr)
        return value

    def write_field(self, offset: int, width: int, value: int) -> None:
        self._check_field(offset, width)
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        for k in range(width):
            self.write_bit(offset + k, (value >> (width - 1 - k)) & 1)

    # bit runs of arbitrary length (still probe-counted bit by bit)

    def read_bits(self, offset: int, length: int) -> list[int]:
        if length < 0 or offset < 0 or offset + length > self.capacity:
            raise AddressError(f"run [{offset}, {offset + length}) outside store")
        return [self.read_bit(a) for a in range(offset, offset + length)]

    def write_bits(self, offset: int, bits: Sequence[int]) -> None:
        if offset < 0 or offset + len(bits) > self.capacity:
            raise AddressError(f"run [{offset}, {offset + len(bits)}) outside store")
        for k, b in enumerate(bits):
            self.write_bit(offset + k, b)

    # unmetered access, for serialization and test oracles only

    def snapshot(self) -> bytes:
        return bytes(self._bits)

    def peek(self, addr: int) -> int:
        self._check(addr)
        return self._bits[addr]

    def copy(self) -> "BitStore":
        return BitStore(self.capacity, self._bits)

    def __len__(self) -> int:
        return self.capacity

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStore):
            return NotImplemented
        return self._bits == other._bits

    def __repr__(self) -> str:
        return f"BitStore(capacity={self.capacity})"


def replay(initial: bytes, ledger: ProbeLedger) -> bytes:
    """Apply a ledger's writes, in order, to a copy of ``initial``."""
    out = bytearray(initial)
    for addr, v in ledger.writes:
        out[addr] = v
    return bytes(out)
