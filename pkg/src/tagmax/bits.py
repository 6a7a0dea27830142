"""Bit-vector helpers shared by the solvers.

A product configuration over m attributes is stored as a plain int in
which attribute 0 occupies the most significant of the m bits.  With
that layout integer order coincides with lexicographic order of the
written vector, which is the tie-break order used everywhere.
"""
from __future__ import annotations


def bit_of(bits: int, i: int, m: int) -> int:
    """Value of attribute i (0-based) in an m-attribute configuration."""
    return (bits >> (m - 1 - i)) & 1


def set_bit(bits: int, i: int, m: int) -> int:
    return bits | (1 << (m - 1 - i))


def flip_bit(bits: int, i: int, m: int) -> int:
    return bits ^ (1 << (m - 1 - i))


def to_string(bits: int, m: int) -> str:
    return format(bits, f"0{m}b")


def from_string(s: str, m: int | None = None) -> int:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    if m is not None and len(s) != m:
        raise ValueError(f"expected {m} bits, got {len(s)}: {s!r}")
    return int(s, 2)


def to_list(bits: int, m: int) -> list[int]:
    return [(bits >> (m - 1 - i)) & 1 for i in range(m)]
