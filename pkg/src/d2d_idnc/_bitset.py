"""Small helpers for int-as-bitset manipulation."""

from __future__ import annotations

from typing import Iterable


def bits(mask: int) -> list[int]:
    """Indices of set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1
