"""Pure-Python seen-set kernel; interface mirror of the compiled core."""

from __future__ import annotations

_PAIR_BASE = 1 << 32


class PySeenSet:
    """Flat membership set over 64-bit keys with batch probe operations.

    Singleton keys occupy the low 32-bit range; pair keys pack two 32-bit
    form ids into one word with a non-zero high half, so the two key kinds
    never collide inside the same set.
    """

    __slots__ = ("_seen",)

    def __init__(self):
        self._seen: set[int] = set()

    def __len__(self) -> int:
        return len(self._seen)

    def contains(self, key: int) -> bool:
        return int(key) in self._seen

    def add_all(self, keys) -> bool:
        """Insert every key; report whether any was new."""
        seen = self._seen
        before = len(seen)
        seen.update(keys.tolist() if hasattr(keys, "tolist") else [int(k) for k in keys])
        return len(seen) != before

    def lookup_any_new(self, keys) -> bool:
        seen = self._seen
        keys = keys.tolist() if hasattr(keys, "tolist") else keys
        return any(int(k) not in seen for k in keys)

    def add_pairs(self, flat, offsets) -> bool:
        """Cross-atom pair probe: for every atom pair (i, j) with i < j and
        every form combination, insert the packed sorted pair; report any-new."""
        seen = self._seen
        before = len(seen)
        flat = flat.tolist() if hasattr(flat, "tolist") else [int(k) for k in flat]
        offsets = offsets.tolist() if hasattr(offsets, "tolist") else [int(o) for o in offsets]
        n = len(offsets) - 1
        for i in range(n):
            fi = flat[offsets[i]:offsets[i + 1]]
            for j in range(i + 1, n):
                for a in fi:
                    for b in flat[offsets[j]:offsets[j + 1]]:
                        lo, hi = (a, b) if a <= b else (b, a)
                        seen.add((lo + 1) * _PAIR_BASE + hi)
        return len(seen) != before

    def lookup_any_new_pairs(self, flat, offsets) -> bool:
        seen = self._seen
        flat = flat.tolist() if hasattr(flat, "tolist") else [int(k) for k in flat]
        offsets = offsets.tolist() if hasattr(offsets, "tolist") else [int(o) for o in offsets]
        n = len(offsets) - 1
        for i in range(n):
            fi = flat[offsets[i]:offsets[i + 1]]
            for j in range(i + 1, n):
                for a in fi:
                    for b in flat[offsets[j]:offsets[j + 1]]:
                        lo, hi = (a, b) if a <= b else (b, a)
                        if (lo + 1) * _PAIR_BASE + hi not in seen:
                            return True
        return False
