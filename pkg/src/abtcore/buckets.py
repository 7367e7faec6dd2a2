"""Array-of-buckets priority structure keyed by small non-negative integers."""

from __future__ import annotations

from typing import Hashable, Iterator


class BucketQueue:
    """Linear heap: ``buckets[k]`` holds the items whose key is ``k``.

    Key updates are O(1).  ``pop_min`` scans upward from a lazily maintained
    lower bound, and ties inside a bucket go to the smallest item so runs are
    reproducible.
    """

    def __init__(self) -> None:
        self._key: dict[Hashable, int] = {}
        self._buckets: list[set] = []
        self._lo = 0

    def __len__(self) -> int:
        return len(self._key)

    def __contains__(self, item) -> bool:
        return item in self._key

    def __iter__(self) -> Iterator:
        return iter(self._key)

    def key(self, item) -> int:
        return self._key[item]

    def _bucket(self, k: int) -> set:
        while len(self._buckets) <= k:
            self._buckets.append(set())
        return self._buckets[k]

    def insert(self, item, k: int) -> None:
        if k < 0:
            raise ValueError("bucket keys must be non-negative")
        old = self._key.get(item)
        if old is not None:
            if old == k:
                return
            self._buckets[old].discard(item)
        self._key[item] = k
        self._bucket(k).add(item)
        if k < self._lo:
            self._lo = k

    update = insert

    def discard(self, item) -> None:
        k = self._key.pop(item, None)
        if k is not None:
            self._buckets[k].discard(item)

    def bucket(self, k: int) -> frozenset:
        if k < len(self._buckets):
            return frozenset(self._buckets[k])
        return frozenset()

    def take(self, k: int) -> set:
        """Remove and return every item with key ``k``."""
        if k >= len(self._buckets):
            return set()
        items = self._buckets[k]
        self._buckets[k] = set()
        for it in items:
            del self._key[it]
        return items

    def min_key(self) -> int | None:
        if not self._key:
            return None
        while not self._buckets[self._lo]:
            self._lo += 1
        return self._lo

    def pop_min(self):
        """Remove and return ``(item, key)`` with the smallest key."""
        k = self.min_key()
        if k is None:
            raise IndexError("pop from empty BucketQueue")
        b = self._buckets[k]
        item = min(b)
        b.discard(item)
        del self._key[item]
        return item, k

    def copy(self) -> "BucketQueue":
        q = BucketQueue()
        q._key = dict(self._key)
        q._buckets = [set(b) for b in self._buckets]
        q._lo = self._lo
        return q
