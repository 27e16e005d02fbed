"""Plane trees (ordered rooted trees) and the unlabelled rooted-tree code."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ContractViolation


@dataclass(frozen=True, order=True)
class PlaneTree:
    """Radius-``radius`` plane tree stored as breadth-first child counts.

    ``child_counts`` lists the number of children of every vertex at depth
    below ``radius``, in BFS order with children visited left to right.
    Vertices at depth ``radius`` carry no entry.
    """

    child_counts: tuple[int, ...]
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "child_counts", tuple(int(d) for d in self.child_counts))
        if self.radius < 0 or any(d < 0 for d in self.child_counts):
            raise ContractViolation("negative radius or child count")
        if len(self.child_counts) != self._expected_k():
            raise ContractViolation(
                f"{len(self.child_counts)} child counts but {self._expected_k()} vertices below depth {self.radius}"
            )

    def _expected_k(self) -> int:
        counts = self.child_counts
        width, pos, k = 1, 0, 0
        for _ in range(self.radius):
            if width == 0:
                break
            k += width
            nxt = sum(counts[pos : pos + width])
            pos += width
            width = nxt
            if pos > len(counts):
                return -1
        return k

    @property
    def size(self) -> int:
        return 1 + sum(self.child_counts)

    @property
    def k(self) -> int:
        return len(self.child_counts)

    def children(self) -> list[list[int]]:
        """Child lists over BFS ids ``0..size-1`` (root is 0)."""
        ch: list[list[int]] = [[] for _ in range(self.size)]
        nxt = 1
        for v, d in enumerate(self.child_counts):
            ch[v] = list(range(nxt, nxt + d))
            nxt += d
        return ch

    def code(self) -> bytes:
        ch = self.children()
        return ahu_code(ch, range(len(ch)))

    def __str__(self) -> str:
        return f"{self.radius}:" + ",".join(map(str, self.child_counts))

    @classmethod
    def parse(cls, text: str) -> "PlaneTree":
        """Inverse of ``str``: ``"radius:d1,d2,..."``."""
        try:
            r, _, body = text.partition(":")
            counts = tuple(int(x) for x in body.split(",") if x.strip())
            return cls(counts, int(r))
        except ValueError as exc:
            raise ContractViolation(f"bad plane-tree literal {text!r}: {exc}") from None


def ahu_code(children: Sequence[Sequence[int]] | dict, bfs_order) -> bytes:
    """Aho-Hopcroft-Ullman code of the tree rooted at ``bfs_order[0]``.

    Children codes are sorted, so the result depends only on the unlabelled
    rooted tree.
    """
    order = list(bfs_order)
    code: dict[int, str] = {}
    for x in reversed(order):
        ch = children[x]
        if ch:
            code[x] = "(" + "".join(sorted([code[c] for c in ch])) + ")"
        else:
            code[x] = "()"
    return b"T" + code[order[0]].encode("ascii")
