"""Permutations of ``[1, r]`` and Young subgroups."""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Sequence


class Permutation:
    """A bijection of ``{1..r}``; ``img[x-1]`` is the image of ``x``.

    Products compose right to left: ``(s * t)(x) == s(t(x))``.
    """

    __slots__ = ("img", "_sign")

    def __init__(self, images: Sequence[int]):
        img = tuple(int(x) for x in images)
        if sorted(img) != list(range(1, len(img) + 1)):
            raise ValueError(f"{img} is not a permutation of 1..{len(img)}")
        self.img = img
        self._sign = None

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(range(1, r + 1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], r: int) -> "Permutation":
        img = list(range(1, r + 1))
        seen = set()
        for cyc in cycles:
            cyc = list(cyc)
            for x in cyc:
                if not 1 <= x <= r:
                    raise ValueError(f"{x} outside 1..{r}")
                if x in seen:
                    raise ValueError(f"{x} appears twice")
                seen.add(x)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(img)

    @classmethod
    def parse(cls, text: str, r: int) -> "Permutation":
        """Cycle notation, fixed points may be omitted: ``"(1 4 5)(2 6 7)"``; ``""`` or ``"()"`` is the identity."""
        text = text.strip()
        if re.sub(r"\(([\d\s,]*)\)", "", text).strip():
            raise ValueError(f"cannot parse permutation {text!r}")
        cycles = [
            [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
            for body in re.findall(r"\(([\d\s,]*)\)", text)
        ]
        return cls.from_cycles([c for c in cycles if c], r)

    @property
    def r(self) -> int:
        return len(self.img)

    def __call__(self, x: int) -> int:
        return self.img[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.r != other.r:
            raise ValueError("permutations of different degree")
        return Permutation(tuple(self.img[y - 1] for y in other.img))

    def inverse(self) -> "Permutation":
        inv = [0] * self.r
        for x, y in enumerate(self.img, 1):
            inv[y - 1] = x
        return Permutation(inv)

    def cycles(self, fixed: bool = True) -> list[tuple[int, ...]]:
        """Cycles, each starting at its least element, ordered by that element."""
        seen = set()
        out = []
        for x in range(1, self.r + 1):
            if x in seen:
                continue
            cyc = [x]
            seen.add(x)
            y = self(x)
            while y != x:
                cyc.append(y)
                seen.add(y)
                y = self(y)
            if fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    @property
    def sign(self) -> int:
        if self._sign is None:
            self._sign = -1 if (self.r - len(self.cycles())) % 2 else 1
        return self._sign

    def is_identity(self) -> bool:
        return all(x == i for i, x in enumerate(self.img, 1))

    def preserves(self, block: Iterable[int]) -> bool:
        block = set(block)
        return {self(x) for x in block} == block

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.img == other.img

    def __lt__(self, other):
        return self.img < other.img

    def __hash__(self):
        return hash(self.img)

    def __str__(self):
        cyc = self.cycles(fixed=False)
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"

    def __repr__(self):
        return f"Permutation({self})"


def all_permutations(r: int) -> Iterator[Permutation]:
    """S_r in lexicographic order of image tuples."""
    for p in itertools.permutations(range(1, r + 1)):
        yield Permutation(p)


def young_subgroup(layers: Sequence[Iterable[int]], r: int) -> Iterator[Permutation]:
    """All permutations of ``[1, r]`` preserving each layer (and fixing points outside the layers)."""
    layers = [tuple(sorted(l)) for l in layers]
    for choice in itertools.product(*(itertools.permutations(l) for l in layers)):
        img = list(range(1, r + 1))
        for src, dst in zip(layers, choice):
            for a, b in zip(src, dst):
                img[a - 1] = b
        yield Permutation(img)


def left_coset_representatives(group: Sequence[Permutation], subgroup: Sequence[Permutation]) -> list[Permutation]:
    """One representative of each left coset ``g H``: the least element (by image tuple) of the coset."""
    sub = list(subgroup)
    covered = set()
    reps = []
    for g in sorted(group):
        if g in covered:
            continue
        reps.append(g)
        covered.update(g * h for h in sub)
    return reps
