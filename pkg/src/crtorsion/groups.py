"""Deck groups with a decidable word problem: trivial, Z, Z/p, free groups.

Elements are canonical data (empty tuple, integer, residue, or freely
reduced word), so equality is structural and total orders for canonical
forms come from ``sort_key``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

_FREE_LETTERS = "abcdefgh"


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class DeckGroup:
    kind: str  # trivial | infinite_cyclic | cyclic_mod_p | free_on_k
    p: int = 0
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("trivial", "infinite_cyclic", "cyclic_mod_p", "free_on_k"):
            raise GroupError(f"unknown deck group kind {self.kind!r}")
        if self.kind == "cyclic_mod_p" and self.p < 1:
            raise GroupError("cyclic group order must be positive")
        if self.kind == "free_on_k" and not (1 <= self.k <= len(_FREE_LETTERS)):
            raise GroupError(f"free rank must be between 1 and {len(_FREE_LETTERS)}")

    @property
    def generator_names(self) -> tuple[str, ...]:
        if self.kind == "trivial":
            return ()
        if self.kind in ("infinite_cyclic", "cyclic_mod_p"):
            return ("t",)
        return tuple(_FREE_LETTERS[: self.k])

    def identity(self) -> "GroupElement":
        if self.kind == "trivial":
            return GroupElement(self, ())
        if self.kind in ("infinite_cyclic", "cyclic_mod_p"):
            return GroupElement(self, 0)
        return GroupElement(self, ())

    def generator(self, name: str = None) -> "GroupElement":
        names = self.generator_names
        if not names:
            raise GroupError("trivial group has no generators")
        if name is None:
            name = names[0]
        if name not in names:
            raise GroupError(f"unknown generator {name!r}")
        if self.kind in ("infinite_cyclic", "cyclic_mod_p"):
            return GroupElement(self, 1 % self.p if self.kind == "cyclic_mod_p" else 1)
        return GroupElement(self, ((names.index(name), 1),))

    def element_from_word(self, word: str) -> "GroupElement":
        """Parse gauge words like "e", "t^3", "t^-1", "a*b^-2"."""
        word = word.strip()
        if word in ("e", "1", ""):
            return self.identity()
        out = self.identity()
        for token in word.split("*"):
            m = re.fullmatch(r"([a-z])(?:\^(-?\d+))?", token.strip())
            if not m:
                raise GroupError(f"malformed gauge word {word!r}")
            name, exp = m.group(1), int(m.group(2) or 1)
            out = out * (self.generator(name) ** exp)
        return out


@dataclass(frozen=True)
class GroupElement:
    group: DeckGroup
    data: object  # (), int, or reduced word tuple of (gen_index, exponent)

    def _check(self, other: "GroupElement"):
        if self.group != other.group:
            raise GroupError("mixed-group arithmetic")

    @property
    def is_identity(self) -> bool:
        return self.data == () or self.data == 0

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        kind = self.group.kind
        if kind == "trivial":
            return self
        if kind == "infinite_cyclic":
            return GroupElement(self.group, self.data + other.data)
        if kind == "cyclic_mod_p":
            return GroupElement(self.group, (self.data + other.data) % self.group.p)
        return GroupElement(self.group, _reduce_word(tuple(self.data) + tuple(other.data)))

    def inverse(self) -> "GroupElement":
        kind = self.group.kind
        if kind == "trivial":
            return self
        if kind == "infinite_cyclic":
            return GroupElement(self.group, -self.data)
        if kind == "cyclic_mod_p":
            return GroupElement(self.group, (-self.data) % self.group.p)
        return GroupElement(self.group, tuple((g, -e) for g, e in reversed(self.data)))

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.group.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sort_key(self):
        if isinstance(self.data, int):
            return (abs(self.data), self.data)
        return tuple(self.data)

    def word(self) -> str:
        kind = self.group.kind
        if self.is_identity:
            return "e"
        if kind in ("infinite_cyclic", "cyclic_mod_p"):
            return "t" if self.data == 1 else f"t^{self.data}"
        names = self.group.generator_names
        parts = []
        for g, e in self.data:
            parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        return self.word()


def _reduce_word(word: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in word:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)
