"""Words, Cayley balls, and finitely supported kernels for free and free-abelian groups.

Generators are numbered 1..rank and serialized as lowercase letters
("a", "b", ...); inverses are the corresponding capitals.  The symmetric
generating set is ordered (a, A, b, B, ...).  Words are kept in canonical
reduced form so that equality and hashing are structural:

* free groups: no adjacent letter cancels its inverse;
* free-abelian groups: letters sorted by generator, one sign per generator
  (the word is determined by its exponent vector).

All values are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CapabilityError, InputError, ResourceError

FREE = "free"
FREE_ABELIAN = "free_abelian"

DEFAULT_MAX_BALL = 1_000_000
_MAX_BALL_ENV = "AMENCERT_MAX_BALL"


def _max_ball() -> int:
    raw = os.environ.get(_MAX_BALL_ENV)
    if raw is None:
        return DEFAULT_MAX_BALL
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputError(f"{_MAX_BALL_ENV} must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise InputError(f"{_MAX_BALL_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class GroupSpec:
    """A built-in group family with its ordered symmetric generating set."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in (FREE, FREE_ABELIAN):
            raise InputError(f"unknown group family {self.family!r}")
        if not isinstance(self.rank, int) or not 1 <= self.rank <= 26:
            raise InputError(f"rank must be an integer in 1..26, got {self.rank!r}")

    @classmethod
    def free(cls, rank: int) -> "GroupSpec":
        return cls(FREE, rank)

    @classmethod
    def free_abelian(cls, rank: int) -> "GroupSpec":
        return cls(FREE_ABELIAN, rank)

    @property
    def generator_count(self) -> int:
        """Size of the symmetric generating set S."""
        return 2 * self.rank

    @property
    def generator_letters(self) -> tuple[int, ...]:
        """S in its canonical order: (+1, -1, +2, -2, ...)."""
        out = []
        for i in range(1, self.rank + 1):
            out.extend((i, -i))
        return tuple(out)

    def symbol(self, letter: int) -> str:
        i = abs(letter)
        if not 1 <= i <= self.rank or letter == 0:
            raise InputError(f"letter {letter} outside rank {self.rank}")
        ch = chr(ord("a") + i - 1)
        return ch if letter > 0 else ch.upper()

    def letter(self, symbol: str) -> int:
        if len(symbol) != 1 or not symbol.isalpha():
            raise InputError(f"invalid generator symbol {symbol!r}")
        i = ord(symbol.lower()) - ord("a") + 1
        if not 1 <= i <= self.rank:
            raise InputError(f"generator symbol {symbol!r} outside rank {self.rank}")
        return i if symbol.islower() else -i


@dataclass(frozen=True)
class Word:
    """A group element in canonical reduced form; ``letters`` are signed indices."""

    group: GroupSpec
    letters: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        return "".join(self.group.symbol(x) for x in self.letters)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Word({str(self) or 'e'!r})"


def identity(spec: GroupSpec) -> Word:
    return Word(spec, ())


def generators(spec: GroupSpec) -> list[Word]:
    """The symmetric generating set S as Words, in canonical order."""
    return [Word(spec, (x,)) for x in spec.generator_letters]


def _reduce_free(letters: Sequence[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def _exponents(spec: GroupSpec, letters: Iterable[int]) -> list[int]:
    exps = [0] * spec.rank
    for x in letters:
        exps[abs(x) - 1] += 1 if x > 0 else -1
    return exps


def _letters_from_exponents(exps: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for i, e in enumerate(exps, start=1):
        out.extend([i if e > 0 else -i] * abs(e))
    return tuple(out)


def reduce(spec: GroupSpec, letters: Iterable[int | str]) -> Word:
    """Canonical reduced Word from a sequence of letters or symbols."""
    nums = [spec.letter(x) if isinstance(x, str) else int(x) for x in letters]
    for x in nums:
        if x == 0 or abs(x) > spec.rank:
            raise InputError(f"letter {x} outside rank {spec.rank}")
    if spec.family == FREE:
        return Word(spec, _reduce_free(nums))
    return Word(spec, _letters_from_exponents(_exponents(spec, nums)))


def word_from_string(spec: GroupSpec, text: str) -> Word:
    """Parse the string serialization ("a","A","b","B",...; "" is the identity)."""
    return reduce(spec, list(text))


def mul(g: Word, h: Word) -> Word:
    if g.group != h.group:
        raise InputError("cannot multiply words from different groups")
    spec = g.group
    if spec.family == FREE:
        a = list(g.letters)
        for x in h.letters:
            if a and a[-1] == -x:
                a.pop()
            else:
                a.append(x)
        return Word(spec, tuple(a))
    exps = _exponents(spec, g.letters)
    for i, e in enumerate(_exponents(spec, h.letters)):
        exps[i] += e
    return Word(spec, _letters_from_exponents(exps))


def inv(g: Word) -> Word:
    if g.group.family == FREE:
        return Word(g.group, tuple(-x for x in reversed(g.letters)))
    return Word(g.group, _letters_from_exponents([-e for e in _exponents(g.group, g.letters)]))


def word_exponents(g: Word) -> list[int]:
    """Exponent vector of a free-abelian word."""
    if g.group.family != FREE_ABELIAN:
        raise CapabilityError("exponent vectors exist only for free-abelian words")
    return _exponents(g.group, g.letters)


def lattice_word(spec: GroupSpec, exponents: Sequence[int]) -> Word:
    """Free-abelian word with the given exponent vector."""
    if spec.family != FREE_ABELIAN:
        raise CapabilityError("lattice_word requires a free-abelian spec")
    if len(exponents) != spec.rank:
        raise InputError(f"expected {spec.rank} exponents, got {len(exponents)}")
    return Word(spec, _letters_from_exponents([int(e) for e in exponents]))


def sphere_size(spec: GroupSpec, r: int) -> int:
    """Number of elements of word length exactly r (closed form)."""
    if r < 0:
        raise InputError("radius must be nonnegative")
    if r == 0:
        return 1
    if spec.family == FREE:
        k = spec.rank
        return 2 * k * (2 * k - 1) ** (r - 1)
    # free-abelian: vectors with |e|_1 = r in Z^d
    d = spec.rank
    total = 0
    # choose j coordinates nonzero, split r into j positive parts, signs 2^j
    from math import comb

    for j in range(1, min(d, r) + 1):
        total += comb(d, j) * comb(r - 1, j - 1) * 2**j
    return total


def ball_size(spec: GroupSpec, radius: int) -> int:
    return sum(sphere_size(spec, r) for r in range(radius + 1))


@dataclass(frozen=True)
class CayleyBall:
    """All words of length <= radius, breadth-first in generator order."""

    group: GroupSpec
    radius: int
    elements: tuple[Word, ...]
    index: Mapping[Word, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: Word) -> bool:
        return w in self.index


def ball(spec: GroupSpec, radius: int, max_elements: int | None = None) -> CayleyBall:
    """Enumerate the closed ball of the given radius.

    Ordering is deterministic: breadth-first, children visited in the order of
    the symmetric generating set, words extended on the right.  Exceeding the
    resource cap (default 10**6 elements, env AMENCERT_MAX_BALL) is an error.
    """
    if radius < 0:
        raise InputError("radius must be nonnegative")
    cap = _max_ball() if max_elements is None else max_elements
    predicted = ball_size(spec, radius)
    if predicted > cap:
        raise ResourceError(
            f"ball of radius {radius} has {predicted} elements, exceeding the cap {cap}"
        )
    gens = spec.generator_letters
    elements: list[Word] = [identity(spec)]
    index: dict[Word, int] = {elements[0]: 0}
    frontier = [elements[0]]
    for _ in range(radius):
        nxt: list[Word] = []
        for w in frontier:
            for x in gens:
                child = mul(w, Word(spec, (x,)))
                if child.length == w.length + 1 and child not in index:
                    index[child] = len(elements)
                    elements.append(child)
                    nxt.append(child)
        frontier = nxt
    assert len(elements) == predicted, "ball enumeration disagrees with closed form"
    return CayleyBall(spec, radius, tuple(elements), index)


class Kernel:
    """Finitely supported real-valued function on a group.

    Exact zeros are dropped so the support is canonical; all arithmetic is
    pure and returns fresh kernels.
    """

    __slots__ = ("group", "values")

    def __init__(self, group: GroupSpec, values: Mapping[Word, float]):
        vals: dict[Word, float] = {}
        for w, v in values.items():
            if w.group != group:
                raise InputError("kernel entry from a different group")
            fv = float(v)
            if fv != 0.0:
                vals[w] = fv
        self.group = group
        self.values = vals

    @classmethod
    def point_mass(cls, w: Word, value: float = 1.0) -> "Kernel":
        return cls(w.group, {w: value})

    @property
    def support(self):
        return self.values.keys()

    def __getitem__(self, w: Word) -> float:
        return self.values.get(w, 0.0)

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()

    def norm(self) -> float:
        return sum(v * v for v in self.values.values()) ** 0.5

    def inner(self, other: "Kernel") -> float:
        if len(other.values) < len(self.values):
            self, other = other, self
        return sum(v * other.values.get(w, 0.0) for w, v in self.values.items())

    def translate(self, s: Word) -> "Kernel":
        """Left regular translation: (s.f)(g) = f(s^-1 g)."""
        return Kernel(self.group, {mul(s, w): v for w, v in self.values.items()})

    def scaled(self, c: float) -> "Kernel":
        return Kernel(self.group, {w: c * v for w, v in self.values.items()})

    def __add__(self, other: "Kernel") -> "Kernel":
        if self.group != other.group:
            raise InputError("cannot add kernels over different groups")
        out = dict(self.values)
        for w, v in other.values.items():
            out[w] = out.get(w, 0.0) + v
        return Kernel(self.group, out)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        items = ", ".join(f"{str(w) or 'e'}: {v:g}" for w, v in sorted(
            self.values.items(), key=lambda kv: (kv[0].length, str(kv[0]))))
        return f"Kernel({{{items}}})"


def convolve(p: Kernel, q: Kernel) -> Kernel:
    """Group convolution (p*q)(g) = sum_h p(h) q(h^-1 g)."""
    if p.group != q.group:
        raise InputError("cannot convolve kernels over different groups")
    out: dict[Word, float] = {}
    for h, ph in p.items():
        for k, qk in q.items():
            g = mul(h, k)
            out[g] = out.get(g, 0.0) + ph * qk
    return Kernel(p.group, out)
