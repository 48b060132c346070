"""Length-preserving black-box functions on n-bit words.

A word of width n is stored as its integer encoding; the first bit of the
word is the most significant bit of the integer, so the word "110" encodes
as 6.  An oracle is a total table mapping every one of the 2**n words to a
word of the same width.  Oracles are immutable; mutation returns a fresh
table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import LengthMismatchError, WidthMismatchError
from .rng import as_generator


@dataclass(frozen=True, order=True)
class BitWord:
    """A fixed-width bit string, canonically encoded as an integer."""

    width: int
    value: int

    def __post_init__(self):
        if self.width < 1:
            raise WidthMismatchError(f"width must be >= 1, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise WidthMismatchError(
                f"value {self.value} out of range for width {self.width}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        bits = list(bits)
        value = 0
        for b in bits:
            value = (value << 1) | (b & 1)
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, s: str) -> "BitWord":
        if not s or any(c not in "01" for c in s):
            raise WidthMismatchError(f"not a bit string: {s!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def zero(cls, width: int) -> "BitWord":
        return cls(width, 0)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.width - 1 - i)) & 1 for i in range(self.width))

    def __xor__(self, other: "BitWord") -> "BitWord":
        if self.width != other.width:
            raise WidthMismatchError("xor of words with different widths")
        return BitWord(self.width, self.value ^ other.value)

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b")


@dataclass(frozen=True)
class OracleTable:
    """A total length-preserving function on words of one width."""

    width: int
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        if v.shape != (1 << self.width,):
            raise LengthMismatchError(
                f"table must have {1 << self.width} entries, got {v.shape}")
        if v.size and (v.min() < 0 or v.max() >= (1 << self.width)):
            raise WidthMismatchError("table entry out of range for width")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __call__(self, x: BitWord) -> BitWord:
        if x.width != self.width:
            raise WidthMismatchError(f"word width {x.width} != oracle width {self.width}")
        return BitWord(self.width, int(self.values[x.value]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, OracleTable)
                and self.width == other.width
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.width, self.values.tobytes()))


@dataclass(frozen=True)
class WordSet:
    """A duplicate-free set of words sharing one width."""

    width: int
    values: frozenset[int]

    @classmethod
    def of(cls, words: Iterable[BitWord]) -> "WordSet":
        words = list(words)
        if not words:
            raise WidthMismatchError("cannot infer width of an empty word set; use empty()")
        width = words[0].width
        if any(w.width != width for w in words):
            raise WidthMismatchError("word set members must share one width")
        return cls(width, frozenset(w.value for w in words))

    @classmethod
    def empty(cls, width: int) -> "WordSet":
        return cls(width, frozenset())

    @property
    def members(self) -> list[BitWord]:
        return [BitWord(self.width, v) for v in sorted(self.values)]

    def __contains__(self, word: BitWord) -> bool:
        return word.width == self.width and word.value in self.values

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[BitWord]:
        return iter(self.members)


def make_oracle(n: int, entries: list[BitWord]) -> OracleTable:
    """Build a table from an explicit list of 2**n output words."""
    if len(entries) != 1 << n:
        raise LengthMismatchError(f"need {1 << n} entries for width {n}, got {len(entries)}")
    for e in entries:
        if e.width != n:
            raise WidthMismatchError(f"entry width {e.width} != {n}")
    return OracleTable(n, np.array([e.value for e in entries], dtype=np.int64))


def sample_uniform_oracle(n: int, seed) -> OracleTable:
    """Draw each of the 2**n table entries independently and uniformly."""
    rng = as_generator(seed)
    return OracleTable(n, rng.integers(0, 1 << n, size=1 << n, dtype=np.int64))


def iterate(f: OracleTable, x: BitWord, k: int) -> BitWord:
    """k-fold application f(f(...f(x))); k = 0 returns x unchanged."""
    if x.width != f.width:
        raise WidthMismatchError(f"word width {x.width} != oracle width {f.width}")
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    v = x.value
    for _ in range(k):
        v = int(f.values[v])
    return BitWord(f.width, v)


def orbit(f: OracleTable, x: BitWord, length: int) -> list[BitWord]:
    """The chain x, f(x), ..., f^(length-1)(x) as a list."""
    out, v = [], x.value
    for _ in range(length):
        out.append(BitWord(f.width, v))
        v = int(f.values[v])
    return out


def mutate(f: OracleTable, x: BitWord, y: BitWord) -> OracleTable:
    """Fresh table equal to f except that x now maps to y."""
    if x.width != f.width or y.width != f.width:
        raise WidthMismatchError("mutation words must match oracle width")
    values = f.values.copy()
    values[x.value] = y.value
    return OracleTable(f.width, values)


def diff_set(f: OracleTable, g: OracleTable) -> WordSet:
    """Exactly the words on which the two tables disagree."""
    if f.width != g.width:
        raise WidthMismatchError("oracles have different widths")
    idx = np.nonzero(f.values != g.values)[0]
    return WordSet(f.width, frozenset(int(i) for i in idx))


def all_oracles(n: int) -> Iterator[OracleTable]:
    """Every table of width n, in lexicographic table order (2**(n*2**n) of them)."""
    size, base = 1 << n, 1 << n
    values = np.zeros(size, dtype=np.int64)
    total = base ** size
    for code in range(total):
        c = code
        for i in range(size - 1, -1, -1):
            values[i] = c % base
            c //= base
        yield OracleTable(n, values.copy())


def oracle_to_text(f: OracleTable) -> str:
    """Text form: "n=<width>" then one "<x> <f(x)>" line per word, ascending x."""
    lines = [f"n={f.width}"]
    for x in range(1 << f.width):
        lines.append(f"{format(x, f'0{f.width}b')} {format(int(f.values[x]), f'0{f.width}b')}")
    return "\n".join(lines) + "\n"


def oracle_from_text(text: str) -> OracleTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("oracle file must start with 'n=<width>'")
    n = int(lines[0][2:])
    if len(lines) != 1 + (1 << n):
        raise LengthMismatchError(f"expected {1 << n} table lines, got {len(lines) - 1}")
    values = np.zeros(1 << n, dtype=np.int64)
    for i, ln in enumerate(lines[1:]):
        xs, ys = ln.split()
        if len(xs) != n or len(ys) != n:
            raise WidthMismatchError(f"line {i + 2}: expected width-{n} words")
        if int(xs, 2) != i:
            raise ValueError(f"line {i + 2}: rows must be in ascending x order")
        values[i] = int(ys, 2)
    return OracleTable(n, values)


def save_oracle(f: OracleTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(oracle_to_text(f))


def load_oracle(path) -> OracleTable:
    with open(path) as fh:
        return oracle_from_text(fh.read())
