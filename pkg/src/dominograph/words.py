"""Words over Z/q: rotation, periods, necklaces and Lyndon words.

Words are immutable tuples of residues tagged with their modulus.  The
counting function :func:`count_lyndon` evaluates the closed form for the
number of Lyndon words with prescribed trace; :func:`count_lyndon_bruteforce`
is the exhaustive oracle it is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator, List, Sequence

DEFAULT_WORK_LIMIT = 10**7


class ParameterError(ValueError):
    """Raised when (n, q, t) lies outside n >= 1, q >= 2, 0 <= t < q."""


class WorkLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Word:
    symbols: tuple
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ParameterError(f"modulus must be >= 2, got {self.q}")
        if len(self.symbols) < 1:
            raise ParameterError("words have length >= 1")
        for s in self.symbols:
            if not 0 <= s < self.q:
                raise ParameterError(f"symbol {s} out of range for q={self.q}")

    @classmethod
    def parse(cls, text: str, q: int) -> "Word":
        """Parse ``"011011"`` (q <= 10) or ``"3,11,0"`` (any q)."""
        text = text.strip()
        if "," in text:
            syms = tuple(int(p) for p in text.split(","))
        else:
            syms = tuple(int(c) for c in text)
        return cls(syms, q)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        if self.q <= 10:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)


@dataclass(frozen=True)
class Necklace:
    canonical: Word
    period: int
    lyndon_subword: Word

    @property
    def size(self) -> int:
        # a rotation class has exactly `period` distinct members
        return self.period

    def __str__(self):
        return f"[{self.canonical}]"


def check_parameters(n: int, q: int, t: int) -> None:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if q < 2:
        raise ParameterError(f"q must be >= 2, got {q}")
    if not 0 <= t < q:
        raise ParameterError(f"t must satisfy 0 <= t < q, got t={t}, q={q}")


def trace(w: Word) -> int:
    return sum(w.symbols) % w.q


def rotate(w: Word, k: int = 1) -> Word:
    """Left rotation: a_1 a_2 ... a_n -> a_2 ... a_n a_1 (applied k times)."""
    k %= len(w.symbols)
    return Word(w.symbols[k:] + w.symbols[:k], w.q)


def _period(syms: Sequence[int]) -> int:
    n = len(syms)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(syms[d:]) + tuple(syms[:d]) == tuple(syms):
            return d
    return n  # unreachable: d = n always matches


def period(w: Word) -> int:
    """Least d >= 1 with rotate^d(w) == w.  Always divides len(w)."""
    return _period(w.symbols)


def least_rotation(w: Word) -> Word:
    s = w.symbols
    return Word(min(s[i:] + s[:i] for i in range(len(s))), w.q)


def lyndon_subword(w: Word) -> Word:
    least = least_rotation(w)
    return Word(least.symbols[: period(w)], w.q)


def is_lyndon(w: Word) -> bool:
    """True iff w is strictly smaller than each of its nontrivial rotations."""
    s = w.symbols
    return all(s < s[i:] + s[:i] for i in range(1, len(s)))


def _words_with_trace(n: int, q: int, t: int) -> Iterator[tuple]:
    # the last symbol is forced, so lexicographic order of the free prefix
    # is lexicographic order of the whole word
    for prefix in itertools.product(range(q), repeat=n - 1):
        yield prefix + ((t - sum(prefix)) % q,)


def enumerate_words(n: int, q: int, t: int) -> List[Word]:
    """All words of length n over Z/q with trace t, lexicographically."""
    check_parameters(n, q, t)
    return [Word(s, q) for s in _words_with_trace(n, q, t)]


def enumerate_necklaces(n: int, q: int, t: int) -> List[Necklace]:
    """One :class:`Necklace` per rotation class of the trace-t words."""
    check_parameters(n, q, t)
    seen = {}
    for syms in _words_with_trace(n, q, t):
        canon = min(syms[i:] + syms[:i] for i in range(n))
        if canon not in seen:
            d = _period(canon)
            seen[canon] = Necklace(Word(canon, q), d, Word(canon[:d], q))
    return [seen[k] for k in sorted(seen)]


def divisors(n: int) -> List[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def moebius(d: int) -> int:
    if d < 1:
        raise ParameterError(f"moebius is defined for d >= 1, got {d}")
    result = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    if d > 1:
        result = -result
    return result


def count_lyndon(n: int, q: int, t: int) -> int:
    """Number of Lyndon words of length n over Z/q with trace t.

    Sums gcd(d, q) * mu(d) * q**(n/d) over divisors d of n with gcd(d, q)
    dividing t, then divides by q*n.  Exact integer arithmetic throughout.
    """
    check_parameters(n, q, t)
    total = 0
    for d in divisors(n):
        g = gcd(d, q)
        if t % g == 0:
            total += g * moebius(d) * q ** (n // d)
    quot, rem = divmod(total, q * n)
    if rem:
        raise ArithmeticError(
            f"Lyndon sum {total} not divisible by {q * n} for (n,q,t)=({n},{q},{t})")
    return quot


def count_lyndon_total(n: int, q: int) -> int:
    """Classical count of all Lyndon words of length n over q letters."""
    total = sum(moebius(d) * q ** (n // d) for d in divisors(n))
    assert total % n == 0
    return total // n


def count_lyndon_bruteforce(n: int, q: int, t: int,
                            work_limit: int = DEFAULT_WORK_LIMIT) -> int:
    """Count Lyndon words in A^n_t by scanning every word of trace t."""
    check_parameters(n, q, t)
    if q ** (n - 1) > work_limit:
        raise WorkLimitExceeded(
            f"{q}^{n - 1} words exceed the work limit {work_limit}")
    count = 0
    for s in _words_with_trace(n, q, t):
        if all(s < s[i:] + s[:i] for i in range(1, n)):
            count += 1
    return count
