"""Spin-1/2 basis bookkeeping, Rumer pairings and exact singlet-product vectors.

Basis convention: a basis index is an ``n``-bit word in which bit ``k`` is 1
when spin ``k`` points up and 0 when it points down.  Spin 0 is the least
significant bit.  Labels such as ``"↑↓↑↓"`` list spin 0 first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError, dense_bytes, format_bytes

DEFAULT_MAX_N = 12

UP = "↑"
DOWN = "↓"


def check_particle_count(n, max_n=DEFAULT_MAX_N, *, minimum=2):
    """Validate an even particle count against ``[minimum, max_n]``."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise InvalidArgumentError(f"particle count must be an integer, got {n!r}")
    if n % 2:
        raise InvalidArgumentError(f"particle count must be even, got n={n}")
    if n < minimum:
        raise InvalidArgumentError(f"particle count must be >= {minimum}, got n={n}")
    if max_n is not None and n > max_n:
        need = dense_bytes(n)
        raise ResourceLimitError(
            f"n={n} exceeds max_n={max_n}; a dense {2**n}x{2**n} matrix needs "
            f"~{format_bytes(need)}",
            n=n,
            max_n=max_n,
            bytes_estimate=need,
        )
    return int(n)


def popcount(x):
    return bin(x).count("1")


def sz_twice(bits, n):
    """Twice the total S_z of a basis word: (#up - #down)."""
    return 2 * popcount(bits) - n


def sz_of(bits, n):
    return Fraction(sz_twice(bits, n), 2)


def sz_twice_array(n):
    """Vector of 2*S_z for every basis index of ``n`` spins."""
    idx = np.arange(2**n)
    ups = np.zeros(2**n, dtype=np.int64)
    for k in range(n):
        ups += (idx >> k) & 1
    return 2 * ups - n


def sz_zero_indices(n):
    return np.flatnonzero(sz_twice_array(n) == 0)


@dataclass(frozen=True)
class SpinBasisState:
    bits: int
    n: int

    def __post_init__(self):
        if not 0 <= self.bits < 2**self.n:
            raise InvalidArgumentError(f"bits={self.bits} out of range for n={self.n}")

    @classmethod
    def from_label(cls, label):
        bits = 0
        for k, ch in enumerate(label):
            if ch in (UP, "u", "U", "1"):
                bits |= 1 << k
            elif ch not in (DOWN, "d", "D", "0"):
                raise InvalidArgumentError(f"bad spin symbol {ch!r} in {label!r}")
        return cls(bits, len(label))

    @property
    def label(self):
        return "".join(UP if (self.bits >> k) & 1 else DOWN for k in range(self.n))

    @property
    def sz(self):
        return sz_of(self.bits, self.n)

    def __str__(self):
        return self.label


def basis_label(bits, n):
    return SpinBasisState(bits, n).label


# --------------------------------------------------------------------------
# perfect matchings


@dataclass(frozen=True, order=True)
class PerfectMatching:
    """A partition of ``0..n-1`` into unordered pairs, kept in canonical form."""

    pairs: tuple

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        covered = sorted(i for p in canon for i in p)
        if any(len(p) != 2 for p in canon) or covered != list(range(len(covered))):
            raise InvalidArgumentError(f"not a perfect matching of 0..n-1: {self.pairs!r}")
        object.__setattr__(self, "pairs", canon)

    @property
    def n(self):
        return 2 * len(self.pairs)

    def partner(self, i):
        for k, l in self.pairs:
            if k == i:
                return l
            if l == i:
                return k
        raise InvalidArgumentError(f"spin {i} not in matching")

    def __str__(self):
        return "".join(f"({k}{l})" if self.n <= 10 else f"({k},{l})" for k, l in self.pairs)


def matching_count(n):
    """n! / (2^(n/2) (n/2)!), the number of Rumer pairings of n spins."""
    if n % 2 or n < 0:
        raise InvalidArgumentError(f"particle count must be even and non-negative, got n={n}")
    return factorial(n) // (2 ** (n // 2) * factorial(n // 2))


def _matchings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + tail


def enumerate_matchings(n, max_n=DEFAULT_MAX_N):
    """All perfect matchings of ``n`` spins in lexicographic order.

    Pairing the smallest free index with each candidate partner in increasing
    order yields canonical pair lists that are already sorted.
    """
    n = check_particle_count(n, max_n)
    return [PerfectMatching(pairs) for pairs in _matchings(tuple(range(n)))]


# --------------------------------------------------------------------------
# exact vectors


@dataclass(frozen=True)
class ExactVector:
    """Integer amplitudes scaled by ``2**(-norm_exponent/2)``."""

    n: int
    amps: dict = field(hash=False)
    norm_exponent: int

    def to_dense(self):
        out = np.zeros(2**self.n, dtype=np.int64)
        for idx, a in self.amps.items():
            out[idx] = a
        return out

    def to_float(self):
        return self.to_dense() * 2.0 ** (-self.norm_exponent / 2)

    def norm_squared(self):
        return Fraction(sum(a * a for a in self.amps.values()), 2**self.norm_exponent)

    def __neg__(self):
        return ExactVector(self.n, {k: -v for k, v in self.amps.items()}, self.norm_exponent)


def singlet_product(pairs, n):
    """Product of two-spin singlets over ordered ``(k, l)`` pairs.

    Each factor is ``|↑_k ↓_l> - |↓_k ↑_l>``, so the order inside a pair fixes
    its sign.  Pairs must be disjoint and cover all ``n`` spins.
    """
    flat = sorted(i for p in pairs for i in p)
    if flat != list(range(n)):
        raise InvalidArgumentError(f"pairs {pairs!r} do not cover 0..{n - 1}")
    amps = {0: 1}
    for k, l in pairs:
        nxt = {}
        for idx, a in amps.items():
            nxt[idx | (1 << k)] = a
            nxt[idx | (1 << l)] = -a
        amps = nxt
    return ExactVector(n, dict(sorted(amps.items())), len(pairs))


def pairing_state(m):
    """Normalized singlet product for a canonical matching (``+1`` on ↑ at the smaller index)."""
    return singlet_product(m.pairs, m.n)


def overlap(a, b):
    """Exact inner product of two real exact vectors."""
    if a.n != b.n:
        raise InvalidArgumentError(f"overlap of vectors with n={a.n} and n={b.n}")
    if len(a.amps) > len(b.amps):
        a, b = b, a
    dot = sum(v * b.amps.get(k, 0) for k, v in a.amps.items())
    e = a.norm_exponent + b.norm_exponent
    if e % 2:
        if dot == 0:
            return Fraction(0)
        raise InvalidArgumentError("overlap is irrational for odd combined norm exponent")
    return Fraction(dot, 2 ** (e // 2))


def gram_matrix(vectors):
    return [[overlap(u, v) for v in vectors] for u in vectors]


# --------------------------------------------------------------------------
# operators


def permute_spins_indices(perm, n):
    """Basis index map for relabelling spin ``k`` as spin ``perm[k]``."""
    idx = np.arange(2**n)
    out = np.zeros_like(idx)
    for k in range(n):
        out |= ((idx >> k) & 1) << perm[k]
    return out


def total_spin_operator(n, axis):
    """Dense sum over spins of the Pauli matrix on ``axis`` (``x``, ``y`` or ``z``).

    Real for ``x`` and ``z``; complex for ``y``.
    """
    dim = 2**n
    idx = np.arange(dim)
    if axis == "z":
        return np.diag(sz_twice_array(n)).astype(float)
    dtype = float if axis == "x" else complex
    op = np.zeros((dim, dim), dtype=dtype)
    for k in range(n):
        flipped = idx ^ (1 << k)
        if axis == "x":
            op[flipped, idx] += 1
        elif axis == "y":
            # sigma_y |up> = i|down>, sigma_y |down> = -i|up>
            up = (idx >> k) & 1
            op[flipped, idx] += np.where(up == 1, 1j, -1j)
        else:
            raise InvalidArgumentError(f"axis must be x, y or z, got {axis!r}")
    return op


def total_spin_squared_sz0(n):
    """4*S^2 restricted to the S_z = 0 sector, as an integer matrix.

    Uses S^2 = n(4 - n)/4 + sum_{i<j} SWAP_ij.  Returns ``(matrix, indices)``
    where ``indices`` are the full-space basis indices of the sector.
    """
    sector = sz_zero_indices(n)
    pos = {int(b): i for i, b in enumerate(sector)}
    dim = len(sector)
    mat = np.zeros((dim, dim), dtype=np.int64)
    mat[np.diag_indices(dim)] = n * (4 - n)
    for col, b in enumerate(sector):
        b = int(b)
        for i in range(n):
            for j in range(i + 1, n):
                bi, bj = (b >> i) & 1, (b >> j) & 1
                if bi == bj:
                    mat[col, col] += 4
                else:
                    swapped = b ^ ((1 << i) | (1 << j))
                    mat[pos[swapped], col] += 4
    return mat, sector
