"""Partial traces of spin density matrices and the closed-form two-spin state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .rho import ExactDensityMatrix
from .spin_core import matching_count

LIMIT = math.inf
"""Pass as ``n`` to get the infinite-system two-spin state."""

# sigma.sigma on two spins; basis index bit 0 = first spin, 1 = up
SIGMA_DOT_SIGMA = np.array(
    [[1, 0, 0, 0], [0, -1, 2, 0], [0, 2, -1, 0], [0, 0, 0, 1]], dtype=np.int64
)
SIGMA_ZZ = np.diag([1, -1, -1, 1]).astype(np.int64)
SIGMA_XX = np.fliplr(np.eye(4, dtype=np.int64))


@dataclass(frozen=True)
class SubsystemMask:
    keep: tuple
    n_total: int

    def __post_init__(self):
        keep = tuple(int(k) for k in self.keep)
        if not keep:
            raise InvalidArgumentError("subsystem mask must keep at least one spin")
        if any(b <= a for a, b in zip(keep, keep[1:])):
            raise InvalidArgumentError(f"mask indices must be strictly increasing: {keep}")
        if keep[0] < 0 or keep[-1] >= self.n_total:
            raise InvalidArgumentError(
                f"mask {keep} not within spins 0..{self.n_total - 1}"
            )
        object.__setattr__(self, "keep", keep)

    @classmethod
    def of(cls, keep, n_total):
        return cls(tuple(sorted(set(keep))), n_total)

    @property
    def traced(self):
        return tuple(k for k in range(self.n_total) if k not in self.keep)


def partial_trace(rho, mask):
    """Trace out every spin not listed in ``mask.keep``.

    Bit ``j`` of the reduced basis index refers to spin ``mask.keep[j]``.
    """
    if not isinstance(mask, SubsystemMask):
        mask = SubsystemMask.of(mask, rho.n)
    if mask.n_total != rho.n:
        raise InvalidArgumentError(
            f"mask is for {mask.n_total} spins but the matrix has {rho.n}"
        )
    n = rho.n
    k = len(mask.keep)
    t = n - k
    # tensor axis of spin s is n-1-s (most significant bit first)
    keep_axes = [n - 1 - s for s in reversed(mask.keep)]
    trace_axes = [n - 1 - s for s in mask.traced]
    tensor = rho.numerators.reshape((2,) * (2 * n))
    order = keep_axes + trace_axes + [n + a for a in keep_axes] + [n + a for a in trace_axes]
    arranged = tensor.transpose(order).reshape(2**k, 2**t, 2**k, 2**t)
    reduced = np.einsum("aibi->ab", arranged)
    return ExactDensityMatrix(k, reduced, rho.denom)


def reduce_to_pair(rho, i, j):
    return partial_trace(rho, SubsystemMask.of((i, j), rho.n))


@dataclass(frozen=True)
class TwoSpinWeights:
    """Singlet weight and the common weight of each triplet state."""

    n: float
    w_singlet: Fraction
    w_triplet_each: Fraction

    def matrix(self):
        """4x4 exact matrix ``w_t * I + (w_s - w_t) |S><S|``."""
        ws, wt = self.w_singlet, self.w_triplet_each
        d = ws - wt
        rows = [[Fraction(0)] * 4 for _ in range(4)]
        for a in range(4):
            rows[a][a] = wt
        # |S> = (|up,down> - |down,up>)/sqrt2 sits on indices 1 and 2
        rows[1][1] += d / 2
        rows[2][2] += d / 2
        rows[1][2] -= d / 2
        rows[2][1] -= d / 2
        return ExactDensityMatrix.from_fractions(rows)

    @property
    def correlation(self):
        """<sigma_1 . sigma_2>/3 = w_t - w_s."""
        return self.w_triplet_each - self.w_singlet


def two_spin_reduced_analytic(n):
    """Closed-form reduced state of any two spins of the N-spin ground state.

    ``w_singlet = (N+2)/(4(N-1))`` and ``w_triplet_each = (N-2)/(4(N-1))``.
    ``n=LIMIT`` gives the uncorrelated state I/4.
    """
    if n == LIMIT:
        q = Fraction(1, 4)
        return TwoSpinWeights(LIMIT, q, q)
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise InvalidArgumentError(f"particle count must be an even integer >= 2, got {n!r}")
    n = int(n)
    return TwoSpinWeights(n, Fraction(n + 2, 4 * (n - 1)), Fraction(n - 2, 4 * (n - 1)))


def two_spin_weights_from_matrix(rho2):
    """Read singlet and triplet populations off a reduced two-spin matrix.

    Raises if the matrix is not of singlet/isotropic-triplet form.
    """
    if rho2.n != 2:
        raise InvalidArgumentError("expected a two-spin matrix")
    e = rho2.entry
    ws = (e(1, 1) + e(2, 2) - e(1, 2) - e(2, 1)) / 2
    t_plus, t_minus = e(3, 3), e(0, 0)
    t_zero = (e(1, 1) + e(2, 2) + e(1, 2) + e(2, 1)) / 2
    if not t_plus == t_minus == t_zero:
        raise InvalidArgumentError("triplet populations are not equal")
    weights = TwoSpinWeights(None, ws, t_plus)
    if weights.matrix() != rho2:
        raise InvalidArgumentError("matrix has coherences outside the singlet/triplet form")
    return weights


def expectation(rho2, op):
    """Exact Tr(op @ rho2) for an integer operator ``op``."""
    num = int(np.sum(np.asarray(op, dtype=np.int64).T * rho2.numerators))
    return Fraction(num, rho2.denom)


def pair_correlation(n):
    """-1/(N-1): normalized spin-spin correlation of any pair."""
    if n == LIMIT:
        return Fraction(0)
    return two_spin_reduced_analytic(n).correlation


def pair_correlation_numeric(rho, i=0, j=1):
    """Tr((sigma_i . sigma_j)/3 rho), computed exactly from the reduced pair matrix."""
    return expectation(reduce_to_pair(rho, i, j), SIGMA_DOT_SIGMA) / 3


def pair_summand_counts(n):
    """Matchings that pair spins 0 and 1, and those that do not."""
    together = matching_count(n - 2)
    return together, matching_count(n) - together
