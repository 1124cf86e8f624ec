"""Ground-state spin density matrices of N paired spin-1/2 fermions.

Three constructions are provided and are expected to agree:

* :func:`build_rho_pairing` - uniform mixture of all Rumer pairing projectors.
* :func:`build_rho_slater_oracle` - brute-force antisymmetrization of a closed-shell
  Slater determinant followed by a trace over orthonormal orbital labels.
* :func:`build_singlet_projector` - the projector onto total spin S = 0, which
  divided by its rank is the maximally mixed singlet state.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidArgumentError, UnsupportedSizeError
from .spin_core import (
    DEFAULT_MAX_N,
    check_particle_count,
    enumerate_matchings,
    pairing_state,
    permute_spins_indices,
    sz_twice_array,
    total_spin_squared_sz0,
)

SLATER_ORACLE_MAX_N = 8
ENTROPY_CUTOFF = 1e-12
PSD_TOLERANCE = 1e-10
# float64 holds every integer below this exactly
_EXACT_FLOAT_LIMIT = 2**53


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ExactDensityMatrix:
    """Real ``2**n x 2**n`` matrix ``numerators / denom`` with integer numerators.

    The fraction is kept reduced (gcd of all numerators and ``denom`` is 1), so
    two matrices are equal exactly when ``n``, ``denom`` and ``numerators`` all
    match.  Partially transposed matrices use the same type even though they
    need not be positive semidefinite.
    """

    n: int
    numerators: np.ndarray
    denom: int

    def __post_init__(self):
        num = np.asarray(self.numerators)
        if num.dtype == object:
            num = num.astype(np.int64)
        if num.shape != (2**self.n, 2**self.n):
            raise InvalidArgumentError(
                f"numerator grid shape {num.shape} does not match n={self.n}"
            )
        denom = int(self.denom)
        if denom <= 0:
            raise InvalidArgumentError("denominator must be positive")
        g = math.gcd(int(np.gcd.reduce(num, axis=None)) if num.size else 0, denom)
        if g > 1:
            num = num // g
            denom //= g
        object.__setattr__(self, "numerators", _readonly(num.astype(np.int64, copy=False)))
        object.__setattr__(self, "denom", denom)

    @classmethod
    def from_fractions(cls, rows):
        rows = [[Fraction(x) for x in row] for row in rows]
        dim = len(rows)
        n = dim.bit_length() - 1
        den = 1
        for row in rows:
            for x in row:
                den = math.lcm(den, x.denominator)
        num = np.array([[int(x * den) for x in row] for row in rows], dtype=np.int64)
        return cls(n, num, den)

    @property
    def dim(self):
        return 2**self.n

    @cached_property
    def float_view(self):
        return _readonly(self.numerators / self.denom)

    def entry(self, i, j):
        return Fraction(int(self.numerators[i, j]), self.denom)

    def trace(self):
        return Fraction(int(np.trace(self.numerators)), self.denom)

    def is_symmetric(self):
        return bool(np.array_equal(self.numerators, self.numerators.T))

    def min_eigenvalue(self):
        vals = block_eigvalsh(self.float_view)
        return float(vals.min()) if vals.size else 0.0

    def check_invariants(self, psd_tol=PSD_TOLERANCE):
        """Raise if the matrix is not a symmetric, trace-one, PSD density matrix."""
        if not self.is_symmetric():
            raise DomainError("density matrix is not symmetric")
        if self.trace() != 1:
            raise DomainError(f"density matrix has trace {self.trace()}, expected 1")
        lo = self.min_eigenvalue()
        if lo < -psd_tol:
            raise DomainError(f"density matrix has eigenvalue {lo:.3e} < -{psd_tol}")

    def scaled(self, factor):
        factor = Fraction(factor)
        return ExactDensityMatrix(
            self.n, self.numerators * factor.numerator, self.denom * factor.denominator
        )

    def rank(self, tol=ENTROPY_CUTOFF):
        vals = block_eigvalsh(self.float_view)
        return int(np.sum(np.abs(vals) > tol))

    def nonzero_support(self):
        """Basis indices whose row or column holds a nonzero entry."""
        return np.flatnonzero(np.any(self.numerators != 0, axis=0) | np.any(self.numerators != 0, axis=1))

    def checksum(self):
        h = hashlib.sha256()
        h.update(f"{self.n}:{self.denom}:".encode())
        h.update(np.ascontiguousarray(self.numerators, dtype="<i8").tobytes())
        return h.hexdigest()

    def permuted(self, perm):
        """Relabel spin ``k`` as spin ``perm[k]``."""
        m = permute_spins_indices(perm, self.n)
        out = np.empty_like(self.numerators)
        out[np.ix_(m, m)] = self.numerators
        return ExactDensityMatrix(self.n, out, self.denom)

    def __eq__(self, other):
        if not isinstance(other, ExactDensityMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.denom == other.denom
            and np.array_equal(self.numerators, other.numerators)
        )

    __hash__ = None

    def __repr__(self):
        return f"ExactDensityMatrix(n={self.n}, denom={self.denom}, nnz={int(np.count_nonzero(self.numerators))})"


def block_eigvalsh(matrix):
    """Eigenvalues of a symmetric matrix, solved block by block.

    Blocks are the connected components of the nonzero pattern, so a matrix
    that is block diagonal up to a basis permutation is never diagonalized
    as a whole.  Returned sorted ascending.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    matrix = np.asarray(matrix)
    dim = matrix.shape[0]
    pattern = csr_matrix(matrix != 0)
    ncomp, labels = connected_components(pattern, directed=False)
    out = []
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(ncomp + 1))
    for c in range(ncomp):
        members = order[bounds[c]:bounds[c + 1]]
        if len(members) == 1:
            out.append(matrix[members[0], members[0]].real.reshape(1))
        else:
            out.append(np.linalg.eigvalsh(matrix[np.ix_(members, members)]))
    vals = np.concatenate(out) if out else np.zeros(0)
    assert vals.size == dim
    return np.sort(vals.real)


# --------------------------------------------------------------------------
# builders


def build_rho_pairing(n, max_n=DEFAULT_MAX_N):
    """(1/M) * sum over all M Rumer pairings of the pairing-state projector."""
    n = check_particle_count(n, max_n)
    matchings = enumerate_matchings(n, max_n=None)
    sector = np.flatnonzero(sz_twice_array(n) == 0)
    pos = np.full(2**n, -1)
    pos[sector] = np.arange(len(sector))
    # rows of V are pairing vectors restricted to the S_z = 0 sector
    vecs = np.zeros((len(matchings), len(sector)))
    for r, m in enumerate(matchings):
        v = pairing_state(m)
        cols = pos[list(v.amps)]
        vecs[r, cols] = list(v.amps.values())
    # integer entries bounded by M, so the float product is exact
    block = np.rint(vecs.T @ vecs).astype(np.int64)
    num = np.zeros((2**n, 2**n), dtype=np.int64)
    num[np.ix_(sector, sector)] = block
    return ExactDensityMatrix(n, num, len(matchings) * 2 ** (n // 2))


def _permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def build_rho_slater_oracle(n, max_n=SLATER_ORACLE_MAX_N):
    """Spin density matrix of a closed-shell Slater determinant, by brute force.

    Spin-orbitals are ``(orbital, spin)`` for orbitals ``0..n/2-1`` and both
    spin values.  The determinant is expanded over all ``n!`` assignments of
    spin-orbitals to particles; amplitudes are grouped by the orbital labels of
    the particles, and because the orbitals are orthonormal the spin matrix is
    the sum of the outer products of those groups, divided by ``n!``.
    """
    n = check_particle_count(n, None)
    if n > max_n:
        raise UnsupportedSizeError(
            f"Slater oracle is brute force over n! = {math.factorial(n)} terms; "
            f"n={n} exceeds its limit {max_n}",
            n=n,
            max_n=max_n,
        )
    spin_orbitals = [(orb, spin) for orb in range(n // 2) for spin in (1, 0)]
    groups = {}
    for perm in itertools.permutations(range(n)):
        sign = _permutation_sign(perm)
        orbitals = tuple(spin_orbitals[p][0] for p in perm)
        bits = 0
        for particle, p in enumerate(perm):
            bits |= spin_orbitals[p][1] << particle
        vec = groups.setdefault(orbitals, {})
        vec[bits] = vec.get(bits, 0) + sign
    num = np.zeros((2**n, 2**n), dtype=np.int64)
    for vec in groups.values():
        idx = np.fromiter(vec.keys(), dtype=np.int64)
        amp = np.fromiter(vec.values(), dtype=np.int64)
        num[np.ix_(idx, idx)] += np.outer(amp, amp)
    return ExactDensityMatrix(n, num, math.factorial(n))


@dataclass(frozen=True)
class SingletProjector:
    projector: ExactDensityMatrix
    dimension: int

    def maximally_mixed(self):
        return self.projector.scaled(Fraction(1, self.dimension))


def build_singlet_projector(n, max_n=DEFAULT_MAX_N):
    """Projector onto the S = 0 subspace and its dimension.

    Works in the S_z = 0 sector with the integer matrix ``4 S^2``.  The product
    over s = 1..n/2 of ``(4S^2 - 4s(s+1))`` kills every nonzero total spin and
    leaves ``prod(-4s(s+1))`` on the singlets.  Entries stay integer and below
    2**53, so a float64 matrix product evaluates it exactly.
    """
    n = check_particle_count(n, max_n)
    s2, sector = total_spin_squared_sz0(n)
    dim = len(sector)
    acc = np.eye(dim)
    scale = 1
    s2f = s2.astype(float)
    for s in range(1, n // 2 + 1):
        c = 4 * s * (s + 1)
        acc = acc @ (s2f - c * np.eye(dim))
        scale *= -c
        if np.abs(acc).max() >= _EXACT_FLOAT_LIMIT:
            raise ArithmeticError("singlet projector polynomial left the exact float range")
    block = np.rint(acc)
    if not np.array_equal(block, acc):
        raise ArithmeticError("singlet projector polynomial is not integral")
    num = np.zeros((2**n, 2**n), dtype=np.int64)
    num[np.ix_(sector, sector)] = block.astype(np.int64)
    proj = ExactDensityMatrix(n, num, scale if scale > 0 else -scale)
    if scale < 0:
        proj = ExactDensityMatrix(n, -proj.numerators, proj.denom)
    d0 = proj.trace()
    if d0.denominator != 1:
        raise ArithmeticError(f"projector trace {d0} is not an integer")
    return SingletProjector(proj, int(d0))


BUILDERS = {
    "pairing": build_rho_pairing,
    "slater": build_rho_slater_oracle,
    "projector": lambda n, max_n=DEFAULT_MAX_N: build_singlet_projector(n, max_n).maximally_mixed(),
}


def build(builder, n, max_n=DEFAULT_MAX_N):
    try:
        fn = BUILDERS[builder]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown builder {builder!r}; choose from {sorted(BUILDERS)}"
        ) from None
    if builder == "slater":
        check_particle_count(n, max_n)
        return fn(n)
    return fn(n, max_n=max_n)


def von_neumann_entropy(rho, cutoff=ENTROPY_CUTOFF, psd_tol=PSD_TOLERANCE):
    """-Tr(rho ln rho) in nats; eigenvalues at or below ``cutoff`` count as zero."""
    vals = block_eigvalsh(rho.float_view)
    if vals.size and vals[0] < -psd_tol:
        raise DomainError(f"matrix is not positive semidefinite (eigenvalue {vals[0]:.3e})")
    if abs(float(rho.trace()) - 1) > psd_tol:
        raise DomainError(f"matrix has trace {rho.trace()}, expected 1")
    vals = vals[vals > cutoff]
    return float(-np.sum(vals * np.log(vals))) + 0.0
