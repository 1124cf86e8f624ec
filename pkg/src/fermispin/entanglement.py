"""Partial transposition, negativity and a 2x2-minor witness of non-positivity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError, dense_bytes, format_bytes
from .reduction import two_spin_reduced_analytic
from .rho import ExactDensityMatrix, block_eigvalsh
from .spin_core import DEFAULT_MAX_N, basis_label, sz_of

NEGATIVE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Bipartition:
    part_a: tuple
    part_b: tuple
    n_total: int

    def __post_init__(self):
        a = tuple(sorted(int(i) for i in self.part_a))
        b = tuple(sorted(int(i) for i in self.part_b))
        if not a or not b:
            raise InvalidArgumentError("both parts of a bipartition must be non-empty")
        if sorted(a + b) != list(range(self.n_total)):
            raise InvalidArgumentError(
                f"parts {a} | {b} must be disjoint and cover 0..{self.n_total - 1}"
            )
        object.__setattr__(self, "part_a", a)
        object.__setattr__(self, "part_b", b)

    @classmethod
    def from_a(cls, part_a, n_total):
        part_a = set(part_a)
        return cls(tuple(part_a), tuple(i for i in range(n_total) if i not in part_a), n_total)

    @property
    def mask_b(self):
        m = 0
        for i in self.part_b:
            m |= 1 << i
        return m

    def __str__(self):
        return ",".join(map(str, self.part_a)) + "|" + ",".join(map(str, self.part_b))


def _check_split(rho, bp):
    if bp.n_total != rho.n:
        raise InvalidArgumentError(
            f"bipartition covers {bp.n_total} spins but the matrix has {rho.n}"
        )


def partial_transpose(rho, bp):
    """Transpose the indices of ``bp.part_b`` only."""
    _check_split(rho, bp)
    n = rho.n
    tensor = rho.numerators.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for s in bp.part_b:
        row, col = n - 1 - s, 2 * n - 1 - s
        axes[row], axes[col] = col, row
    out = tensor.transpose(axes).reshape(rho.dim, rho.dim)
    return ExactDensityMatrix(n, out, rho.denom)


@dataclass(frozen=True)
class NegativityResult:
    eigenvalues: np.ndarray
    negativity: float

    @property
    def entangled(self):
        return self.negativity > 0


def negativity_measure(rho, bp, max_n=DEFAULT_MAX_N, tol=NEGATIVE_TOLERANCE):
    """Spectrum of the partial transpose and E = -2 * (sum of its negative eigenvalues).

    Eigenvalues above ``-tol`` do not contribute to E.
    """
    _check_split(rho, bp)
    if max_n is not None and rho.n > max_n:
        raise ResourceLimitError(
            f"negativity needs a dense eigensolve of a {rho.dim}x{rho.dim} matrix "
            f"(~{format_bytes(dense_bytes(rho.n))}); n={rho.n} exceeds max_n={max_n}, "
            "use sylvester_witness instead",
            n=rho.n,
            max_n=max_n,
            bytes_estimate=dense_bytes(rho.n),
        )
    pt = partial_transpose(rho, bp)
    vals = block_eigvalsh(pt.float_view)
    neg = vals[vals < -tol]
    return NegativityResult(vals, float(-2 * neg.sum()) + 0.0)


@dataclass(frozen=True)
class WitnessReport:
    """A negative 2x2 principal minor of the partial transpose.

    ``row``/``col`` are the post-transpose indices; ``source_row``/``source_col``
    locate the element of the original matrix that moved there.
    """

    row: int
    col: int
    minor: Fraction
    block: tuple
    source_row: int
    source_col: int
    source_value: Fraction
    n: int

    def to_record(self):
        def frac(x):
            return {"num": str(x.numerator), "den": str(x.denominator)}

        return {
            "row": self.row,
            "col": self.col,
            "row_label": basis_label(self.row, self.n),
            "col_label": basis_label(self.col, self.n),
            "minor": frac(self.minor),
            "block": {"sz_row": frac(self.block[0]), "sz_col": frac(self.block[1])},
            "source": {
                "row": self.source_row,
                "col": self.source_col,
                "row_label": basis_label(self.source_row, self.n),
                "col_label": basis_label(self.source_col, self.n),
                "value": frac(self.source_value),
            },
        }


def _sz_twice_of(indices, mask):
    x = indices & mask
    ups = np.zeros_like(x)
    m = mask
    k = 0
    while m:
        if m & 1:
            ups += (x >> k) & 1
        m >>= 1
        k += 1
    return 2 * ups - bin(mask).count("1")


def sylvester_witness(rho, bp):
    """First negative principal minor created by the partial transpose, or ``None``.

    Scans nonzero off-diagonal elements ``rho[i, j]`` in row-major order, where
    ``i = (m_A, l_B)`` and ``j = (n_A, k_B)``, and keeps those whose B parts have
    different nonzero S_z.  Transposing B sends the element to
    ``(i', j') = ((m_A, k_B), (n_A, l_B))``; if both diagonal entries there are
    zero, the minor ``rho[i',i'] rho[j',j'] - rho[i,j]**2`` is negative.  Only
    index arithmetic is used, so this works far past the eigensolver limit.
    Intended for states supported on the S_z = 0 block; elsewhere a miss does
    not rule out negative minors.
    """
    _check_split(rho, bp)
    mb = bp.mask_b
    num = rho.numerators
    rows, cols = np.nonzero(num)
    off = rows != cols
    rows, cols = rows[off], cols[off]
    lb = _sz_twice_of(rows, mb)
    kb = _sz_twice_of(cols, mb)
    ok = (lb != kb) & (lb != 0) & (kb != 0)
    rows, cols = rows[ok], cols[ok]
    new_rows = (rows & ~mb) | (cols & mb)
    new_cols = (cols & ~mb) | (rows & mb)
    diag = np.diagonal(num)
    ok = (diag[new_rows] == 0) & (diag[new_cols] == 0)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    h = hits[0]
    return witness_from_source(rho, bp, int(rows[h]), int(cols[h]))


def witness_from_source(rho, bp, i, j):
    """The 2x2 minor that element ``rho[i, j]`` produces after transposing B.

    Returns ``None`` unless the minor is negative.
    """
    _check_split(rho, bp)
    mb = bp.mask_b
    ip = (i & ~mb) | (j & mb)
    jp = (j & ~mb) | (i & mb)
    if ip == jp:
        return None
    value = rho.entry(i, j)
    # transposing B leaves the diagonal alone and moves rho[i, j] to (ip, jp)
    minor = rho.entry(ip, ip) * rho.entry(jp, jp) - value * value
    if minor >= 0:
        return None
    return WitnessReport(
        row=ip,
        col=jp,
        minor=minor,
        block=(sz_of(ip, rho.n), sz_of(jp, rho.n)),
        source_row=i,
        source_col=j,
        source_value=value,
        n=rho.n,
    )


def pair_pt_eigenvalues(n):
    """Exact spectrum of the partially transposed two-spin reduced state.

    For ``w_t I + (w_s - w_t)|S><S|`` the transpose of the singlet projector has
    eigenvalues 1/2 (three times) and -1/2, so the spectrum is
    ``(w_s + w_t)/2`` three times and ``(3 w_t - w_s)/2`` once.
    """
    w = two_spin_reduced_analytic(n)
    ws, wt = w.w_singlet, w.w_triplet_each
    return sorted([(3 * wt - ws) / 2] + [(ws + wt) / 2] * 3)


def _power_traces(num, den, kmax):
    """Exact Tr(M^k), k = 1..kmax, for M = num/den with small integer ``num``."""
    num = [[int(x) for x in row] for row in num]
    acc = num
    out = []
    for k in range(1, kmax + 1):
        if k > 1:
            acc = [
                [sum(acc[i][t] * num[t][j] for t in range(len(num))) for j in range(len(num))]
                for i in range(len(num))
            ]
        out.append(Fraction(sum(acc[i][i] for i in range(len(num))), den**k))
    return out


def ppt_separability_pair(n, tol=NEGATIVE_TOLERANCE):
    """True when the two-spin reduced state of the N-spin ground state is PPT.

    The closed-form spectrum is checked against the exact partial transpose:
    the first four power traces fix a four-element spectrum.  For two qubits
    PPT is equivalent to separability.
    """
    state = two_spin_reduced_analytic(n).matrix()
    pt = partial_transpose(state, Bipartition((0,), (1,), 2))
    spectrum = pair_pt_eigenvalues(n)
    traces = _power_traces(pt.numerators, pt.denom, 4)
    if traces != [sum(x**k for x in spectrum) for k in range(1, 5)]:
        raise ArithmeticError(f"closed-form pair spectrum disagrees with the partial transpose at n={n}")
    return spectrum[0] >= -tol
