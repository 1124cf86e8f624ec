"""CHSH test for one spin (Alice) against the remaining N-1 spins (Bob).

Alice measures ``Q = sigma_z`` and ``R = sigma_x`` on her spin.  Bob measures
``S = -(Theta_z + Theta_x)/sqrt2`` and ``T = (Theta_z - Theta_x)/sqrt2``, with
``Theta_a`` the sum of ``sigma_a`` over his spins.  Every correlator is an exact
rational multiple of ``1/sqrt2``; the square root is only taken at the end.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .reduction import two_spin_reduced_analytic
from .rho import build_rho_pairing
from .spin_core import DEFAULT_MAX_N, check_particle_count

SQRT2 = math.sqrt(2)
CLASSICAL_BOUND = 2
TSIRELSON_BOUND = 2 * SQRT2


def _pauli_pair_trace(rho, a, axis_a, b, axis_b):
    """Exact Tr(sigma^{axis_a}_a sigma^{axis_b}_b rho) for axes in {x, z}, a != b."""
    idx = np.arange(rho.dim)
    flip = 0
    phase = np.ones(rho.dim, dtype=np.int64)
    for spin, axis in ((a, axis_a), (b, axis_b)):
        if axis == "x":
            flip |= 1 << spin
        elif axis == "z":
            phase *= 2 * ((idx >> spin) & 1) - 1
        else:
            raise InvalidArgumentError(f"axis must be 'x' or 'z', got {axis!r}")
    num = int(np.sum(phase * rho.numerators[idx, idx ^ flip]))
    return Fraction(num, rho.denom)


@dataclass(frozen=True)
class ChshOperatorSet:
    n: int
    alice: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgumentError("CHSH needs at least two spins")
        if not 0 <= self.alice < self.n:
            raise InvalidArgumentError(f"alice={self.alice} is not a spin of n={self.n}")

    @property
    def bob(self):
        return tuple(i for i in range(self.n) if i != self.alice)

    def operator_norms(self):
        # S and T are sums of N-1 commuting unit-vector Pauli operators
        return {"Q": 1, "R": 1, "S": self.n - 1, "T": self.n - 1}

    def dense(self):
        """Dense Q, R, S, T; meant for small n."""
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        # basis 0 = down, 1 = up
        sz = np.diag([-1.0, 1.0])

        def on(spin, op):
            out = np.eye(1)
            for k in reversed(range(self.n)):
                out = np.kron(out, op if k == spin else np.eye(2))
            return out

        theta_z = sum(on(i, sz) for i in self.bob)
        theta_x = sum(on(i, sx) for i in self.bob)
        return {
            "Q": on(self.alice, sz),
            "R": on(self.alice, sx),
            "S": (-theta_z - theta_x) / SQRT2,
            "T": (theta_z - theta_x) / SQRT2,
            "theta_z": theta_z,
            "theta_x": theta_x,
        }


@dataclass(frozen=True)
class ChshTerms:
    """Alice-Bob axis sums and the four correlators times sqrt2, all exact."""

    zz: Fraction
    zx: Fraction
    xz: Fraction
    xx: Fraction

    @property
    def qs(self):
        return -(self.zz + self.zx)

    @property
    def rs(self):
        return -(self.xz + self.xx)

    @property
    def rt(self):
        return self.xz - self.xx

    @property
    def qt(self):
        return self.zz - self.zx

    @property
    def value_over_sqrt2(self):
        """<QS>+<RS>+<RT>-<QT> divided by sqrt2."""
        return (self.qs + self.rs + self.rt - self.qt) / 2

    @property
    def value(self):
        return float(self.value_over_sqrt2) * SQRT2

    def correlators(self):
        return {k: float(getattr(self, k)) / SQRT2 for k in ("qs", "rs", "rt", "qt")}


def chsh_terms(rho, alice=0):
    ops = ChshOperatorSet(rho.n, alice)
    sums = {}
    for a_axis in "zx":
        for b_axis in "zx":
            sums[a_axis + b_axis] = sum(
                (_pauli_pair_trace(rho, alice, a_axis, b, b_axis) for b in ops.bob),
                Fraction(0),
            )
    return ChshTerms(**sums)


def chsh_value_full(n=None, *, rho=None, alice=0, max_n=DEFAULT_MAX_N):
    """CHSH combination evaluated against the full N-spin density matrix."""
    if rho is None:
        rho = build_rho_pairing(n, max_n=max_n)
    return chsh_terms(rho, alice).value


def chsh_reduced_over_sqrt2(n):
    """Exact CHSH value / sqrt2 from the closed-form pair state.

    Each of the N-1 pairs contributes ``Tr(zz rho_pair) = w_t - w_s`` per
    axis, so the result is ``-(N-1) * 2 * (w_t - w_s)``.
    """
    w = two_spin_reduced_analytic(n)
    per_pair = w.w_triplet_each - w.w_singlet
    return abs((n - 1) * per_pair + (n - 1) * per_pair)


def chsh_value_reduced(n):
    check_particle_count(n, None)
    return float(chsh_reduced_over_sqrt2(n)) * SQRT2


@dataclass(frozen=True)
class BellReport:
    n: int
    value: float
    value_over_sqrt2: Fraction
    classical_bound: int
    tsirelson_bound: float
    violated: bool
    route: str
    operator_norms: dict

    def to_record(self):
        rec = asdict(self)
        v = self.value_over_sqrt2
        rec["value_over_sqrt2"] = {"num": str(v.numerator), "den": str(v.denominator)}
        return rec


def chsh_classical_bound_check(n=None, *, route="full", rho=None, alice=0, max_n=DEFAULT_MAX_N):
    """Evaluate CHSH and compare it with the local-realistic bound 2.

    ``rho`` overrides the ground state (``route`` is then ``"override"``).
    """
    if rho is not None:
        n = rho.n
        exact = chsh_terms(rho, alice).value_over_sqrt2
        route = "override"
    elif route == "full":
        exact = chsh_terms(build_rho_pairing(n, max_n=max_n), alice).value_over_sqrt2
    elif route == "reduced":
        check_particle_count(n, None)
        exact = chsh_reduced_over_sqrt2(n)
    else:
        raise InvalidArgumentError(f"route must be 'full' or 'reduced', got {route!r}")
    value = float(exact) * SQRT2
    # |value| > 2  <=>  2 * exact^2 > 4, decided without rounding
    violated = 2 * exact * exact > CLASSICAL_BOUND**2
    return BellReport(
        n=n,
        value=value,
        value_over_sqrt2=exact,
        classical_bound=CLASSICAL_BOUND,
        tsirelson_bound=TSIRELSON_BOUND,
        violated=bool(violated),
        route=route,
        operator_norms=ChshOperatorSet(n, alice).operator_norms(),
    )
