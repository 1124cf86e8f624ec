"""Recompute every closed-form result for the paired-fermion ground state and compare."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bell, entanglement, reduction, rho as rho_mod, spin_core

FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    computed: object
    passed: bool


def _exact(name, expected, computed):
    return Check(name, expected, computed, expected == computed)


def _close(name, expected, computed, tol=FLOAT_TOL):
    return Check(name, expected, computed, abs(float(expected) - float(computed)) <= tol)


def reproduction_checks(cache=None):
    """Run the reproduction suite; ``cache`` is an optional :class:`MatrixCache`."""
    if cache is None:
        def get(builder, n):
            return rho_mod.build(builder, n)
    else:
        get = cache.get_or_build

    checks = []
    states = [spin_core.pairing_state(m) for m in spin_core.enumerate_matchings(4)]
    gram = spin_core.gram_matrix(states)
    checks.append(_exact("overlap <S01S23|S02S13>", Fraction(1, 2), gram[0][1]))
    checks.append(_exact("overlap <S01S23|S03S12>", Fraction(-1, 2), gram[0][2]))
    checks.append(_exact("overlap <S02S13|S03S12>", Fraction(1, 2), gram[1][2]))

    rho4 = get("pairing", 4)
    checks.append(_exact("rho4 pairing == Slater oracle", True, rho4 == get("slater", 4)))
    proj4 = rho_mod.build_singlet_projector(4)
    checks.append(_exact("singlet dimension d0(4)", 2, proj4.dimension))
    checks.append(
        _close(
            "max |rho4 - P0/2|",
            0.0,
            float(np.abs(rho4.float_view - proj4.maximally_mixed().float_view).max()),
            1e-12,
        )
    )
    checks.append(_close("S(rho4) = ln 2", math.log(2), rho_mod.von_neumann_entropy(rho4), 1e-9))
    rho6 = get("pairing", 6)
    checks.append(_close("S(rho6) = ln 5", math.log(5), rho_mod.von_neumann_entropy(rho6), 1e-9))

    for n in (2, 4, 6):
        w = reduction.two_spin_weights_from_matrix(reduction.reduce_to_pair(get("pairing", n), 0, 1))
        expect = reduction.two_spin_reduced_analytic(n)
        checks.append(
            _exact(
                f"pair weights N={n} (singlet, triplet)",
                (expect.w_singlet, expect.w_triplet_each),
                (w.w_singlet, w.w_triplet_each),
            )
        )
    for n in (2, 4, 6, 8):
        checks.append(
            _exact(
                f"pair correlation N={n}",
                Fraction(-1, n - 1),
                reduction.pair_correlation_numeric(get("pairing", n)),
            )
        )

    neg = entanglement.negativity_measure(rho4, entanglement.Bipartition.from_a([0, 1], 4))
    expected = sorted([0.5] + [1 / 6] * 6 + [-1 / 6] * 3 + [0.0] * 6)
    checks.append(
        Check(
            "rho4 2|2 partial-transpose spectrum",
            "1/2, 1/6 x6, -1/6 x3, 0 x6",
            [round(float(x), 12) for x in neg.eigenvalues],
            bool(np.allclose(neg.eigenvalues, expected, atol=FLOAT_TOL, rtol=0)),
        )
    )
    checks.append(_close("negativity E(rho4, 2|2)", 1.0, neg.negativity))

    checks.append(_exact("pair state N=2 PPT", False, entanglement.ppt_separability_pair(2)))
    checks.append(_exact("pair state N=4 PPT", True, entanglement.ppt_separability_pair(4)))

    bp6 = entanglement.Bipartition.from_a([0, 1, 2], 6)
    up_a = spin_core.SpinBasisState.from_label("↑↑↑↓↓↓").bits
    up_b = spin_core.SpinBasisState.from_label("↓↓↓↑↑↑").bits
    w6 = entanglement.witness_from_source(rho6, bp6, up_a, up_b)
    checks.append(
        _exact(
            "six-spin witness block (S_z row, S_z col)",
            (Fraction(3), Fraction(-3)),
            None if w6 is None else w6.block,
        )
    )
    checks.append(
        Check("six-spin witness minor < 0", "< 0", None if w6 is None else w6.minor, w6 is not None and w6.minor < 0)
    )

    for n in (2, 4, 6):
        checks.append(_close(f"CHSH full N={n}", 2 * math.sqrt(2), bell.chsh_terms(get("pairing", n)).value))
    checks.append(_exact("CHSH reduced N=10^6 (value/sqrt2)", Fraction(2), bell.chsh_reduced_over_sqrt2(10**6)))

    rho3 = reduction.partial_trace(rho4, [0, 1, 2])
    e3 = entanglement.negativity_measure(rho3, entanglement.Bipartition.from_a([0], 3)).negativity
    checks.append(_close("3-spin subsystem of rho4, 0|1,2 negativity (regression)", 1 / 3, e3))
    return checks
