#!/usr/bin/env python3
"""Generate the Clebsch-Gordan reference table used by the unit tests.

Computes <j_l m_l; 1 q | j_u m_u> for the S1/2-P1/2 and D3/2-P1/2 dipole
transitions of Ca-40+ with sympy, independently of the C++ implementation.
Run from the repository root:

    python3 tests/oracles/gen_cg_reference.py > tests/fixtures/cg_reference.csv
"""

from fractions import Fraction

import sympy as sp
from sympy.physics.quantum.cg import CG


def half(n: int) -> sp.Rational:
    return sp.Rational(n, 2)


def main() -> None:
    print("# lower_manifold,j_lower,m_lower_x2,q,m_upper_x2,value")
    cases = []
    for name, j_lower in (("S12", half(1)), ("D32", half(3))):
        for m_u2 in (-1, 1):
            for q in (-1, 0, 1):
                m_l2 = m_u2 - 2 * q
                if abs(m_l2) > int(2 * j_lower):
                    continue
                cases.append((name, j_lower, m_l2, q, m_u2))
    for name, j_lower, m_l2, q, m_u2 in cases:
        val = CG(j_lower, half(m_l2), 1, q, half(1), half(m_u2)).doit()
        print(
            "%s,%s,%d,%d,%d,%.17g"
            % (name, Fraction(int(2 * j_lower), 2), m_l2, q, m_u2, float(val))
        )


if __name__ == "__main__":
    main()
