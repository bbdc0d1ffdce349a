"""Coefficients of the newform f in S_2(36, eps), ord eps = 3, from the elliptic curve E.

f (x) eps is the newform of level 324 attached to E: y^2 = x^3 - 3^5*7 x + 3^6*37,
so a_p(f) = conj(eps(p)) * b_p(E) for p > 3. a_2 = 0 and a_3 = -sqrt(-3) come from
the stated expansion q - sqrt(-3) q^3 + 3(-1 + sqrt(-3))/2 q^5 + (1 + sqrt(-3))/2 q^7 + ...

Usage: python3 tools/derive_s2_36.py [BOUND] > src/g2modular/data/s2_36.txt
"""

from __future__ import annotations

import sys

from g2modular.arith import QuadRat
from g2modular.characters import characters_mod, zeta12
from g2modular.ingest import format_newform
from g2modular.newform import NewformSpec, primes_upto

E_A, E_B = -(3**5) * 7, 3**6 * 37
ZETA3 = zeta12(4)


def elliptic_ap(p: int) -> int:
    """p + 1 - #E(F_p) by Legendre symbols."""
    s = 0
    for x in range(p):
        r = (x * x * x + E_A * x + E_B) % p
        if r:
            s += 1 if pow(r, (p - 1) // 2, p) == 1 else -1
    return -s


def character():
    # eps(5) = zeta_3^2 and eps(7) = zeta_3 match the stated a_5, a_7 against b_5 = 3, b_7 = -1
    for chi in characters_mod(36, orders=(3,)):
        if chi.conductor() == 9 and chi.eval(5) == ZETA3 * ZETA3 and chi.eval(7) == ZETA3:
            return chi
    raise RuntimeError("no matching character mod 36")


def spec(bound: int = 200) -> NewformSpec:
    chi = character()
    ap = {2: QuadRat(0, 0, -3), 3: QuadRat(0, -1, -3)}
    for p in primes_upto(bound):
        if p > 3:
            ap[p] = (chi.eval(p).conjugate() * elliptic_ap(p)).with_field(-3)
    return NewformSpec(-3, ap, 36, chi, label="f_36")


def main() -> None:
    bound = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    f = spec(bound)
    assert f.ap[5] == 3 * ZETA3 and f.ap[7] == -(ZETA3 * ZETA3), "E does not reproduce the stated a_5, a_7"
    print("# newform in S_2(36, eps), ord eps = 3, conductor 9; a_p for p > 3 from the level-324 curve")
    print("# y^2 = x^3 - 1701 x + 26973 by a_p(f) = conj(eps(p)) b_p; regenerate with tools/derive_s2_36.py")
    print(format_newform(f))


if __name__ == "__main__":
    main()
