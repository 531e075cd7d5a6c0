"""The cycle y^2 = cos x of a non-polynomial system.

The oval around the origin is hyperbolic and stable.  The ovals of the
other bands x in [2 pi n - pi/2, 2 pi n + pi/2] have zero divergence
integral, so the first-order test says nothing about them.
"""

import math

import numpy as np

from algcycle.flow import find_periodic_orbit, monodromy_matrix
from algcycle.systems import catalog_instantiate


def main():
    for n in (0, 1, 2):
        e = catalog_instantiate("nalc", {"n": n})
        cf = e.curve_functions()
        guess = (2 * math.pi * n, 1.0)
        orbit = find_periodic_orbit(e.vector_field(), guess, curve=cf)
        mono = monodromy_matrix(e.vector_field(), orbit, cf)
        print(f"n = {n}: T = {orbit.T:.12f}  int div = {orbit.I_div:+.12f}  int k = {orbit.I_k:+.12f}")
        print(f"       det M = {np.linalg.det(mono.M):.6e}  exp(int div) = {math.exp(orbit.I_div):.6e}")
    print(f"-4 pi = {-4 * math.pi:.12f}")


if __name__ == "__main__":
    main()
