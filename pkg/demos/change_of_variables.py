"""Two quartic cycles seen through birational changes of variables.

For the Filipstov system the map comes with a positive time factor, so the
divergence integral of the cycle is the same on both sides.  The Chavarriga
time factor is negative: the transformed flow runs backwards and the
integral changes sign.  The transformed cycle is unstable, so the original
one is stable.
"""

from fractions import Fraction

from algcycle.flow import find_periodic_orbit
from algcycle.ovalquad import reduced_hyperbolicity_integral
from algcycle.systems import catalog_instantiate


def orbit_integral(entry):
    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=entry.curve_functions())
    return orbit.I_div


def main():
    print("Filipstov (time factor > 0)")
    for a in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)):
        src = catalog_instantiate("filipstov", {"a": a})
        dst = catalog_instantiate("fil_transformed", {"c": src.params_c()})
        red = reduced_hyperbolicity_integral(dst).D
        print(f"  a = {a}: c = {dst.params['c']}  original {orbit_integral(src):.10f}"
              f"  transformed {orbit_integral(dst):.10f}  reduced {red:.10f}")

    print("Chavarriga (time factor < 0)")
    for a in (Fraction(-1, 100), Fraction(-1, 50), Fraction(-7, 250)):
        src = catalog_instantiate("chavarriga", {"a": a})
        dst = catalog_instantiate("ch1_transformed", {"a": a})
        red = reduced_hyperbolicity_integral(dst)
        print(f"  a = {a}: original {orbit_integral(src):+.10f}  transformed {orbit_integral(dst):+.10f}"
              f"  reduced {red.D:+.10f} -> original cycle {red.stability_original}")


if __name__ == "__main__":
    main()
