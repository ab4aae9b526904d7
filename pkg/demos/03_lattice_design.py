#!/usr/bin/env python3
"""Quasi-lattice design and the frame/basis condition checks.

Designs the lattice for the six-dimensional group (central densities (2,3),
unit modulation steps, translation densities (3,3) from the certified sup 9),
then walks the Heisenberg basis obstruction: the equality forcing q = 1/2
collides with the density condition 1/q <= 1.
"""

from fractions import Fraction

from nilframe import (
    QuasiLatticeParams,
    SpectrumBox,
    StepMultiplicity,
    check_density_condition,
    check_necessary_bounds,
    check_onb_condition,
    check_wavelet_discretization,
    density_polynomial,
    design_params,
    fiber_lattice,
    load_spec,
    spectral_measure,
)

six = load_spec(
    {
        "n": 6,
        "d": 2,
        "brackets": {
            "X1,Y1": ["1", "0"],
            "X2,Y2": ["1", "0"],
            "X1,Y2": ["0", "1"],
            "X2,Y1": ["0", "1"],
        },
    }
)
box = SpectrumBox(a=(Fraction(2), Fraction(3)))
params, sup = design_params(six, box)
print("designed parameters:", params.as_dict())

density = check_density_condition(six, params, box, sup_result=sup)
print("density condition:", "pass" if density.passed else "fail", "-", density.detail)

lam = (Fraction(1, 2), Fraction(5, 2))
lat = fiber_lattice(six, params, lam)
print(f"\nfiber at {tuple(map(str, lam))}: volume {lat.volume} "
      f"(= density / prod(b q))")

mu = spectral_measure(density_polynomial(six), box, tol=1e-7)
onb = check_onb_condition(params, mu)
print("\nbasis equality:", "pass" if onb.passed else "fail", "-", onb.detail)

bounds = check_necessary_bounds(six, params, mu, StepMultiplicity.constant(box, 1), box)
for sub in bounds.sub_reports:
    print(f"   {sub.condition:28s} {'pass' if sub.passed else 'fail'}  {sub.detail}")

wavelet = check_wavelet_discretization(six, params, box, measure_tol=1e-2)
print("wavelet discretization:", "pass" if wavelet.passed else "fail", "-", wavelet.detail)

# Heisenberg: the basis equality pins q = 1/2, but then 1/q = 2 > 1
print("\n-- Heisenberg obstruction --")
heis = load_spec({"n": 3, "d": 1, "brackets": {"X1,Y1": ["1"]}})
a = Fraction(2)
hp = QuasiLatticeParams(a=(a,), q=(Fraction(1),), b=(a,))
hbox = SpectrumBox(a=(a,))
print("density at q=1:", check_density_condition(heis, hp, hbox).passed)
onb = check_onb_condition(hp, a * a / 2)
print("basis check:", onb.detail)
bad = QuasiLatticeParams(a=(a,), q=(Fraction(1, 2),), b=(a,))
print("density at the required q=1/2:", check_density_condition(heis, bad, hbox).passed)
