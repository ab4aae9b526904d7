#!/usr/bin/env python3
"""Loading step-two algebras and checking the class conditions.

Walks through the three reference groups: the Heisenberg group, a
six-dimensional group with a two-dimensional center, and a nine-dimensional
group with a cyclic bracket table.  Shows what the validator reports when a
spec falls outside the class.
"""

from nilframe import bracket, jump_indices, load_spec, validate_class
from nilframe.algebra import basis_vector

HEISENBERG = {"n": 3, "d": 1, "brackets": {"X1,Y1": ["1"]}}

SIX_DIM = {
    "n": 6,
    "d": 2,
    "brackets": {
        "X1,Y1": ["1", "0"],
        "X2,Y2": ["1", "0"],
        "X1,Y2": ["0", "1"],
        "X2,Y1": ["0", "1"],
    },
}

NINE_DIM = {
    "n": 9,
    "d": 3,
    "brackets": {
        "Y1,X1": ["1", "0", "0"], "Y3,X2": ["1", "0", "0"], "Y2,X3": ["1", "0", "0"],
        "Y2,X1": ["0", "1", "0"], "Y1,X2": ["0", "1", "0"], "Y3,X3": ["0", "1", "0"],
        "Y3,X1": ["0", "0", "1"], "Y2,X2": ["0", "0", "1"], "Y1,X3": ["0", "0", "1"],
    },
}


def show(name, doc):
    spec = load_spec(doc, label=name)
    print(f"== {name}: n={spec.n}, d={spec.d}, center dim {spec.center_dim}")
    report = validate_class(spec)
    for check in report.checks:
        print(f"   {check.name:22s} {'pass' if check.passed else 'FAIL'}  {check.detail}")
    if report.passed:
        print(f"   jump indices: {jump_indices(spec)}")
    print()
    return spec


heis = show("heisenberg", HEISENBERG)
show("six-dimensional", SIX_DIM)
show("nine-dimensional", NINE_DIM)

# the bracket is the bilinear antisymmetric extension of the stored table
x1 = basis_vector(heis, heis.x_index(0))
y1 = basis_vector(heis, heis.y_index(0))
print("Heisenberg [X1, Y1] in central coordinates:", bracket(heis, x1, y1)[: heis.center_dim])

# a spec with all brackets zero fails the nontrivial-action and
# square-integrability checks but raises no exception
lifeless = load_spec({"n": 3, "d": 1, "brackets": {}})
report = validate_class(lifeless)
print("\nall-zero bracket table:")
for check in report.checks:
    print(f"   {check.name:22s} {'pass' if check.passed else 'FAIL'}")
