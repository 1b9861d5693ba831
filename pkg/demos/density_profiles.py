"""Position densities of coherent states on the half line.

Builds annihilation-eigenstate coherent states for the truncated
oscillator and for both towers of its fourth-order partner, then prints
where each density peaks and a coarse text profile.  The wall at x = 0
keeps every density pinned to zero there; growing |z| pushes the bulk of
the state outward.
"""

import numpy as np

from truncosc import Basis, Family, build_cs, q4_model, susy_cs, truncated_ladder
from truncosc.fock import eigenfunction
from truncosc.susy import iso_eigenfunction_derivatives, new_eigenfunction_derivatives

X = np.linspace(0.02, 12.0, 600)
BAR_WIDTH = 48


def trunc_density(z):
    cs = build_cs(Family.LOWERING, truncated_ladder(), z, truncation=48)
    rows = np.vstack([eigenfunction(k, X) for k in range(48)])
    return np.abs(cs.vector.amplitudes @ rows) ** 2


def susy_density(basis, z):
    model = q4_model()
    cs = susy_cs(model, basis, z, truncation=48)
    n_levels = cs.vector.amplitudes.size
    if basis == Basis.SUSY_ISO:
        rows = np.vstack([iso_eigenfunction_derivatives(model, n, X, order=0)[0]
                          for n in range(n_levels)])
    else:
        rows = np.vstack([new_eigenfunction_derivatives(model, j, X, order=0)[0]
                          for j in range(n_levels)])
    return np.abs(cs.vector.amplitudes @ rows) ** 2


def sparkline(density):
    blocks = " .:-=+*#%@"
    scaled = density / density.max() * (len(blocks) - 1)
    idx = np.clip(scaled[:: len(density) // BAR_WIDTH], 0, len(blocks) - 1)
    return "".join(blocks[int(i)] for i in idx[:BAR_WIDTH])


def report(label, density):
    peak = X[np.argmax(density)]
    norm = np.trapezoid(density, X)
    print(f"  {label:<18} peak at x = {peak:5.2f}   "
          f"integral = {norm:.6f}   |{sparkline(density)}|")


print("truncated oscillator, annihilation-eigenstate family")
for z in (0.0, 0.5, 1.5, 3.0):
    report(f"|z| = {z}", trunc_density(z))

print("\npartner Hamiltonian, isospectral tower")
for z in (0.0, 0.5, 1.5):
    report(f"|z| = {z}", susy_density(Basis.SUSY_ISO, z))

print("\npartner Hamiltonian, two-level tower of new bound states")
for z in (0.0, 1.0, 10.0):
    report(f"|z| = {z}", susy_density(Basis.SUSY_NEW, z))

print("\nThe new-state densities interpolate between the two bound levels;")
print("large |z| weights the upper level and its extra node shows up as a")
print("second hump.  All profiles vanish at the wall.")
