"""Interaction-free detection of an opaque object.

An empty interferometer sends every photon to Du.  Put a classical absorber
in the lower arm and a quarter of the photons now reach Dl, which is
impossible without the object: the object has been "seen" by a photon that
never touched it.
"""
from ifmsim import canned, outcome_budget, render_report, run
from ifmsim.scenario import evolve

empty = canned("no_atom")
bomb = canned("classical_ev")

for sc in (empty, bomb):
    b = outcome_budget(evolve(sc))
    print(f"{sc.name:14s} absorbed={b.absorbed:.4f}  Du={b.Du:.4f}  Dl={b.Dl:.4f}")

# Half of the surviving photons flag the object at Dl.
b = outcome_budget(evolve(bomb))
print("P(Dl | not absorbed) =", b.Dl / (b.Du + b.Dl))

print()
print(render_report(run(bomb), "table").decode())
