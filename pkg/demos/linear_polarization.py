"""Keeping the superposition: x-polarized input.

With x light a photon at Dl has not picked out σ+ or σ-.  Looked at through
a linear analyser, the x outcome leaves the atom exactly in its initial
superposition and the y outcome applies a relative sign flip.  Without any
analyser the two are mixed and the atom ends up maximally mixed.
"""
from ifmsim import canned, fidelity, measure, purity
from ifmsim.scenario import evolve, initial_atoms, target_state

sc = canned("linear_x")
out = evolve(sc)
plus = initial_atoms(sc)
minus = target_state(sc, sc.targets["minus"])

for basis in ("linear", "none", "circular"):
    print(f"-- analysis: {basis}")
    for o in measure(out, basis):
        if o.tag == "absorbed" or o.posterior is None:
            continue
        print(f"   {o.key:10s} P={o.probability:.4f}  purity={purity(o.posterior):.3f}  "
              f"F(+)={fidelity(o.posterior, plus):.3f}  F(-)={fidelity(o.posterior, minus):.3f}")
