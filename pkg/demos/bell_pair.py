"""Entanglement with a distant partner.

atom1 sits in the lower arm; atom2 never meets the photon.  They start in
(|m- m+> + |m+ m->)/sqrt(2).  An x photon at Dl leaves the pair untouched,
while a σ+ photon at Dl projects atom1 and breaks the entanglement.
"""
from ifmsim import canned, concurrence, measure, partial_trace, to_density
from ifmsim.scenario import evolve, initial_atoms

lin, circ = canned("bell_linear"), canned("bell_circular")
print("initial concurrence:", round(concurrence(to_density(initial_atoms(lin))), 12))

for sc in (lin, circ):
    for o in measure(evolve(sc), sc.detector):
        if o.tag != "Dl" or o.posterior is None:
            continue
        atom1 = partial_trace(o.posterior, "atom1")
        print(f"{sc.name:14s} {o.key:8s} P={o.probability:.4f}  "
              f"C={concurrence(o.posterior):.4f}  atom1 populations="
              f"{atom1.population(['m+']):.2f}/{atom1.population(['m-']):.2f}")
