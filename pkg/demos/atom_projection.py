"""Measuring an atom without exciting it.

The atom starts in (|m+> + |m->)/sqrt(2) in the lower arm; a half-absorber
removes the photon component that matches its m-level.  A σ+ photon reaching
Dl therefore certifies that the atom could not absorb σ+, so the atom is
left in |m+>: a projective measurement with no absorption.
"""
import numpy as np

from ifmsim import canned, fidelity, l1_coherence, measure, to_density
from ifmsim.scenario import evolve, initial_atoms

sc = canned("sigma_plus")
out = evolve(sc)
print("output state:")
for key, amp in sorted(out.items()):
    print(f"  {key!s:18s} {amp:+.4f}")

before = initial_atoms(sc)
print("\nl1 coherence before:", l1_coherence(to_density(before)))
for o in measure(out, "circular"):
    if o.tag == "absorbed" or o.posterior is None:
        continue
    print(f"{o.key:12s} P={o.probability:.4f}  "
          f"F(initial)={fidelity(o.posterior, before):.4f}  "
          f"coherence={l1_coherence(o.posterior):.4f}")

# Sweep the m+ weight: P(Dl) scales as |alpha|^2 / 4.
from dataclasses import replace
for a2 in np.linspace(0, 1, 5):
    atom = replace(sc.atoms[0], initial={"m+": np.sqrt(a2), "m-": np.sqrt(1 - a2)})
    p = sum(o.probability for o in measure(evolve(replace(sc, atoms=(atom,))), "none") if o.tag == "Dl")
    print(f"|alpha|^2={a2:.2f}  P(Dl)={p:.5f}")
