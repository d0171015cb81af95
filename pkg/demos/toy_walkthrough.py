"""Five-point walkthrough: every intermediate quantity of a CDP fit, printed.

    python3 demos/toy_walkthrough.py
"""
import numpy as np

from cdp import run_cdp, toy5
from cdp.metrics import percent

np.set_printoptions(precision=6, suppress=True)

prep, ev = run_cdp(toy5(), k=2, k_nn=2, tau=0.75, standardize=False)
name = prep.labels()

print("mutual 2-NN edges:")
for a, b, w in zip(prep.graph.u, prep.graph.v, prep.graph.w):
    print(f"  {name[a]}-{name[b]}  {w:.4f}")

print("\npair        euclid     sp       r   admissible")
for p in prep.pairs:
    flag = "yes" if p.r <= prep.tau else ""
    print(f"  ({name[p.i]},{name[p.j]})  {p.euclid:7.4f} {p.sp:7.4f} {p.r:7.4f}   {flag}")
print(f"\nnon-convexity index {prep.c_sp:.4f} over {len(prep.admissible)} pairs")

print("\nstructure matrix:\n", prep.S)
print("eigenvalues:", prep.spectrum.eigenvalues)
print("projection V:\n", ev.V)
print("projected points:\n", ev.projected.points)

print("\ncertificates: psi <= r~/r <= 1/phi*")
for c in ev.certificates:
    path = "->".join(name[v] for v in c.path)
    print(f"  ({name[c.i]},{name[c.j]})  {c.psi:.4f} <= {c.ratio:.4f} <= {c.inv_phi_star:.4f}   via {path}")

rep = ev.report
print(f"\nfixed-pairs error {percent(rep.fixed_error)}, reselected-pairs error {percent(rep.reselected_error)}")
print(f"spectral capture mu_2 = {rep.mu_k:.4f}, graph-wide bound 1/phi_G = {1 / rep.phi_g:.4f}")
