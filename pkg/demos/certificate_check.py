"""Check the per-pair sandwich and the uniform bound by hand on a torus, for a random orthonormal V.

The certificate does not depend on how V was chosen, so a random subspace
must satisfy it as well as the fitted one.

    python3 demos/certificate_check.py
"""
import numpy as np

from cdp import DatasetSpec, evaluate, generate, phi_graph, prepare
from cdp.metrics import markov_bound, weighted_tail

prep = prepare(generate(DatasetSpec("torus", n_points=400, seed=2)), k_nn=8, tau=0.8)
rng = np.random.default_rng(0)
V = np.linalg.qr(rng.normal(size=(3, 2)))[0]
ev = evaluate(prep, V, method="random")
c = ev.certificates

lower = c.ratio - c.psi
upper = c.inv_phi_star - c.ratio
print(f"{len(c)} admissible pairs")
print(f"min slack below: {lower.min():.3e}   min slack above: {upper.min():.3e}")
phi_g = phi_graph(prep.graph, V, prep.cloud)
print(f"worst ratio {c.ratio.max():.4f} vs uniform bound 1/phi_G = {1 / phi_g:.4f}")

mu = ev.report.mu_k
print(f"\nmu_k = {mu:.4f}")
for a in (0.1, 0.25, 0.5):
    print(f"  a={a}: P(psi^2 >= {1 - a:.2f}) = {weighted_tail(c.psi, c.r, a):.4f}  >=  Markov {markov_bound(mu, a):.4f}")
