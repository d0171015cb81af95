"""Swiss roll in 3-D projected to 2-D by CDP and by PCA, both scored the same way.

Writes two scatter plots into the output directory (default ./demo_output).

    python3 demos/swiss_roll_vs_pca.py [outdir]
"""
import sys
import time
from pathlib import Path

from cdp import DatasetSpec, cdp_projection, evaluate, evaluate_baseline, generate, pca_fit, prepare
from cdp.metrics import percent
from cdp.svg import write_scatter_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

cloud = generate(DatasetSpec("swiss_roll", n_points=800, seed=1))
t0 = time.perf_counter()
prep = prepare(cloud, k_nn=10, tau=0.8)
print(f"prepared {prep.cloud.n} points, {len(prep.admissible)} admissible pairs "
      f"in {time.perf_counter() - t0:.2f}s")

runs = {
    "cdp": evaluate(prep, cdp_projection(prep, 2), "cdp"),
    "pca": evaluate_baseline(pca_fit(prep.cloud, 2), prep),
}
print(f"\n{'':5}{'fixed err':>10}{'reselect err':>14}{'mu_k':>8}{'q10 psi':>9}{'q90 1/phi*':>12}{'holds':>7}")
for method, ev in runs.items():
    r = ev.report
    print(f"{method:5}{percent(r.fixed_error):>10}{percent(r.reselected_error) or '-':>14}"
          f"{r.mu_k:8.4f}{r.q10_psi:9.4f}{r.q90_inv_phi_star:12.4f}{str(ev.certificates.all_hold):>7}")
    write_scatter_svg(out / f"swiss_roll_{method}.svg", ev.projected.points, color=ev.projected.color,
                      title=f"swiss roll, {method}")
print(f"\nplots in {out}/")
