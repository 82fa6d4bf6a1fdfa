"""
Lower and upper bounds along lambda
===================================

Sweep the attenuator transmissivity at fixed nu and tabulate the qubit
protocol against CI, RCI and PLOB.  The positivity threshold sits at
lambda = nu / (nu + 1).
"""
import numpy as np

from pibgc_bounds import PiBGC, ci_tmsv, is_entanglement_breaking, optimize, plob_upper, rci_tmsv, to_composition

nu = 1.0
print(f"threshold lambda = {nu / (nu + 1):.3f}")
print(f"{'lambda':>7} {'new':>9} {'CI':>9} {'RCI':>9} {'PLOB':>9}")
for lam in np.arange(0.45, 0.96, 0.05):
    ch = PiBGC.attenuator(float(lam), nu)
    cf = to_composition(ch)
    mark = " EB" if is_entanglement_breaking(cf) else ""
    row = (optimize(cf).rate, ci_tmsv(ch).value, rci_tmsv(ch).value, plob_upper(ch).value)
    print(f"{lam:7.2f} " + " ".join(f"{v:9.5f}" for v in row) + mark)

# Near the threshold only the two-way protocol stays positive.
