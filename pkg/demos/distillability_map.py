"""
Three views of the same boundary
================================

For each (g, lambda) compare the post-selected qubit PPT test, the sign
of the Simon functional of the Choi covariance and the closed form
(1 - lambda) g < 1.
"""
import numpy as np

from pibgc_bounds import CompositionForm, choi_cov, conditional_is_distillable, simon_f
from pibgc_bounds.channel_core import is_entanglement_breaking

gs = np.linspace(1.0, 3.0, 9)
lams = np.linspace(0.1, 1.0, 10)

# '#' distillable, '.' entanglement breaking, 'b' exactly on (1 - lambda) g = 1,
# '?' the three tests disagree.  On the boundary f is zero up to rounding of the
# entries, so its sign there carries no information.
print("g \\ lambda " + " ".join(f"{l:4.1f}" for l in lams))
for g in gs:
    cells = []
    for lam in lams:
        cf = CompositionForm(float(g), float(lam))
        if abs((1 - lam) * g - 1) < 1e-12:
            cells.append("b")
            continue
        votes = {conditional_is_distillable(cf), simon_f(choi_cov(cf, 1.0)) < 0,
                 not is_entanglement_breaking(cf)}
        cells.append("?" if len(votes) > 1 else ("#" if votes.pop() else "."))
    print(f"{g:10.2f} " + " ".join(f"{c:>4}" for c in cells))
