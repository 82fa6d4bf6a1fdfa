"""
Two-way rate of a noisy attenuator
==================================

Optimize the post-selected qubit protocol at lambda = 0.75, nu = 1 and
compare it with the PLOB upper bound.
"""
import time

from pibgc_bounds import PiBGC, optimize, plob_upper, to_composition

ch = PiBGC.attenuator(0.75, 1.0)
cf = to_composition(ch)
print("composition form:", cf)

t0 = time.perf_counter()
r = optimize(cf)
print(f"rate {r.rate:.5f} ebits/use  (M={r.M}, c={r.c:.4f}, k={r.k}, {time.perf_counter() - t0:.1f}s)")

# how close to the upper bound?
ub = plob_upper(ch).value
print(f"PLOB {ub:.5f}, ratio {r.rate / ub:.4f}")

# the same point under an energy constraint: c may not drop below sqrt(1 - ns/M)
for ns in (0.5, 1.0, 2.0):
    print(f"ns={ns}: {optimize(cf, ns).rate:.5f}")
