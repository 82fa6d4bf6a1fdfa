"""
Multi-rail encoding at low noise
================================

At nu = 0.5 spreading N photons over K channel uses beats the
single-photon qubit protocol.  Each (N, K) pair is evaluated separately.
"""
from pibgc_bounds import PiBGC, multirail_rate, optimize, to_composition

for lam in (0.8, 0.9):
    cf = to_composition(PiBGC.attenuator(lam, 0.5))
    q = optimize(cf).rate
    print(f"lambda={lam}: qubit {q:.5f}")
    for N, K in ((1, 2), (2, 2), (2, 3), (3, 3)):
        r = multirail_rate(cf, N, K)
        print(f"   N={N} K={K}: {r.rate:.5f}  tail={r.tail:.1e}")

# pure loss, one photon over two rails: only the F=1 outcome survives
r = multirail_rate(to_composition(PiBGC.attenuator(0.9, 0.0)), 1, 2)
print("pure loss N=1 K=2:", r.rate)
