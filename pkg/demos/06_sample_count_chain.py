"""The computable sample-count bound, and why it is astronomical.

The decision procedure is complete only at a depth n0 that the parameter
chain computes from the source and the gap budget: the budget splits into
three losses, which dictate an influence threshold, a tail budget, a
degree cutoff, a restricted-coordinate budget h, and a Gaussian-simulation
count w, with n0 = h + w.

Every stage is explicit, so n0 is computable; every stage is also
conservative, so n0 is triply-exponentially large.  The chain therefore
reports log10 magnitudes alongside exact integers where they fit.
"""

from nisim import ChainConstants, make_dsbs, n0_chain, uniform_triple

triple = uniform_triple()
chain = n0_chain(triple, 0.2)
print("Chain for the uniform triple at gap budget 0.2:")
print(f"  budgets lambda = gamma = zeta = {chain.lam:.6f}")
print(f"  influence threshold tau = (delta/3)^{chain.k_tau}"
      f"  (log10 tau = {chain.ln_tau / 2.302585092994046:.2f})")
print(f"  noise rate gamma = {chain.smoothing.gamma:.10f}")
print(f"  degree cutoff d = {chain.d}")
print(f"  restricted coordinates: log10 h = {chain.h_log10:.2f}")
print(f"  Gaussian simulation count w = {chain.w}")
print(f"  log10 n0 = {chain.n0_log10:.2f}")
print()
print("The exact-integer fields are None once the magnitudes leave float")
print(f"range: h = {chain.h_int}, n0 = {chain.n0_int}")

print()
print("How the bound scales:")
print(f"{'delta':>8} {'log10 n0':>14} {'w':>10} {'d':>8}")
for delta in (0.5, 0.3, 0.2, 0.1):
    c = n0_chain(triple, delta)
    print(f"{delta:>8} {c.n0_log10:>14.1f} {c.w:>10} {c.d:>8}")

print()
print(f"{'source':>12} {'log10 n0 at delta=0.25':>24}")
for rho in (0.2, 0.5, 0.8):
    c = n0_chain(make_dsbs(rho), 0.25)
    print(f"{'DSBS(%.1f)' % rho:>12} {c.n0_log10:>24.1f}")

print()
print("All big-O constants default to 1 and are configurable; the bound is")
print("a lower estimate of the source analysis in that sense:")
c2 = n0_chain(triple, 0.2, ChainConstants(C_be=4.0))
print(f"  quadrupling the simulation constant: w = {c2.w} (was {chain.w})")
