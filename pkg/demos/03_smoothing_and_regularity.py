"""Smoothing and regularity: taming arbitrary strategies.

Arbitrary strategies on many coordinates are unwieldy. Two structural
moves fix that:

1. Smoothing: apply the noise operator at a rate so close to 1 that the
   correlation barely moves, yet coefficient mass above a computable
   degree d becomes negligible.

2. Regularity: a degree-d function has at most d/beta coordinates of
   influence above beta; restricting those leaves every remaining
   influence tiny, with high probability over the restriction.
"""

import numpy as np

from nisim import (
    build_basis,
    joint_high_influence_set,
    regularity_params,
    restriction_regular_probability,
    smoothing_params,
)
from nisim.fourier import FourierPolynomial
from nisim.spaces import FiniteSpace

print("Smoothing parameters for a source of maximal correlation 0.5,")
print("correlation budget 0.1, tail budget 0.01:")
sp = smoothing_params(rho=0.5, lam=0.1, eta=0.01)
print(f"  noise rate gamma = {sp.gamma:.10f}")
print(f"  degree cutoff d  = {sp.d}")
print(f"  tail bound gamma^(2d) = {sp.gamma ** (2 * sp.d):.6f} <= eta = {sp.eta}")
print(f"  explicit sufficient condition met: {sp.mossel_condition_met}")

print()
print("Regularity constants for degree 2, influence threshold 0.3, on bits:")
rp = regularity_params(2, 0.3, 0.5)
print(f"  influence cutoff beta = {rp.beta:.3e}")
print(f"  coordinate budget h   = {rp.h_bound}")
print(f"  tail budget eta = tau^2/16 = {rp.eta}")
print("  (the budget is loose by design; the point is that it never")
print("   depends on how many coordinates the strategies actually use)")

bit = FiniteSpace(["+1", "-1"], [0.5, 0.5])
basis = build_basis(bit)
rng = np.random.default_rng(0)

print()
print("A random degree-2 function on 6 bits and its high-influence set:")
coeffs = {}
for key in range(2**6):
    if bin(key).count("1") <= 2 and rng.random() < 0.4:
        coeffs[key] = rng.standard_normal() * 0.3
poly = FourierPolynomial(basis, 6, coeffs)
scale = 1 / max(1.0, np.sqrt(poly.variance()))
poly = FourierPolynomial(basis, 6, {k: c * scale for k, c in poly.coeffs.items()})
H = joint_high_influence_set(poly, poly, rp)
print(f"  restricted coordinates H = {list(H)}")
prob = restriction_regular_probability(poly, H, tau=0.3, mode="exact")
print(f"  P[restriction leaves all influences <= 0.3] = {prob.estimate:.4f}"
      f"  (needs >= {1 - 0.3})")
