"""Sources and their correlation limits.

Two parties observe i.i.d. coordinates of a shared joint source and want
to output a single correlated bit pair each, without communicating.  The
first question about any source: how correlated can those bits ever be?

Maximal correlation answers with a sandwich.  The ceiling is the second
singular value of the normalized source operator; the floor is what
Gaussian simulation plus sign thresholds always achieves.
"""

from nisim import (
    alpha_component_graph,
    make_dsbs,
    maximal_correlation,
    tensor_power,
    uniform_triple,
    witsenhausen_bounds,
)

print("=" * 70)
print("The doubly symmetric binary source: the self-calibrating case")
print("=" * 70)
for rho in (0.25, 0.49, 0.9):
    report = maximal_correlation(make_dsbs(rho))
    print(f"  DSBS({rho}): maximal correlation = {report.rho:.12f} "
          f"(witnesses {report.f_witness.round(6).tolist()})")
print("  A DSBS source can simulate exactly itself and nothing stronger.")

print()
print("=" * 70)
print("The uniform triple {(0,0), (0,1), (1,0)}")
print("=" * 70)
triple = uniform_triple()
report = maximal_correlation(triple)
lo, hi = witsenhausen_bounds(report.rho)
print(f"  maximal correlation: {report.rho:.12f}")
print(f"  reachable binary correlation is between {lo:.6f} and {hi:.6f}")
print("  (the floor 1/3 needs many copies; one copy tops out at 1/4,")
print("   which demo 05 verifies by exhaustive search)")

print()
print("  Tensorization: powers of the source do not change the ceiling.")
for n in (2, 3):
    rho_n = maximal_correlation(tensor_power(triple, n)).rho
    print(f"    {n} copies: maximal correlation = {rho_n:.12f}")

print()
print("=" * 70)
print("Why single copies can be misleading: the two-component source")
print("=" * 70)
graph = alpha_component_graph(0.25)
print("  A complete bipartite block of mass 0.75 (independent within) plus")
print("  a perfectly matched block of mass 0.25.")
print(f"  maximal correlation = {maximal_correlation(graph).rho:.9f}")
print("  The ceiling is 1 because of the matched block, but strategies on")
print("  few copies rarely see it; only past roughly 1/alpha copies does")
print("  the reachable correlation jump toward 1.")
