"""
Perturbed roots of unity against the Kadec and Avdonin bounds
=============================================================

"""

from rieszbounds import bounds, mz_avdonin_verify, mz_kadec_verify, mz_scan, TriangularFamily

# uniform displacements below a quarter grid step
for mu_max in (0.05, 0.2, 0.24):
    rep = mz_kadec_verify(range(1, 33), mu_max, trials=20, seed=1)
    lowest = min(r["A_exact"] for r in rep.records)
    print(f"mu_max={mu_max}: bound {bounds.mz_kadec_bound(mu_max):.4e}, "
          f"smallest exact A {lowest:.4e}, failures {rep.fail_count}")

# a whole family scanned over d, aggregates cover the scanned range only
scan = mz_scan(TriangularFamily("kadec_perturbed", {"mu_max": 0.2}, seed=3), range(1, 65))
print(scan.summary())

# block-averaged displacements may exceed 1/4 individually; the bound is tiny,
# so compare logarithms
rep = mz_avdonin_verify(10, seed=2)
for r in rep.records[:5]:
    print(f"d={r['d']:3d} N={r['N']} L={r['L']:.2f} rho={r['rho']:.3f} "
          f"log A={r['log_A_exact']:.2f} log bound={r['bound_value_log']:.1f}")
print("failures:", rep.fail_count)
