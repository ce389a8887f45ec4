import time
import numpy as np
from dataclasses import replace
from padnet.params import SystemParams, NumericsConfig
from padnet import analysis, energy

num = NumericsConfig()
base = SystemParams()

print("=== coverage vs lambda_c (fig4 grid) ===")
t0 = time.time()
for lc in np.geomspace(1e-6, 1e-3, 8):
    p = replace(base, lambda_c=float(lc))
    b1 = analysis.coverage_scenario1(p, num)
    b2 = analysis.coverage_scenario2(p, num)
    print(f"lambda_c={lc:.2e}: s1={b1.p_total:.4f} s2={b2.p_total:.4f}")
print(f"[{time.time()-t0:.0f}s]")

print("=== coverage vs lambda_user (fig5 grid, lambda_c=1e-4) ===")
t0 = time.time()
for lu in np.geomspace(1e-6, 1e-4, 8):
    p = replace(base, lambda_c=1e-4, lambda_user=float(lu))
    b1 = analysis.coverage_scenario1(p, num)
    b2 = analysis.coverage_scenario2(p, num)
    print(f"lambda_user={lu:.2e}: s1={b1.p_total:.4f} s2={b2.p_total:.4f} diff={b1.p_total-b2.p_total:+.4f}")
print(f"[{time.time()-t0:.0f}s]")

print("=== EE vs lambda_c (fig6) ===")
t0 = time.time()
for lc in np.geomspace(1e-6, 1e-3, 8):
    p = replace(base, lambda_c=float(lc))
    e1 = energy.energy_efficiency("s1", p, num)
    e2 = energy.energy_efficiency("s2", p, num)
    print(f"lambda_c={lc:.2e}: ee1={e1.ee:.1f} ee2={e2.ee:.1f} (E[L]={e1.mean_travel:.0f} m)")
print(f"[{time.time()-t0:.0f}s]")

print("=== EE vs lambda_user (fig7, lambda_c=1e-4) ===")
t0 = time.time()
for lu in np.geomspace(1e-6, 3e-4, 9):
    p = replace(base, lambda_c=1e-4, lambda_user=float(lu))
    e1 = energy.energy_efficiency("s1", p, num)
    e2 = energy.energy_efficiency("s2", p, num)
    print(f"lambda_user={lu:.2e}: ee1={e1.ee:.1f} ee2={e2.ee:.1f}")
print(f"[{time.time()-t0:.0f}s]")
