"""Dev harness: diff the tabulated travel CDF against the arc-form reference."""
import numpy as np

from padnet.geometry import ClusterPairGeometry
from padnet import travel

geoms = []
for d_nm in (300.0, 600.0):
    for frac in (0.1, 0.33, 0.6, 0.83, 0.95):
        r_mm = frac * d_nm
        for th in (0.05, 0.3, np.pi / 6, np.pi / 4, 1.2, np.pi / 2, 1.6, 1.7,
                   1.9, 2.1, 2.3, 3 * np.pi / 4, 5 * np.pi / 6, 3.0, 3.1):
            geoms.append(ClusterPairGeometry(r_mm, th, d_nm))

lambda_c = 1e-5
worst = []
for g in geoms:
    top = 2 * g.r_mn
    ls = np.linspace(top * 5e-4, top * 0.9995, 101)
    errs = []
    for l in ls:
        a = travel.cdf_l(float(l), g, lambda_c)
        b = travel.cdf_l_arcwise(float(l), g, lambda_c)
        errs.append((abs(a - b), l, a, b))
    errs.sort(reverse=True)
    e, l, a, b = errs[0]
    regime = 1 if g.theta_1 + g.theta_3 < np.pi / 2 else (
        2 if np.cos(np.pi - g.theta_1 - g.theta_3) > np.sin(g.theta_1) else 3)
    worst.append((e, g.r_mm, g.theta_1, g.d_nm, regime, l, a, b))

worst.sort(reverse=True)
print("worst |piecewise - arcwise| per geometry (top 12):")
for e, r, th, d, reg, l, a, b in worst[:12]:
    print(f"  err={e:.3e} r_mm={r:6.1f} th1={th:6.3f} d={d:4.0f} regime={reg} "
          f"at l={l:8.2f} pw={a:.6f} arc={b:.6f}")
print(f"geometries with max err < 1e-5: {sum(1 for w in worst if w[0] < 1e-5)}/{len(worst)}")
