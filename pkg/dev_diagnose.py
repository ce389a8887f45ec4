"""For mismatching cases, identify which tabulated integrand matches the
arc fraction on each breakpoint-delimited r-interval."""
import sys
import numpy as np
from padnet.geometry import ClusterPairGeometry
from padnet import travel
from padnet.travel import _arc_overlap_fraction, _fraction, _edge_radii

r_mm, th, d, l = (float(x) for x in sys.argv[1:5])
g = ClusterPairGeometry(r_mm, th, d)
m = g.r_mn
r2d, r2d2 = _edge_radii(l, g)
bp = sorted({x for x in (abs(m - l), d - r_mm, r2d, r2d2, m) if 0 < x <= m})
print(f"r_mn={m:.2f} dr={d - r_mm:.2f} reach={abs(m - l):.2f} r2d={r2d:.2f} r2d2={r2d2:.2f}")
print(f"theta_3={g.theta_3:.4f}  K={m - (d - r_mm):.2f} S={2 * r_mm * np.sin(th / 2):.2f} "
      f"T={2 * r_mm * np.sin(th):.2f} C2={2 * r_mm * np.cos(np.pi - th - g.theta_3):.2f} 2R={2 * r_mm:.2f}")
edges = [0.0] + bp
for a, b in zip(edges[:-1], edges[1:]):
    if b - a < 1e-9:
        continue
    mids = np.linspace(a + 0.05 * (b - a), b - 0.05 * (b - a), 5)
    w = _arc_overlap_fraction(mids, l, g)
    matches = []
    for i in range(1, 10):
        fi = _fraction(i, mids, l, g)
        if np.allclose(fi, w, atol=1e-12, rtol=1e-9):
            matches.append(f"f{i}")
        elif np.allclose(fi, 1.0 - w, atol=1e-12, rtol=1e-9):
            matches.append(f"(1-f{i})")
    combos = []
    for i in range(1, 10):
        for j in range(i + 1, 10):
            fij = _fraction(i, mids, l, g) + _fraction(j, mids, l, g)
            if np.allclose(fij, w, atol=1e-12, rtol=1e-9):
                combos.append(f"f{i}+f{j}")
    print(f"  r in ({a:8.2f},{b:8.2f}): w={w[2]:.4f}  direct={matches}  pairs={combos}")
