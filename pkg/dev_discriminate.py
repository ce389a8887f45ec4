import numpy as np
from padnet.geometry import ClusterPairGeometry
from padnet import travel

rng = np.random.default_rng(42)
cases = [
    (180.0, np.pi / 4, 300.0, [51.2, 96.78, 107.3, 130.0]),
    (180.0, np.pi / 6, 300.0, [30.0, 51.21, 70.0]),
    (250.0, np.pi / 6, 300.0, [80.0, 105.31, 120.0]),
]
for r_mm, th, d, ls in cases:
    g = ClusterPairGeometry(r_mm, th, d)
    emp = travel.sample_l_oracle(g, 1e-5, 1_000_000, rng)
    print(f"r_mm={r_mm} th={th:.3f} d={d} (sigma ~ {0.5/np.sqrt(1e6):.1e})")
    for l in ls:
        e = emp.cdf(l)
        a = travel.cdf_l_arcwise(float(l), g, 1e-5)
        p = travel.cdf_l(float(l), g, 1e-5)
        print(f"  l={l:7.2f} emp={e:.5f} arc={a:.5f} (d={a-e:+.5f})  pw={p:.5f} (d={p-e:+.5f})")
