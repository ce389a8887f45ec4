import numpy as np
from padnet.geometry import ClusterPairGeometry
from padnet import travel


def grid_cdf(fn, g, lam, n=400):
    top = 2 * g.r_mn
    grid = np.concatenate(([0.0], np.geomspace(top * 1e-4, top, n - 1)))
    vals = np.array([fn(float(l), g, lam) for l in grid])
    return lambda x: np.interp(x, grid, vals)


rng = np.random.default_rng(11)
cases = [(180.0, np.pi / 4, 300.0), (180.0, np.pi / 6, 300.0),
         (100.0, 3 * np.pi / 4, 300.0), (100.0, np.pi / 2, 300.0)]
for r_mm, th, d in cases:
    g = ClusterPairGeometry(r_mm, th, d)
    emp = travel.sample_l_oracle(g, 1e-5, 200_000, rng)
    ks_pw = emp.ks_distance(grid_cdf(travel.cdf_l, g, 1e-5))
    ks_arc = emp.ks_distance(grid_cdf(travel.cdf_l_arcwise, g, 1e-5))
    print(f"r_mm={r_mm} th={th:.3f}: KS piecewise={ks_pw:.4f}  KS arcwise={ks_arc:.4f}")
