import numpy as np
from padnet.geometry import ClusterPairGeometry
from padnet import travel

rng = np.random.default_rng(3)
for (r_mm, th, d) in [(180.0, np.pi / 6, 300.0), (180.0, np.pi / 4, 300.0),
                      (100.0, np.pi / 2, 300.0)]:
    g = ClusterPairGeometry(r_mm, th, d)
    emp = travel.sample_l_oracle(g, 1e-5, 100_000, rng)
    p0_emp = float(np.mean(emp.samples == 0.0))
    p0_ana = travel.prob_l_zero(g, 1e-5)
    print(f"r_mm={r_mm} th={th:.3f} r_mn={g.r_mn:.1f}: atom emp={p0_emp:.4f} ana={p0_ana:.4f}")
    for l in (0.1 * g.r_mn, 0.5 * g.r_mn, 1.0 * g.r_mn, 1.5 * g.r_mn):
        print(f"   l={l:7.1f}: emp={emp.cdf(l):.4f} arc={travel.cdf_l_arcwise(float(l), g, 1e-5):.4f}"
              f" pw={travel.cdf_l(float(l), g, 1e-5):.4f}")
