import numpy as np
import math
from padnet.params import SystemParams, NumericsConfig
from padnet import analysis

p = SystemParams()
num = NumericsConfig()
model = analysis._interference_model(p, num, p.lambda_user)
rng = np.random.default_rng(9)
s = 1e8
W = num.mc_window_radius
lam = p.lambda_user
n = 200000
el = []
en = []
done = 0
while done < n:
    nb = min(2000, n - done)
    counts = rng.poisson(lam * math.pi * W * W, nb)
    tot = int(counts.sum())
    ids = np.repeat(np.arange(nb), counts)
    x = W * np.sqrt(rng.random(tot))
    pl = 1 / (1 + p.a_env * np.exp(-p.b_env * (np.degrees(np.arctan2(p.h, x)) - p.a_env)))
    los = rng.random(tot) < pl
    g = np.empty(tot)
    g[los] = rng.gamma(p.m_l, 1 / p.m_l, int(los.sum()))
    g[~los] = rng.exponential(1.0, int((~los).sum()))
    d2 = x * x + p.h * p.h
    pw_l = np.where(los, p.eta_l * p.rho_u * g * d2 ** (-p.alpha_l / 2), 0.0)
    pw_n = np.where(~los, p.eta_n * p.rho_u * g * d2 ** (-p.alpha_n / 2), 0.0)
    el.append(np.exp(-s * np.bincount(ids, weights=pw_l, minlength=nb)))
    en.append(np.exp(-s * np.bincount(ids, weights=pw_n, minlength=nb)))
    done += nb
el = np.concatenate(el)
en = np.concatenate(en)
Il, In = model.uav_field_integrals(np.array([s]))
print(f"LoS : MC={el.mean():.5f}+-{el.std()/math.sqrt(n):.5f}  ana={math.exp(-2*math.pi*lam*Il[0]):.5f}")
print(f"NLoS: MC={en.mean():.5f}+-{en.std()/math.sqrt(n):.5f}  ana={math.exp(-2*math.pi*lam*In[0]):.5f}")
