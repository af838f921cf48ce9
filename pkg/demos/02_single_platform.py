"""One platform as a two-sided queue: waiting drivers, impatient drivers, price-sensitive riders."""

import numpy as np

from ridehail import MarketParams, Quadratic, eval_f_inverse
from ridehail import queueing as q

model = Quadratic(0.1, 9.0)
phi = eval_f_inverse(model, 0.75)  # 75% of riders accept this price

print("beta      U        B        revenue")
for beta in (2.0, 0.5, 0.1, 0.01, 0.0):
    params = MarketParams.from_e(Lambda=2.0, e=1.0, beta=beta)
    print(f"{beta:<8} {q.unavailability(params, model, 2.0, phi):.5f}  {q.blocking(params, model, 2.0, phi):.5f}"
          f"  {q.revenue_rate(params, model, 2.0, phi):.5f}")

# the product form is the stationary law of the full (waiting, away) chain
params = MarketParams.from_e(2.0, 1.0, beta=0.5)
pf = q.joint_stationary(params, model, 1.5, phi, n_max=29, r_max=29)
gen = q.ctmc_oracle(params, model, 1.5, phi, n_max=29, r_max=29)
print("product form vs generator, max abs diff:", float(np.abs(pf / pf.sum() - gen).max()))
