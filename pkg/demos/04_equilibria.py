"""Monopoly, the two duopolies and cooperation, side by side as drivers become scarce or plentiful."""

import numpy as np

from ridehail import MarketParams, Quadratic
from ridehail import equilibria as eq

model = Quadratic(0.1, 9.0)
params = MarketParams.from_e(2.0, 1.0)

sigma = eq.duopoly_b_equilibrium(params, model)
print("blocking duopoly at rho=0.5:", sigma.kind, "on", tuple(round(x, 4) for x in sigma.support))
print("every price in the support earns", round(sigma.mean_payoff, 6))
print("cdf at a few prices:", np.round(sigma.cdf(np.linspace(*sigma.support, 5)), 4))

report = eq.verify_ec(params, model, sigma.support)
print("cycle check: stability", report.stability.passed, "cyclicity", report.cyclicity.passed,
      f"minimality {report.refuted}/{report.tested} sub-intervals refuted")
print("security value", eq.security_value(params, model).value)

print("\nrho    monopoly  duopoly-U  duopoly-B")
for rho in (0.1, 0.3, 0.5, 0.8, 1.1):
    t = eq.compare_regimes(MarketParams.from_e(1.0, rho), model)
    print(f"{rho:<5}  {t.row('Monopoly').price:7.4f}  {t.row('Duopoly-U').price:8.4f}  "
          f"{t.row('Duopoly-B').price:8.4f}   dominance={t.all_dominance}")
