"""Check the formulas against a discrete-event simulation of the queue."""

from ridehail import MarketParams, Quadratic, eval_f_inverse
from ridehail import simulate as sim

model = Quadratic(0.1, 9.0)
params = MarketParams.from_e(2.0, 1.0, beta=1.0)
phi = eval_f_inverse(model, 0.75)

est = sim.simulate_platform(params, model, 2.0, phi, horizon=500_000, seed=2024)
target = sim.analytic_targets(params, model, 2.0, phi)
for name, e in (("u", est.u_hat), ("b", est.b_hat), ("revenue_rate", est.revenue_rate_hat)):
    print(f"{name:13s} sim {e.value:.4f} +- {e.half_width:.4f}   formula {target[name]:.4f}")

rep = sim.simulate_coupled(params, model, 1.0, 2.0, 0.0, 100_000, seed=1)
print("coupled runs: violations", rep.violations, "largest driver gap", rep.max_gap_n)

duo = sim.simulate_duopoly(params.with_(beta=0.001), model, 5.0, 1.0, "blocking", 10**6, seed=3)
print(f"duopoly payoffs {duo.platform1.revenue_rate_hat.value:.3f} and {duo.platform2.revenue_rate_hat.value:.3f}"
      " (limits 2.5 and 1.0)")
