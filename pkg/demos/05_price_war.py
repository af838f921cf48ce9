"""Alternating best responses: a crowded market settles, a thin one keeps undercutting.

Takes about half a minute.
"""

from ridehail import MarketParams, Quadratic
from ridehail import dynamics as dyn
from ridehail import equilibria as eq

model = Quadratic(1 / 10.01, 10.0)

busy = MarketParams.from_e(5.0, 1.0, beta=0.01)
traj = dyn.alternating_br(busy, model, "blocking", (9.0, 9.0), 30)
print("Lambda=5:", dyn.classify_trajectory(traj, 15, 1e-2),
      "| limiting NE", round(eq.duopoly_b_equilibrium(busy.with_(beta=0.0), model).price, 4))

thin = MarketParams.from_e(2.0, 1.0, beta=0.001)
lo, hi = eq.ec_endpoints(thin.with_(beta=0.0), model)
traj = dyn.alternating_br(thin, model, "blocking", (4.5, 4.5), 70, grid_n=800)
print(f"Lambda=2, beta=0.001: {dyn.classify_trajectory(traj, 25, 1e-2)} | cycle [{lo:.4f}, {hi:.4f}]")
print("tail of the price path:", [round(float(p), 3) for p in traj.prices()[-25:]])
