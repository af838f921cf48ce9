"""Where do riders go when two platforms post different prices?"""

from ridehail import MarketParams, Quadratic
from ridehail.wardrop import payoffs_at_we, solve_we, we_idp

model = Quadratic(0.1, 9.0)
base = MarketParams.from_e(2.0, 1.0)

limit = we_idp(base, model, "blocking", 5.0, 1.0)
print(f"patient drivers: expensive platform gets {limit.lambda1:.4f} of 2 riders per unit time")
for beta in (0.1, 0.01, 0.001, 1e-4):
    s = solve_we(base.with_(beta=beta), model, "blocking", 5.0, 1.0)
    print(f"  beta={beta:<7} lambda1={s.lambda1:.4f}")

print("payoffs in the limit:", payoffs_at_we(base, model, "blocking", 5.0, 1.0))

# when riders only care whether a driver is around, beta drops out
for beta in (0.01, 1.0, 10.0):
    s = solve_we(base.with_(beta=beta), model, "unavailability", 5.0, 0.0)
    print(f"unavailability split at beta={beta}: {s.lambda1:.6f}")
