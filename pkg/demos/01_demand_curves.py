"""How price-sensitive are passengers? Build curves, invert them and check the shape assumptions."""

import numpy as np

from ridehail import Linear, Quadratic, Tabulated, eval_f, eval_f_inverse, validate_assumptions

quad = Quadratic(a=0.1, phi_h=9.0)
print("acceptance at price 5:", eval_f(quad, 5.0))
print("price that keeps 40% of riders:", round(eval_f_inverse(quad, 0.4), 6))

# a curve measured at a handful of prices is interpolated monotonically
phi = np.linspace(0, 9, 10)
measured = Tabulated(tuple(phi), tuple(1 - (0.1 * phi) ** 2))
print("tabulated curve at 4.5:", round(float(eval_f(measured, 4.5)), 6))

for name, model in [("quadratic", quad), ("linear", Linear(0.05, 9.0)), ("too wide", Quadratic(0.1, 10.0))]:
    report = validate_assumptions(model)
    failed = [c.name for c in report.checks if not c.passed]
    print(f"{name:10s} ok={report.ok} failed={failed}")
