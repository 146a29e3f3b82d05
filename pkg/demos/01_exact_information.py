#!/usr/bin/env python3
"""How much does showing a feature tell a user about a prediction?

Walks through the exact Gaussian computation: build a model, look at the
joint second moments, and measure each candidate explanation by the
conditional mutual information it adds beyond the user's own summary.
"""

import numpy as np

from infoexplain import (
    GaussianModel,
    analytic_moments,
    conditional_mi,
    conditional_variance,
    mi_table,
)

# Three independent unit-variance features. The predictor reads the first
# two (yhat = x1 + x2); the user's summary is the third (u = x3), so the
# summary is useless for this prediction.
model = GaussianModel(np.eye(3), w=[1.0, 1.0, 0.0], v=[0.0, 0.0, 1.0])
moments = analytic_moments(model)

print("joint second moments of (x1, x2, x3, yhat, u):")
print(np.array_str(moments.sigma, precision=3))
print()

print("var(yhat | u)            =", conditional_variance(moments, ()))
print("var(yhat | u, x1)        =", conditional_variance(moments, (1,)))
print("var(yhat | u, x1, x2)    =", conditional_variance(moments, (1, 2)))
print()

# Showing x1 halves the conditional variance: 0.5 * ln 2 nats of information.
mi = conditional_mi(moments, (1,))
print(f"I(x1; yhat | u) = {mi.nats:.6f} nats "
      f"(= 0.5 * ln({mi.numerator_var:.0f}/{mi.denominator_var:.0f}))")

# Showing both x1 and x2 pins yhat down exactly. Differential entropy
# diverges, so the value is flagged as infinite rather than crashing.
mi_full = conditional_mi(moments, (1, 2))
print(f"I(x1, x2; yhat | u) = {mi_full.nats} (explanation determines yhat)")
print()

print("every explanation of size <= 2, best first:")
for support, value in mi_table(moments, s=2):
    label = "{" + ", ".join(f"x{i}" for i in support.indices) + "}"
    print(f"  {label:<12} mi = {value.nats}")
