#!/usr/bin/env python3
"""The empirical route: sparse regression of predictions on features.

With only samples of (features, prediction, user summary), the optimal
explanation is the support of the sparse fit yhat ~ alpha*u + beta.x.
Three solvers are compared: exhaustive best subset, orthogonal matching
pursuit, and the Lasso path with debiasing.
"""

import numpy as np

from infoexplain import (
    GaussianModel,
    lasso_lambda_max,
    lasso_path,
    lasso_path_fits,
    sample,
    solve_l0,
    solve_lasso,
)

model = GaussianModel(np.eye(6), w=[2.5, -1.5, 0.8, 0.0, 0.0, 0.0],
                      v=[0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
samples = sample(model, m=5000, seed=7)
print(f"{samples.m} samples, {samples.n} features, "
      "yhat = 2.5 x1 - 1.5 x2 + 0.8 x3, u = x4")
print()

print("best subset (exhaustive) per budget:")
for s in range(4):
    fit = solve_l0(samples, s, "exhaustive")
    print(f"  s={s}: support {fit.support}, rss/m = {fit.rss / samples.m:.4f}")
print()

print("orthogonal matching pursuit picks the same story greedily:")
fit = solve_l0(samples, 3, "omp")
print(f"  s=3: support {fit.support}, rss/m = {fit.rss / samples.m:.4f}")
print()

# --- a walk down the Lasso path ---------------------------------------------
lam_max = lasso_lambda_max(samples)
print(f"lambda_max = {lam_max:.1f} (above it every coefficient is zero)")
print("support growth along the regularization path:")
seen = set()
for lam, path_fit in lasso_path_fits(samples):
    if path_fit.support not in seen:
        seen.add(path_fit.support)
        print(f"  lambda = {lam:>10.2f}: support {path_fit.support}")
print()

chosen = lasso_path(samples, s=2)
print(f"path selection at budget 2: support {chosen.support} "
      f"(picked at lambda = {chosen.lam:.1f}, then refit without penalty)")
print(f"debiased coefficients: "
      f"{ {i: round(float(chosen.beta[i - 1]), 3) for i in chosen.support} }")
print()

# --- the stationarity certificate -------------------------------------------
lam = 0.2 * lam_max
fit = solve_lasso(samples, lam)
resid = samples.predictions - fit.alpha * samples.summaries \
    - samples.features @ fit.beta
corr = samples.features.T @ resid
print(f"optimality check at lambda = {lam:.1f}: "
      "|x_j . r| vs lambda/2 per coordinate")
for j in range(samples.n):
    state = "active" if fit.beta[j] != 0.0 else "zero  "
    print(f"  x{j + 1} ({state}): |corr| = {abs(corr[j]):10.3f}   "
          f"lambda/2 = {lam / 2:.3f}")
