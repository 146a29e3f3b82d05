#!/usr/bin/env python3
"""Does the sample-based selector find the true optimal explanation?

The exact solver works from the model's covariance; the empirical one only
sees samples. This demo measures how often they agree as the sample count
grows, and how accurate the empirical information estimate is.
"""

from infoexplain import (
    analytic_moments,
    conditional_mi,
    empirical_moments,
    explain_from_samples,
    explain_population,
    random_gaussian_model,
    sample,
)

TRIALS = 30
BUDGET = 2

print(f"{TRIALS} random 6-feature models, budget {BUDGET}:")
print(f"{'m':>8} {'recovered':>10} {'worst MI error (nats)':>24}")
for m in (100, 1000, 10_000, 100_000):
    hits = 0
    worst = 0.0
    for trial in range(TRIALS):
        model = random_gaussian_model(6, seed=500 + trial)
        truth = explain_population(model, BUDGET)
        samples = sample(model, m, seed=9000 + trial)
        found = explain_from_samples(samples, BUDGET, "l0_exhaustive")
        hits += found.indices == truth.indices

        exact = conditional_mi(analytic_moments(model), truth)
        est = conditional_mi(empirical_moments(samples), truth)
        if not exact.is_infinite and not est.is_infinite:
            worst = max(worst, abs(est.nats - exact.nats))
    print(f"{m:>8} {hits:>7}/{TRIALS} {worst:>24.4f}")

print()
print("agreement and estimation both tighten as m grows; disagreements at")
print("small m come from models whose best and runner-up supports are nearly")
print("tied, where any finite sample can flip the ranking.")
