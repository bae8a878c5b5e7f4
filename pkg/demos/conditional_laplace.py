"""Conditional densities of a linear model with Laplace noise.

Fits y = 2x - 1 + noise with n = 100 and reports, at five predictor values,
the squared error of the warped conditional estimate on a 100-point grid next
to that of its normal initial density.

Run with ``python3 demos/conditional_laplace.py`` (a few seconds).
"""

import numpy as np

from warpdens.evalbench import CONDLAPLACE, Scenario, query_locations, sample_scenario, true_pdf
from warpdens.conditional import estimate_conditional

s = Scenario(CONDLAPLACE, 100, seed=5)
y, X = sample_scenario(s)
x0s = query_locations(X, 5)
fits = estimate_conditional(X, y, x0s)

print("  x0     ISE initial  ISE warped")
totals = np.zeros(2)
for fit in fits:
    pts = np.linspace(fit.bounds.A, fit.bounds.B, 100)
    truth = true_pdf(s, pts, fit.x0)
    warped = fit(pts)
    initial = fit.initial((pts - fit.bounds.A) / fit.bounds.width) / fit.bounds.width
    ise = np.array([np.sum((initial - truth) ** 2), np.sum((warped - truth) ** 2)])
    totals += ise / len(fits)
    print(f"{fit.x0[0]:6.2f}  {ise[0]:11.4f}  {ise[1]:10.4f}")
print(f"  mean  {totals[0]:11.4f}  {totals[1]:10.4f}")
