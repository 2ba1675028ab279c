# Copyright 2026 The convduel Authors.
# SPDX-License-Identifier: Apache-2.0
"""Independent reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/generate.py
Uses mpmath (50 digits) for closed forms and scipy for the small MLE fits.
"""
import numpy as np
from mpmath import mp, mpf, exp, log, sqrt
from scipy.optimize import minimize

mp.dps = 50


def sig(z):
    return 1 / (1 + exp(-mpf(z)))


print("sigmoid(2)        ", mp.nstr(sig(2), 20))
print("sigmoid'(2)       ", mp.nstr(sig(2) * (1 - sig(2)), 20))
print("sigmoid(1)        ", mp.nstr(sig(1), 20))

# Confidence radius of the dueling estimator.
t, b, d, lam, k1, R, delta = 1, 0, 10, 1, mpf("0.105"), mpf("0.5"), mpf("0.1")
a = (2 / k1) * (R * sqrt(d * log((1 + 4 * k1 * (t + b) / (d * lam)) / delta)) + sqrt(lam * k1))
print("alpha_duel(1,0)   ", mp.nstr(a, 20))
t, b = 500, 100
a = (2 / k1) * (R * sqrt(d * log((1 + 4 * k1 * (t + b) / (d * lam)) / delta)) + sqrt(lam * k1))
print("alpha_duel(500,100)", mp.nstr(a, 20))

# Confidence radius of the MNL estimator.
t, b, d, k2 = 100, 10, 10, mpf("0.1")
a = sqrt(2 * d * log(1 + mpf(b + t) / d) + 2 * log(t)) / (2 * k2)
print("alpha_mnl(100,10) ", mp.nstr(a, 20))

# Regularized dueling MLE on a fixed 8-observation instance (lambda = 1).
D = np.array([[0.9, -0.2], [0.1, 0.7], [-0.5, 0.4], [1.2, 0.3],
              [-0.3, -0.8], [0.6, 0.6], [-1.1, 0.2], [0.4, -0.9]])
o = np.array([1, 1, 0, 1, 0, 1, 0, 1], dtype=float)


def neg_ll(th):
    z = D @ th
    return -(o @ z - np.logaddexp(0, z).sum() - 0.5 * th @ th)


def neg_grad(th):
    z = D @ th
    return -(D.T @ (o - 1 / (1 + np.exp(-z))) - th)


r = minimize(neg_ll, np.zeros(2), jac=neg_grad, method="BFGS", options={"gtol": 1e-13})
print("duel MLE theta    ", repr(r.x.tolist()), "loglik", repr(-r.fun))

# Unregularized MNL MLE: three assortments of size 3, chosen index (-1 = outside).
X = [np.array([[0.8, 0.1], [0.2, 0.9], [-0.6, 0.5]]),
     np.array([[0.5, -0.7], [-0.4, -0.3], [0.9, 0.4]]),
     np.array([[-0.2, 0.8], [0.7, 0.7], [0.1, -0.9]])]
picks = [[0, 1, -1, 0, 2], [2, -1, 0, 2, 1], [1, 0, -1, 1, 2]]


def mnl_neg_ll(th):
    s = 0.0
    for Xi, ch in zip(X, picks):
        u = np.concatenate([Xi @ th, [0.0]])
        lse = np.logaddexp.reduce(u)
        for c in ch:
            s += (u[c] if c >= 0 else 0.0) - lse
    return -s


r = minimize(mnl_neg_ll, np.zeros(2), method="BFGS", options={"gtol": 1e-13})
print("mnl MLE theta     ", repr(r.x.tolist()), "loglik", repr(-r.fun))
