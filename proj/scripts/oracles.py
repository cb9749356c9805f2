#!/usr/bin/env python3
"""Independent numpy evaluations whose printed values are frozen in tests/.

Re-run after changing any fixture here and paste the output into
tests/test_oracles.cpp.
"""
import itertools

import numpy as np


def H(p):
    p = np.asarray(p, float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mi_joint(j):
    j = np.asarray(j, float)
    return H(j.sum(1)) + H(j.sum(0)) - H(j.ravel())


def ib_step(px, pyx, beta, ch):
    pout = px @ ch
    joint = (px[:, None] * ch).T @ pyx  # p(t, y)
    pyt = np.where(pout[:, None] > 0, joint / np.where(pout[:, None] > 0, pout[:, None], 1), pyx.T @ px)
    d = np.zeros_like(ch)
    for i in range(ch.shape[0]):
        for t in range(ch.shape[1]):
            m = pyx[i] > 0
            d[i, t] = (pyx[i, m] * np.log2(pyx[i, m] / pyt[t, m])).sum()
    w = pout[None, :] * np.exp2(-beta * d)
    return w / w.sum(1, keepdims=True)


def lagrangian(px, pyx, beta, ch):
    return mi_joint(px[:, None] * ch) - beta * mi_joint((px[:, None] * ch).T @ pyx)


np.set_printoptions(precision=17)
print("entropy(0.25,0.75) =", repr(H([0.25, 0.75])))
print("bsc(0.11) MI =", repr(1 - H([0.11, 0.89])))

# 4-sample toy for empirical MI
a = [0, 0, 1, 1]
b = [0, 1, 1, 1]
j = np.zeros((2, 2))
for u, v in zip(a, b):
    j[u, v] += 0.25
print("toy MI =", repr(mi_joint(j)))

# Fixed IB problem and starting channel
px = np.array([0.1, 0.2, 0.3, 0.4])
pyx = np.array([[0.9, 0.1], [0.7, 0.3], [0.2, 0.8], [0.4, 0.6]])
ch = np.array([[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.1, 0.1, 0.8], [0.3, 0.4, 0.3]])
beta = 20.0
one = ib_step(px, pyx, beta, ch)
print("one step =", ", ".join(repr(float(v)) for v in one.ravel()))
cur = ch
for _ in range(300):
    cur = ib_step(px, pyx, beta, cur)
print("300 steps lagrangian =", repr(lagrangian(px, pyx, beta, cur)))
print("300 steps I(Y;T) =", repr(mi_joint((px[:, None] * cur).T @ pyx)))
print("I(X;Y) =", repr(mi_joint(px[:, None] * pyx)))

# Brute force over hard assignments for the two-cluster problem
px = np.full(4, 0.25)
pyx = np.array([[1.0, 0], [1, 0], [0, 1], [0, 1]])
best = max(
    (mi_joint((px[:, None] * np.eye(2)[list(a)]).T @ pyx), a) for a in itertools.product(range(2), repeat=4)
)
print("cluster best I(Y;T) =", repr(best[0]), best[1])
