# Copyright 2026 The cbo-lab Authors
# SPDX-License-Identifier: Apache-2.0

"""Independent float64 reference for the golden 10-step trajectory test.

Philox4x32-10 and the 53-bit uniform mapping are re-implemented here; normals
use scipy.special.ndtri, so agreement with the C++ code is to rounding only.
"""
import numpy as np
from scipy.special import ndtri

M32 = 0xFFFFFFFF


def philox(ctr, key):
    c0, c1, c2, c3 = ctr
    k0, k1 = key
    for _ in range(10):
        p0 = 0xD2511F53 * c0
        p1 = 0xCD9E8D57 * c2
        c0, c1, c2, c3 = ((p1 >> 32) ^ c1 ^ k0) & M32, p1 & M32, ((p0 >> 32) ^ c3 ^ k1) & M32, p0 & M32
        k0 = (k0 + 0x9E3779B9) & M32
        k1 = (k1 + 0xBB67AE85) & M32
    return c0, c1, c2, c3


def unit(hi, lo):
    return ((((hi << 32) | lo) >> 11) + 0.5) * 2.0**-53


def normals(seed, purpose, channel, particle, step, d):
    key = (seed & M32, seed >> 32)
    stream = (purpose << 1) | channel
    out = []
    for k in range(0, d, 2):
        r = philox((particle, step, k // 2, stream), key)
        out.append(ndtri(unit(r[0], r[1])))
        out.append(ndtri(unit(r[2], r[3])))
    return np.array(out[:d])


INITIAL, BROWNIAN = 0, 1
INCREMENTS, DATA = 0, 1


def run(seed=42, n=4, d=1, steps=10, lam=1.0, sigma=1.0, alpha=1.0, kappa=0.5, delta=0.1,
        dt=0.1, mean=1.0, var=1.0):
    x = np.array([mean + np.sqrt(var) * normals(seed, INITIAL, DATA, i, 0, d) for i in range(n)])
    for step in range(steps):
        f = (x**2).sum(axis=1)
        w = np.exp(-alpha * (f - f.min()))
        m = (w[:, None] * x).sum(axis=0) / w.sum()
        xi = np.array([normals(seed, BROWNIAN, INCREMENTS, i, step, d) for i in range(n)])
        y = x - kappa * m
        x = x - lam * y * dt + sigma * (delta + np.abs(y)) * np.sqrt(dt) * xi
    return x


if __name__ == "__main__":
    print("KAT zero", [hex(v) for v in philox((0, 0, 0, 0), (0, 0))])
    for v in run().ravel():
        print(repr(float(v)))
