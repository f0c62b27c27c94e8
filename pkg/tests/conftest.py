"""Shared helpers: independent oracles and synthetic system builders."""

import math

import numpy as np
import pytest

from duplink.metrics import CrossGainMatrices
from duplink.network import noise_power


def scalar_interference(s, p1, p2):
    """Effective interference computed the slow way, straight from the
    scenario: per (UE, link), sum co-channel received powers at the link's
    PoA and normalize by the own gain. Independent of the matrix builder."""
    n = len(s.ues)
    e1 = np.zeros(n)
    e2 = np.zeros(n)
    p = {1: p1, 2: p2}
    for i, ue_i in enumerate(s.ues):
        for x in ([1, 2] if ue_i.dual else [1]):
            poa_id, chan_id = ue_i.link(x)
            total = noise_power(s, ue_i.id, x)
            for j, ue_j in enumerate(s.ues):
                if j == i:
                    continue
                for y in ([1, 2] if ue_j.dual else [1]):
                    _, chan_j = ue_j.link(y)
                    if chan_j == chan_id:
                        total += s.gains[(ue_j.id, poa_id, chan_id)] * p[y][j]
            own = s.gains[(ue_i.id, poa_id, chan_id)]
            (e1 if x == 1 else e2)[i] = total / own
    return e1, e2


def random_system(rng, n, coupling=0.05):
    """Synthetic CrossGainMatrices with the structural invariants but
    otherwise arbitrary values; used for pure linear-algebra properties."""

    def cross(scale):
        f = scale * rng.random((n, n))
        np.fill_diagonal(f, 0.0)
        return f

    w1 = rng.choice([1e6, 5e6, 10e6], size=n)
    w2 = rng.choice([1e6, 5e6, 10e6], size=n)
    return CrossGainMatrices(
        f11=cross(coupling),
        f12=cross(coupling),
        f21=cross(coupling),
        f22=cross(coupling),
        d1=rng.uniform(1e-4, 0.1, size=n),
        d2=rng.uniform(1e-4, 0.1, size=n),
        w1=w1,
        w2=w2,
        lam=1.0 / (w1 + w2),
    )


def gelfand_radius(m, iters=10000, seed=0):
    """Spectral radius via the growth rate of ||M^k x||, renormalizing each
    step so nothing under- or overflows. The first half of the iterations is
    burn-in; the log-gain is averaged over an even-length tail so dominant
    eigenvalue pairs of equal modulus (e.g. +/- lambda) average out exactly."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    burn_in = iters // 2
    tail = iters - burn_in
    tail -= tail % 2
    log_gain = 0.0
    for k in range(burn_in + tail):
        y = m @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        if k >= burn_in:
            log_gain += math.log(norm)
        x = y / norm
    return math.exp(log_gain / tail)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
