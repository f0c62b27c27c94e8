"""Per-link effective interference, SINR, and achievable rate.

The interference coupling of the whole network is condensed into four n x n
normalized cross-gain matrices. Entry ``f_xy[i, j]`` is the gain with which
UE j's transmission on its access link x lands in the receiver of UE i's
access link y, normalized by UE i's own link-y gain. It is zero on the
diagonal and whenever the two links use different channels, so

    e1 = d1 + f11 @ p1 + f21 @ p2
    e2 = d2 + f22 @ p2 + f12 @ p1

reproduces the scalar per-link interference sums exactly. ``d1``/``d2`` are
the noise powers normalized the same way.

Single-link UEs occupy regular rows/columns with their second-link entries
(d2, w2, and all f-columns involving link 2) identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Scenario, noise_power


@dataclass
class CrossGainMatrices:
    f11: np.ndarray
    f12: np.ndarray
    f21: np.ndarray
    f22: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    lam: np.ndarray  # 1 / (w1 + w2)

    @property
    def n(self) -> int:
        return self.d1.shape[0]


@dataclass
class PowerState:
    """Transmit powers of one iteration plus the quantities derived from them."""

    p1: np.ndarray
    p2: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    sinr1: np.ndarray
    sinr2: np.ndarray
    rate1: np.ndarray
    rate2: np.ndarray


def build_matrices(s: Scenario) -> CrossGainMatrices:
    """Assemble the normalized cross-gain matrices of a validated scenario.

    Raises KeyError when a gain entry required by the channel layout is
    missing from ``s.gains``.
    """
    n = s.n_ues
    f = {
        (1, 1): np.zeros((n, n)),
        (1, 2): np.zeros((n, n)),
        (2, 1): np.zeros((n, n)),
        (2, 2): np.zeros((n, n)),
    }
    d1 = np.zeros(n)
    d2 = np.zeros(n)
    w1 = np.zeros(n)
    w2 = np.zeros(n)

    def own_gain(ue, x):
        poa_id, chan_id = ue.link(x)
        key = (ue.id, poa_id, chan_id)
        if key not in s.gains:
            raise KeyError(f"missing own-link gain for UE {ue.id} link {x}: {key}")
        return s.gains[key]

    for i, ue_i in enumerate(s.ues):
        links_i = [1, 2] if ue_i.dual else [1]
        for x in links_i:
            g_own = own_gain(ue_i, x)
            noise = noise_power(s, ue_i.id, x)
            poa_id, chan_id = ue_i.link(x)
            bandwidth = s.channel(chan_id).bandwidth
            if x == 1:
                d1[i] = noise / g_own
                w1[i] = bandwidth
            else:
                d2[i] = noise / g_own
                w2[i] = bandwidth
            for j, ue_j in enumerate(s.ues):
                if j == i:
                    continue
                links_j = [1, 2] if ue_j.dual else [1]
                for y in links_j:
                    _, chan_j = ue_j.link(y)
                    if chan_j != chan_id:
                        continue
                    key = (ue_j.id, poa_id, chan_id)
                    if key not in s.gains:
                        raise KeyError(
                            f"missing cross gain: UE {ue_j.id} -> PoA {poa_id} "
                            f"on channel {chan_id}"
                        )
                    f[(y, x)][i, j] = s.gains[key] / g_own

    lam = 1.0 / (w1 + w2)
    return CrossGainMatrices(
        f11=f[(1, 1)], f12=f[(1, 2)], f21=f[(2, 1)], f22=f[(2, 2)],
        d1=d1, d2=d2, w1=w1, w2=w2, lam=lam,
    )


def effective_interference(
    m: CrossGainMatrices, p1: np.ndarray, p2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Noise-plus-interference seen by each link, normalized by own gain."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != (m.n,) or p2.shape != (m.n,):
        raise ValueError(f"power vectors must have shape ({m.n},)")
    e1 = m.d1 + m.f11 @ p1 + m.f21 @ p2
    e2 = m.d2 + m.f22 @ p2 + m.f12 @ p1
    return e1, e2


def link_rates(
    m: CrossGainMatrices,
    p1: np.ndarray,
    p2: np.ndarray,
    e1: np.ndarray,
    e2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Shannon rate w * log2(1 + p/e) per link; zero where p or w is zero."""

    def rates(p, e, w):
        out = np.zeros_like(np.asarray(p, dtype=float))
        active = (np.asarray(p) > 0) & (w > 0)
        if np.any((np.asarray(e) <= 0) & active):
            raise ValueError("nonpositive effective interference on an active link")
        out[active] = w[active] * np.log2(1.0 + np.asarray(p)[active] / np.asarray(e)[active])
        return out

    return rates(p1, e1, m.w1), rates(p2, e2, m.w2)


def compute_state(m: CrossGainMatrices, p1: np.ndarray, p2: np.ndarray) -> PowerState:
    """PowerState with interference, SINR and rates derived from the powers."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    e1, e2 = effective_interference(m, p1, p2)
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr1 = np.where(e1 > 0, p1 / np.where(e1 > 0, e1, 1.0), 0.0)
        sinr2 = np.where(e2 > 0, p2 / np.where(e2 > 0, e2, 1.0), 0.0)
    rate1, rate2 = link_rates(m, p1, p2, e1, e2)
    return PowerState(p1=p1, p2=p2, e1=e1, e2=e2, sinr1=sinr1, sinr2=sinr2,
                      rate1=rate1, rate2=rate2)
