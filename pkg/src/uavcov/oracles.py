"""Exhaustive reference implementations for validation.

These recompute the uplink and downlink SNR distributions by brute force
over every joint channel-state (and interferer-activity) combination.
They share no code with the production algorithms, so agreement is a
meaningful check; they are exponential in the network size and refuse to
run past hard caps.
"""

from __future__ import annotations

import numpy as np

from .channel import LinkTable
from .coverage import UplinkSnrPmf
from .gpm import SteppedCdf

UPLINK_STATE_CAP = 2**21
DOWNLINK_STATE_CAP = 2_000_000


def uplink_pmf_enumeration(
    table: LinkTable, beta0: float, cap: int = UPLINK_STATE_CAP
) -> UplinkSnrPmf:
    """Uplink SNR pmf over all 2^B LoS/NLoS state vectors."""
    b = len(table)
    if 2**b > cap:
        raise ValueError(f"enumeration needs 2^{b} states, above the cap of {cap}")
    c_los = table.c_los_array()
    c_nlos = table.c_nlos_array()
    p_los = table.p_los_array()
    acc: dict[float, float] = {}
    for mask in range(2**b):
        bits = (mask >> np.arange(b)) & 1
        realized = np.where(bits == 1, c_los, c_nlos)
        prob = float(np.prod(np.where(bits == 1, p_los, 1.0 - p_los)))
        if prob == 0.0:
            continue
        snr = beta0 * float(realized.max())
        acc[snr] = acc.get(snr, 0.0) + prob
    values = np.array(sorted(acc))
    return UplinkSnrPmf(values, np.array([acc[v] for v in sorted(acc)]))


def downlink_cdf_enumeration(
    table: LinkTable,
    omega,
    alpha0: float,
    co_channel: set[int] | None = None,
    cap: int = DOWNLINK_STATE_CAP,
) -> SteppedCdf:
    """Exact downlink SNR cdf over every joint (channel state, activity)
    combination.

    For each LoS/NLoS vector the serving GBS is the realised-gain argmax
    (first row in table order on ties); its co-channel set (same band, or
    the explicit ``co_channel`` ids) minus itself is then swept over all
    active/silent patterns, each active interferer contributing its own
    realised gain.
    """
    from .coverage import _omega_for  # shared loading validation

    b = len(table)
    rows = table.rows
    c_los = table.c_los_array()
    c_nlos = table.c_nlos_array()
    p_los = table.p_los_array()
    max_band = max(
        (sum(1 for r in rows if r.band == band) for band in {r.band for r in rows}),
        default=1,
    )
    interferer_bound = len(co_channel) if co_channel is not None else max_band
    if 2**b * 2**interferer_bound > cap:
        raise ValueError(
            f"joint enumeration needs up to 2^{b + interferer_bound} states, "
            f"above the cap of {cap}"
        )

    acc: dict[float, float] = {}
    for mask in range(2**b):
        bits = (mask >> np.arange(b)) & 1
        realized = np.where(bits == 1, c_los, c_nlos)
        state_prob = float(np.prod(np.where(bits == 1, p_los, 1.0 - p_los)))
        if state_prob == 0.0:
            continue
        s = int(np.argmax(realized))
        gain = float(realized[s])
        if gain == 0.0:
            acc[0.0] = acc.get(0.0, 0.0) + state_prob
            continue
        if co_channel is None:
            ids = {r.gbs_id for r in rows if r.band == rows[s].band}
        else:
            ids = set(co_channel)
        ids.discard(rows[s].gbs_id)
        members = sorted(ids)
        index_of = {r.gbs_id: k for k, r in enumerate(rows)}
        gains = np.array([realized[index_of[i]] for i in members])
        ws = np.array([_omega_for(omega, i) for i in members])
        m = len(members)
        for pattern in range(2**m):
            act = (pattern >> np.arange(m)) & 1 if m else np.zeros(0, dtype=int)
            act_prob = float(np.prod(np.where(act == 1, ws, 1.0 - ws))) if m else 1.0
            if act_prob == 0.0:
                continue
            interference = float(gains[act == 1].sum()) if m else 0.0
            snr = gain / (alpha0 + interference)
            acc[snr] = acc.get(snr, 0.0) + state_prob * act_prob
    values = sorted(acc)
    return SteppedCdf.from_pmf(values, [acc[v] for v in values])
