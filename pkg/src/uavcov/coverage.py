"""Association, SNR distributions and spatial coverage.

Uplink: the UAV associates with the GBS of largest realised combined gain.
Walking the link table in descending LoS-gain order makes the association
pmf exact: the m-th row serves in LoS iff it is LoS and every earlier row
is NLoS, and once the walk reaches rows whose LoS gain falls below the
best NLoS gain ``C_NL_max`` the realised maximum is ``C_NL_max`` no matter
what happens further down, which closes the walk with a single terminal
event.  An optional probability floor ``eps`` truncates the walk early,
assigning the remaining mass to the terminal event (or dropping it and
renormalising).

Downlink: conditioned on an association event, every co-channel GBS other
than the serving one interferes when active (probability ``omega`` per
site).  GBSs the event forces into NLoS contribute {0, C_NL} two-point
summands, the rest contribute {0, C_NL, C_L} three-point summands; the
conditional interference cdf is then a lattice-approximated sum
(:func:`uavcov.gpm.la_cdf`) and the SNR cdf follows from
P{snr <= y} = P{I >= C/y - alpha0} summed over events.

Spatial coverage averages the per-point non-outage probability over a
deterministic sampling grid, optionally across altitudes by trapezoidal
quadrature normalised by the altitude span.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .antenna import UavAntenna
from .channel import ChannelModel, LinkTable, build_link_table
from .geometry import NetworkLayout, SamplingRegion, sample_region
from .gpm import DiscreteSummand, GpmSpec, SteppedCdf, la_cdf

PROB_SUM_TOL = 1e-9


class AssociationState(Enum):
    LOS = "los"
    NLOS_MAX = "nlos_max"
    NONE = "none"


@dataclass(frozen=True)
class AssociationEvent:
    """One atom of the association distribution.

    ``forced_nlos_ids`` are the GBSs conditioned into NLoS by the event:
    the walked prefix for a LoS event, every site with ``c_los >=
    C_NL_max`` for the terminal event.
    """

    serving_id: int | None
    state: AssociationState
    gain: float
    probability: float
    forced_nlos_ids: frozenset[int]


def association_pmf(
    table: LinkTable,
    eps: float = 0.0,
    remainder: str = "terminal",
) -> tuple[AssociationEvent, ...]:
    """Exact (eps = 0) or truncated association distribution.

    ``remainder`` picks what happens to the mass left when the walk is cut
    by ``eps``: ``"terminal"`` folds it into the terminal event (the sum
    stays exactly 1), ``"drop"`` discards it and renormalises the rest.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if remainder not in ("terminal", "drop"):
        raise ValueError(f"remainder must be 'terminal' or 'drop', got {remainder!r}")
    if len(table) == 0:
        raise ValueError("cannot associate against an empty link table")

    rows = table.rows
    c_nlos = table.c_nlos_array()
    c_nlos_max = float(c_nlos.max())
    if c_nlos_max == 0.0:
        # No GBS has any gain toward the UAV: the SNR is 0 surely.
        return (AssociationEvent(None, AssociationState.NONE, 0.0, 1.0, frozenset()),)

    terminal_row = rows[int(np.argmax(c_nlos))]
    terminal_forced = frozenset(r.gbs_id for r in rows if r.c_los >= c_nlos_max)

    events: list[AssociationEvent] = []
    prefix = 1.0
    truncated = False
    for m, row in enumerate(rows):
        if row.c_los < c_nlos_max:
            break
        if eps > 0.0 and prefix < eps:
            truncated = True
            break
        if row.p_los > 0.0 and prefix > 0.0:
            events.append(
                AssociationEvent(
                    row.gbs_id,
                    AssociationState.LOS,
                    row.c_los,
                    row.p_los * prefix,
                    frozenset(r.gbs_id for r in rows[:m]),
                )
            )
        prefix *= 1.0 - row.p_los
    keep_remainder = prefix > 0.0 and not (truncated and remainder == "drop")
    if keep_remainder:
        events.append(
            AssociationEvent(
                terminal_row.gbs_id,
                AssociationState.NLOS_MAX,
                c_nlos_max,
                prefix,
                terminal_forced,
            )
        )
    total = sum(e.probability for e in events)
    if truncated and remainder == "drop":
        events = [
            AssociationEvent(e.serving_id, e.state, e.gain, e.probability / total, e.forced_nlos_ids)
            for e in events
        ]
        total = sum(e.probability for e in events)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise AssertionError(f"association probabilities sum to {total!r}")
    return tuple(events)


# ---------------------------------------------------------------------------
# Uplink
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UplinkSnrPmf:
    """Atoms of the uplink SNR distribution, values ascending."""

    values: np.ndarray
    probs: np.ndarray

    def outage(self, threshold: float) -> float:
        """P{snr < threshold} (strict: mass exactly at the threshold is
        not outage).  Clipped to [0, 1]; the raw sum can overshoot 1 by
        float roundoff."""
        return min(1.0, max(0.0, float(self.probs[self.values < threshold].sum())))

    def to_cdf(self) -> SteppedCdf:
        return SteppedCdf(self.values, np.cumsum(self.probs) / self.probs.sum())


def uplink_snr_pmf(table: LinkTable, beta0: float, eps: float = 0.0) -> UplinkSnrPmf:
    """Distribution of beta0 * (serving combined gain); events with equal
    gain merge into one atom."""
    if beta0 <= 0:
        raise ValueError(f"beta0 must be positive, got {beta0}")
    acc: dict[float, float] = {}
    for event in association_pmf(table, eps):
        snr = beta0 * event.gain
        acc[snr] = acc.get(snr, 0.0) + event.probability
    values = np.array(sorted(acc))
    probs = np.array([acc[v] for v in sorted(acc)])
    return UplinkSnrPmf(values, probs)


def uplink_outage(pmf: UplinkSnrPmf, threshold: float) -> float:
    return pmf.outage(threshold)


# ---------------------------------------------------------------------------
# Downlink
# ---------------------------------------------------------------------------

def _omega_for(omega, gbs_id: int) -> float:
    value = omega[gbs_id] if isinstance(omega, Mapping) else omega
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"loading factor for GBS {gbs_id} must lie in [0, 1], got {value}")
    return float(value)


def conditional_interference_spec(
    event: AssociationEvent,
    table: LinkTable,
    co_channel_ids: set[int],
    omega,
) -> GpmSpec:
    """Aggregate interference under one association event.

    Each co-channel GBS is silent with probability 1 - omega; when active
    it contributes its NLoS gain if the event forces it NLoS, otherwise
    its NLoS/LoS gain split by its LoS probability.  ``omega`` is a scalar
    or a per-id mapping.  The serving GBS must not be in the set.
    """
    if event.serving_id is not None and event.serving_id in co_channel_ids:
        raise ValueError(f"serving GBS {event.serving_id} cannot interfere with itself")
    summands = []
    for gbs_id in sorted(co_channel_ids):
        row = table.row_for(gbs_id)
        w = _omega_for(omega, gbs_id)
        if gbs_id in event.forced_nlos_ids:
            pairs = [(0.0, 1.0 - w), (row.c_nlos, w)]
        else:
            pairs = [
                (0.0, 1.0 - w),
                (row.c_nlos, w * (1.0 - row.p_los)),
                (row.c_los, w * row.p_los),
            ]
        summands.append(DiscreteSummand.from_pairs(pairs))
    if not summands:
        # A band with no interferer: interference is identically zero.
        summands.append(DiscreteSummand([0.0], [1.0]))
    return GpmSpec(summands)


@dataclass(frozen=True)
class DownlinkEventTerm:
    probability: float
    gain: float
    interference: SteppedCdf | None  # None when the event carries no gain


@dataclass(frozen=True, eq=False)
class DownlinkSnrCdf:
    """Mixture cdf of the downlink SNR over association events.

    Evaluation is exact given each event's interference cdf:
    P{snr <= y} = sum_e P_e * P{I_e >= C_e / y - alpha0}.
    """

    terms: tuple[DownlinkEventTerm, ...]
    alpha0: float

    def eval(self, y) -> np.ndarray:
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(ys <= 0):
            raise ValueError("SNR cdf is evaluated at positive y only")
        out = np.zeros(ys.shape)
        for term in self.terms:
            if term.interference is None or term.gain == 0.0:
                out += term.probability
                continue
            c = term.gain / ys - self.alpha0
            out += term.probability * (1.0 - term.interference.eval_left(c))
        out = np.clip(out, 0.0, 1.0)
        if np.isscalar(y):
            return float(out[0])
        return out

    __call__ = eval

    def outage(self, threshold: float) -> float:
        """P{snr < threshold} (strict).  Clipped to [0, 1]; the event sum
        can overshoot 1 by float roundoff."""
        if threshold <= 0:
            raise ValueError(f"threshold must be positive, got {threshold}")
        total = 0.0
        for term in self.terms:
            if term.interference is None or term.gain == 0.0:
                total += term.probability
                continue
            c = term.gain / threshold - self.alpha0
            total += term.probability * (1.0 - float(term.interference.eval(c)))
        return min(1.0, max(0.0, total))

    def default_grid(self, threshold: float | None = None, n: int = 241) -> np.ndarray:
        """Log-spaced evaluation grid.

        Anchored three decades either side of ``threshold`` when one is
        given (with the threshold itself inserted exactly); otherwise spans
        the transition region implied by the event gains.
        """
        if threshold is not None:
            if threshold <= 0:
                raise ValueError(f"threshold must be positive, got {threshold}")
            grid = np.geomspace(threshold / 1e3, threshold * 1e3, n)
            return np.unique(np.append(grid, threshold))
        gains = [t.gain for t in self.terms if t.gain > 0.0]
        if not gains:
            return np.array([1.0])
        y_hi = 2.0 * max(gains) / self.alpha0
        spans = []
        for t in self.terms:
            if t.gain > 0.0 and t.interference is not None:
                i_hi = float(t.interference.xs[-1])
                spans.append(t.gain / (self.alpha0 + i_hi))
        y_lo = 0.5 * min(spans)
        return np.geomspace(y_lo, y_hi, n)

    def sample(
        self, y_grid=None, threshold: float | None = None, n: int = 241
    ) -> tuple[np.ndarray, np.ndarray]:
        if y_grid is None:
            grid = self.default_grid(threshold, n)
        else:
            grid = np.asarray(y_grid, dtype=float)
        return grid, self.eval(grid)


def downlink_snr_cdf(
    table: LinkTable,
    omega,
    alpha0: float,
    *,
    co_channel: set[int] | None = None,
    eps: float = 0.0,
    c0: float = 1000.0,
) -> DownlinkSnrCdf:
    """Downlink SNR cdf with lattice-approximated conditional interference.

    With ``co_channel=None`` each event draws its interferers from the
    link table rows sharing the serving GBS's band; an explicit id set
    overrides that (the serving GBS is excluded from it per event).
    """
    if alpha0 <= 0:
        raise ValueError(f"alpha0 must be positive, got {alpha0}")
    terms = []
    for event in association_pmf(table, eps):
        if event.serving_id is None or event.gain == 0.0:
            terms.append(DownlinkEventTerm(event.probability, 0.0, None))
            continue
        if co_channel is None:
            ids = table.band_members(table.row_for(event.serving_id).band)
        else:
            ids = set(co_channel)
        ids.discard(event.serving_id)
        spec = conditional_interference_spec(event, table, ids, omega)
        _, cdf = la_cdf(spec, c0)
        terms.append(DownlinkEventTerm(event.probability, event.gain, cdf))
    return DownlinkSnrCdf(tuple(terms), alpha0)


def downlink_outage(cdf: DownlinkSnrCdf, threshold: float) -> float:
    return cdf.outage(threshold)


# ---------------------------------------------------------------------------
# Spatial coverage
# ---------------------------------------------------------------------------

class LinkDirection(Enum):
    UPLINK = "uplink"
    DOWNLINK = "downlink"


@dataclass(frozen=True)
class _PointContext:
    """Everything a worker needs to score one UAV position (picklable)."""

    layout: NetworkLayout
    gbs_pattern: object
    uav_antenna: UavAntenna
    channel: ChannelModel
    gbs_height: float
    altitude: float
    link: LinkDirection
    threshold: float
    beta0: float
    alpha0: float
    omega: object
    eps: float
    c0: float


def _non_outage_at(ctx: _PointContext, xy) -> float:
    table = build_link_table(
        ctx.layout, ctx.gbs_pattern, ctx.uav_antenna, ctx.channel,
        (xy[0], xy[1], ctx.altitude), ctx.gbs_height,
    )
    if ctx.link is LinkDirection.UPLINK:
        pmf = uplink_snr_pmf(table, ctx.beta0, ctx.eps)
        return 1.0 - pmf.outage(ctx.threshold)
    cdf = downlink_snr_cdf(table, ctx.omega, ctx.alpha0, eps=ctx.eps, c0=ctx.c0)
    return 1.0 - cdf.outage(ctx.threshold)


@dataclass(frozen=True, eq=False)
class CoverageResult:
    """Per-point non-outage probabilities and their spatial average."""

    points: np.ndarray
    non_outage: np.ndarray
    coverage: float
    altitude: float
    link: LinkDirection
    threshold: float


def coverage_at_altitude(
    layout: NetworkLayout,
    gbs_pattern,
    uav_antenna: UavAntenna,
    channel: ChannelModel,
    *,
    gbs_height: float,
    altitude: float,
    region: SamplingRegion,
    link: LinkDirection,
    threshold: float,
    beta0: float = 1.0,
    alpha0: float = 1.0,
    omega=0.5,
    eps: float = 0.0,
    c0: float = 1000.0,
    workers: int = 1,
) -> CoverageResult:
    """Average non-outage probability over a sampling region at one
    altitude.  ``workers`` > 1 evaluates grid points in parallel; results
    are assembled in grid order so the output does not depend on it."""
    points = sample_region(region, layout.inter_site_distance)
    ctx = _PointContext(
        layout, gbs_pattern, uav_antenna, channel, gbs_height, altitude,
        link, threshold, beta0, alpha0, omega, eps, c0,
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(points) // (4 * workers))
            values = list(
                pool.map(_non_outage_at, [ctx] * len(points), points, chunksize=chunk)
            )
    else:
        values = [_non_outage_at(ctx, xy) for xy in points]
    non_outage = np.array(values)
    return CoverageResult(
        points, non_outage, float(non_outage.mean()), altitude, link, threshold
    )


def outage_map(
    layout: NetworkLayout,
    gbs_pattern,
    uav_antenna: UavAntenna,
    channel: ChannelModel,
    **kwargs,
) -> CoverageResult:
    """Per-point non-outage raster; same contract as
    :func:`coverage_at_altitude` (the region argument sets the raster)."""
    return coverage_at_altitude(layout, gbs_pattern, uav_antenna, channel, **kwargs)


def coverage_over_altitudes(
    layout: NetworkLayout,
    gbs_pattern,
    uav_antenna: UavAntenna,
    channel: ChannelModel,
    *,
    altitudes: Sequence[float],
    **kwargs,
) -> tuple[list[CoverageResult], float]:
    """Coverage at each altitude plus the altitude-averaged aggregate
    (trapezoidal quadrature normalised by the altitude span)."""
    alts = np.asarray(altitudes, dtype=float)
    if alts.size == 0:
        raise ValueError("need at least one altitude")
    if np.any(np.diff(alts) <= 0):
        raise ValueError("altitudes must be strictly increasing")
    results = [
        coverage_at_altitude(
            layout, gbs_pattern, uav_antenna, channel, altitude=float(h), **kwargs
        )
        for h in alts
    ]
    values = np.array([r.coverage for r in results])
    if alts.size == 1:
        return results, float(values[0])
    aggregate = float(np.trapezoid(values, alts) / (alts[-1] - alts[0]))
    return results, aggregate
