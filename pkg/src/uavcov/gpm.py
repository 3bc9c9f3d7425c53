"""Distribution of a sum of independent finite-support random variables.

A *spec* is a list of summands, each taking finitely many real values with
given probabilities (the summands may have different support sizes).  The
exact distribution of the sum has up to prod(L_i) atoms, so beyond toy
sizes it is recovered numerically:

  * ``lattice_invert``: when every summand is supported on non-negative
    integers the sum lives on 0..N-1 and its pmf is recovered *exactly*
    (up to float roundoff) by an inverse DFT of N characteristic-function
    samples  q_n = (1/N) * sum_k cf(2 pi k / N) exp(-2 pi i k n / N).

  * ``la_cdf``: real-valued summands are offset by their minimum value,
    scaled so the total span becomes ``c0`` lattice units, and rounded to
    integers (half away from zero); the integer-lattice pmf is then
    inverted by FFT and mapped back through
    F(x) ~= F_lattice(beta * (x - A0)).  Each summand moves by at most
    half a lattice unit, so every atom of the sum is displaced by at most
    M / (2 beta) along the value axis.

  * ``enumerate_cdf`` (exhaustive, capped), ``mc_cdf`` (seeded sampling)
    and ``gaussian_cdf`` (moment-matched normal truncated to x >= 0)
    serve as accuracy baselines.

Cumulative distributions follow the F(x) = P{X <= x} convention
throughout; ``SteppedCdf.eval_left`` gives the open variant P{X < x}.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import ndtr

# Relative spacing below which two atom values are considered one atom.
VALUE_MERGE_RTOL = 1e-12
# Inversion noise floors: more negative pmf mass or more imaginary residue
# than this means the FFT length was too short (aliasing), not roundoff.
NEGATIVE_PMF_TOL = 1e-8
IMAG_RESIDUE_TOL = 1e-9
PROB_SUM_TOL = 1e-12
# Lattice mass below this is indistinguishable from inversion round-off
# (observed ~4e-15) and gets dropped before the pmf is renormalised.
FFT_MASS_FLOOR = 1e-12

DEFAULT_ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True, eq=False)
class DiscreteSummand:
    """One independent term of the sum: finitely many values with
    strictly ascending support and positive probabilities summing to 1."""

    values: np.ndarray
    probs: np.ndarray

    def __init__(self, values, probs) -> None:
        v = np.asarray(values, dtype=float)
        p = np.asarray(probs, dtype=float)
        if v.ndim != 1 or p.ndim != 1 or v.size != p.size or v.size == 0:
            raise ValueError("values and probs must be equal-length 1-D, non-empty")
        if np.any(np.diff(v) <= 0):
            raise ValueError("summand values must be strictly ascending")
        if np.any(p <= 0):
            raise ValueError("summand probabilities must be positive")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"summand probabilities sum to {p.sum()!r}, not 1")
        v.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteSummand":
        """Build from (value, prob) pairs, merging duplicate values and
        dropping zero-probability entries."""
        acc: dict[float, float] = {}
        for value, prob in pairs:
            if prob < 0:
                raise ValueError(f"negative probability {prob} for value {value}")
            if prob > 0:
                acc[float(value)] = acc.get(float(value), 0.0) + float(prob)
        if not acc:
            raise ValueError("summand needs at least one positive-probability value")
        values = sorted(acc)
        return cls(values, [acc[v] for v in values])

    @property
    def support_size(self) -> int:
        return int(self.values.size)

    def mean(self) -> float:
        return float(self.values @ self.probs)

    def variance(self) -> float:
        m = self.mean()
        return float((self.values - m) ** 2 @ self.probs)


@dataclass(frozen=True, eq=False)
class GpmSpec:
    """The full sum: an immutable tuple of independent summands."""

    summands: tuple[DiscreteSummand, ...]

    def __init__(self, summands: Sequence[DiscreteSummand]) -> None:
        terms = tuple(summands)
        if not terms:
            raise ValueError("spec needs at least one summand")
        object.__setattr__(self, "summands", terms)

    def __len__(self) -> int:
        return len(self.summands)

    @property
    def offset(self) -> float:
        """A0 = sum of per-summand minima (the smallest possible sum)."""
        return float(sum(s.values[0] for s in self.summands))

    @property
    def span(self) -> float:
        """A = sum of per-summand ranges (largest minus smallest sum)."""
        return float(sum(s.values[-1] - s.values[0] for s in self.summands))

    def mean(self) -> float:
        return float(sum(s.mean() for s in self.summands))

    def variance(self) -> float:
        return float(sum(s.variance() for s in self.summands))

    def cf(self, s) -> np.ndarray:
        return cf_sample(self, s)


def cf_sample(spec: GpmSpec, s) -> np.ndarray:
    """Characteristic function E[exp(i s Z)] at the given frequencies.

    Product over summands of sum_l p_l exp(i s a_l); |cf| <= 1 everywhere
    and cf(0) = 1 exactly.
    """
    freqs = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.ones(freqs.shape, dtype=complex)
    for summand in spec.summands:
        out *= np.exp(1j * np.outer(freqs, summand.values)) @ summand.probs.astype(complex)
    if np.isscalar(s):
        return out[0]
    return out


def lattice_invert(cf: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """Exact pmf on 0..n-1 of an integer-lattice RV from n cf samples.

    ``cf`` must be the characteristic function of a variable supported on
    {0, ..., n-1}; sampling at 2 pi k / n for k = 0..n-1 then makes the
    inverse DFT reproduce the pmf up to float noise.  Negative dips within
    ``NEGATIVE_PMF_TOL`` are clamped to 0 and imaginary residues within
    ``IMAG_RESIDUE_TOL`` discarded; anything larger raises, because it
    signals aliasing (support outside 0..n-1) rather than roundoff.
    """
    if n < 1:
        raise ValueError(f"lattice size must be >= 1, got {n}")
    phi = np.asarray(cf(2.0 * math.pi * np.arange(n) / n), dtype=complex)
    if phi.shape != (n,):
        raise ValueError(f"cf sampler returned shape {phi.shape}, expected ({n},)")
    raw = np.fft.fft(phi) / n
    worst_imag = float(np.max(np.abs(raw.imag)))
    if worst_imag >= IMAG_RESIDUE_TOL:
        raise ValueError(
            f"imaginary residue {worst_imag:.3e} exceeds {IMAG_RESIDUE_TOL:.0e}; "
            "cf is not that of a variable on this lattice"
        )
    pmf = raw.real
    worst_neg = float(pmf.min())
    if worst_neg < -NEGATIVE_PMF_TOL:
        raise ValueError(
            f"negative pmf mass {worst_neg:.3e} exceeds {NEGATIVE_PMF_TOL:.0e}; "
            "lattice too short for the support (aliasing)"
        )
    pmf = np.where(pmf < 0.0, 0.0, pmf)
    total = pmf.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"inverted pmf sums to {total!r}, not 1")
    return pmf


# ---------------------------------------------------------------------------
# Stepped cumulative distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SteppedCdf:
    """Right-continuous step cdf: F(x) = P{X <= x} with atoms at ``xs``."""

    xs: np.ndarray
    cum: np.ndarray

    def __init__(self, xs, cum) -> None:
        x = np.asarray(xs, dtype=float)
        c = np.asarray(cum, dtype=float)
        if x.ndim != 1 or c.shape != x.shape or x.size == 0:
            raise ValueError("xs and cum must be equal-length 1-D, non-empty")
        if np.any(np.diff(x) <= 0):
            raise ValueError("jump locations must be strictly ascending")
        if np.any(np.diff(c) < 0) or c[0] < 0:
            raise ValueError("cumulative values must be non-decreasing and non-negative")
        if abs(c[-1] - 1.0) > 1e-9:
            raise ValueError(f"cdf must reach 1, got {c[-1]!r}")
        x.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "xs", x)
        object.__setattr__(self, "cum", c)

    @classmethod
    def from_pmf(cls, values, probs, merge_rtol: float = VALUE_MERGE_RTOL) -> "SteppedCdf":
        """Sort atoms, coalesce values within ``merge_rtol`` relative
        spacing, and accumulate."""
        v = np.asarray(values, dtype=float)
        p = np.asarray(probs, dtype=float)
        order = np.argsort(v, kind="stable")
        v = v[order]
        p = p[order]
        keep_v = [v[0]]
        keep_p = [p[0]]
        for value, prob in zip(v[1:], p[1:]):
            tol = merge_rtol * max(abs(value), abs(keep_v[-1]))
            if value - keep_v[-1] <= tol:
                keep_p[-1] += prob
            else:
                keep_v.append(value)
                keep_p.append(prob)
        cum = np.cumsum(keep_p)
        cum /= cum[-1]
        return cls(np.array(keep_v), cum)

    def eval(self, x) -> np.ndarray:
        """P{X <= x} (vectorised)."""
        idx = np.searchsorted(self.xs, np.asarray(x, dtype=float), side="right")
        padded = np.concatenate([[0.0], self.cum])
        return padded[idx]

    __call__ = eval

    def eval_left(self, x) -> np.ndarray:
        """P{X < x} (vectorised)."""
        idx = np.searchsorted(self.xs, np.asarray(x, dtype=float), side="left")
        padded = np.concatenate([[0.0], self.cum])
        return padded[idx]

    def jump_sizes(self) -> np.ndarray:
        return np.diff(self.cum, prepend=0.0)


@dataclass(frozen=True, eq=False)
class LatticeDistribution:
    """Integer-lattice image of a real sum: lattice point n carries the
    mass of values near n / scale + offset."""

    offset: float
    scale: float
    pmf: np.ndarray

    def __init__(self, offset: float, scale: float, pmf) -> None:
        q = np.asarray(pmf, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("pmf must be 1-D and non-empty")
        if np.any(q < 0):
            raise ValueError("pmf must be non-negative")
        if abs(q.sum() - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {q.sum()!r}, not 1")
        if not scale > 0:
            raise ValueError(f"scale must be positive, got {scale}")
        q.setflags(write=False)
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "scale", float(scale))
        object.__setattr__(self, "pmf", q)

    def to_cdf(self) -> SteppedCdf:
        """Stepped cdf in original value units, jumps at n/scale + offset;
        evaluating it realises F(x) = F_lattice(scale * (x - offset))."""
        support = np.flatnonzero(self.pmf > 0.0)
        return SteppedCdf(
            support / self.scale + self.offset,
            np.cumsum(self.pmf[support]) / self.pmf[support].sum(),
        )


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def _round_half_away(x: np.ndarray) -> np.ndarray:
    # Locale- and bankers-rounding-independent: round(2.5) = 3, round(-2.5) = -3.
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def la_cdf(spec: GpmSpec, c0: float = 1000.0) -> tuple[LatticeDistribution, SteppedCdf]:
    """Lattice-approximated cdf of the sum.

    Offsets each summand to start at 0, scales by beta = c0 / span,
    rounds the scaled values half-away-from-zero to integers, recovers the
    integer-sum pmf by FFT inversion (power-of-two length covering the
    quantized span), clamps tiny negative dips, renormalises, and maps the
    lattice back to value units.  A spec whose summands are all degenerate
    has zero span and returns the exact point mass at the offset.
    """
    if c0 < 1:
        raise ValueError(f"lattice target c0 must be >= 1, got {c0}")
    a0 = spec.offset
    span = spec.span
    if span == 0.0:
        dist = LatticeDistribution(a0, 1.0, np.array([1.0]))
        return dist, SteppedCdf(np.array([a0]), np.array([1.0]))
    beta = c0 / span
    quantized = []
    total_top = 0
    for summand in spec.summands:
        lattice_values = _round_half_away(beta * (summand.values - summand.values[0]))
        quantized.append(DiscreteSummand.from_pairs(zip(lattice_values, summand.probs)))
        total_top += int(lattice_values[-1])
    n = _next_pow2(total_top + 1)
    pmf = lattice_invert(GpmSpec(quantized).cf, n)
    # FFT round-off leaves ~1e-15 dust on lattice points that carry no
    # mass; without a floor it would surface as spurious cdf jumps
    pmf[pmf < FFT_MASS_FLOOR] = 0.0
    pmf = pmf / pmf.sum()
    dist = LatticeDistribution(a0, beta, pmf[: total_top + 1])
    return dist, dist.to_cdf()


def enumerate_cdf(spec: GpmSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> SteppedCdf:
    """Exact cdf by exhaustive convolution of the summands (oracle).

    Refuses specs with more than ``cap`` joint states; intermediate atom
    lists are coalesced as they grow, which never changes the distribution.
    """
    states = 1
    for summand in spec.summands:
        states *= summand.support_size
        if states > cap:
            raise ValueError(
                f"enumeration needs {states}+ joint states, above the cap of {cap}"
            )
    values = np.array([0.0])
    probs = np.array([1.0])
    for summand in spec.summands:
        values = (values[:, None] + summand.values[None, :]).ravel()
        probs = (probs[:, None] * summand.probs[None, :]).ravel()
        if values.size > 4096:
            step = SteppedCdf.from_pmf(values, probs)
            values = step.xs
            probs = step.jump_sizes()
    return SteppedCdf.from_pmf(values, probs)


def mc_cdf(spec: GpmSpec, n_samples: int, seed: int) -> SteppedCdf:
    """Empirical cdf of ``n_samples`` seeded draws of the sum."""
    if n_samples < 1:
        raise ValueError(f"need at least 1 sample, got {n_samples}")
    rng = np.random.default_rng(seed)
    total = np.zeros(n_samples)
    for summand in spec.summands:
        idx = rng.choice(summand.support_size, size=n_samples, p=summand.probs)
        total += summand.values[idx]
    values, counts = np.unique(total, return_counts=True)
    return SteppedCdf(values, np.cumsum(counts) / n_samples)


@dataclass(frozen=True)
class GaussianCdf:
    """Moment-matched normal baseline, truncated to x >= 0 and rescaled to
    total probability 1 (callable like a cdf)."""

    mean: float
    std: float

    def __call__(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        if self.std == 0.0:
            return (xs >= self.mean).astype(float)
        tail = ndtr(-self.mean / self.std)
        raw = ndtr((xs - self.mean) / self.std)
        out = (raw - tail) / (1.0 - tail)
        return np.where(xs < 0.0, 0.0, np.clip(out, 0.0, 1.0))


def gaussian_cdf(spec: GpmSpec) -> GaussianCdf:
    return GaussianCdf(spec.mean(), math.sqrt(spec.variance()))


def kolmogorov_distance(a: SteppedCdf, b) -> float:
    """sup |F_a - F_b|, probed from both sides of every jump.

    ``b`` may be another stepped cdf or any callable cdf; for callables
    the probe set is the jump set of ``a`` (a continuous cdf has equal
    one-sided limits, so those probes realise the supremum).
    """
    if isinstance(b, SteppedCdf):
        pts = np.union1d(a.xs, b.xs)
        right = np.abs(a.eval(pts) - b.eval(pts))
        left = np.abs(a.eval_left(pts) - b.eval_left(pts))
    else:
        pts = a.xs
        fb = np.asarray(b(pts), dtype=float)
        right = np.abs(a.eval(pts) - fb)
        left = np.abs(a.eval_left(pts) - fb)
    return float(max(right.max(), left.max()))


def quantization_adjusted_distance(
    approx: SteppedCdf, oracle: SteppedCdf, slack: float
) -> float:
    """Smallest eps with F_oracle(x - slack) - eps <= F_approx(x) <=
    F_oracle(x + slack) + eps at every probe point.

    This is the natural accuracy measure for lattice approximations whose
    atoms are displaced by at most ``slack`` along the value axis: plain
    sup-distance saturates at the mass of any displaced atom no matter how
    small the displacement, whereas this metric reports only mass that is
    genuinely missing or misplaced beyond ``slack``.
    """
    if slack < 0:
        raise ValueError(f"slack must be non-negative, got {slack}")
    pts = np.union1d(approx.xs, oracle.xs)
    over = np.maximum(approx.eval(pts) - oracle.eval(pts + slack), 0.0)
    under = np.maximum(oracle.eval(pts - slack) - approx.eval(pts), 0.0)
    over_l = np.maximum(approx.eval_left(pts) - oracle.eval_left(pts + slack), 0.0)
    under_l = np.maximum(oracle.eval_left(pts - slack) - approx.eval_left(pts), 0.0)
    return float(max(over.max(), under.max(), over_l.max(), under_l.max()))


# ---------------------------------------------------------------------------
# Text interfaces
# ---------------------------------------------------------------------------

def load_spec(path) -> GpmSpec:
    """Read a spec from text: one summand per line as
    ``values=v1,v2,... probs=p1,p2,...``; '#' starts a comment."""
    summands = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = dict(
                part.split("=", 1) for part in line.split() if "=" in part
            )
            if set(fields) != {"values", "probs"}:
                raise ValueError(
                    f"{path}:{lineno}: expected 'values=... probs=...', got {line!r}"
                )
            try:
                values = [float(v) for v in fields["values"].split(",")]
                probs = [float(p) for p in fields["probs"].split(",")]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from exc
            if len(values) != len(probs):
                raise ValueError(
                    f"{path}:{lineno}: {len(values)} values but {len(probs)} probs"
                )
            summands.append(DiscreteSummand.from_pairs(zip(values, probs)))
    if not summands:
        raise ValueError(f"{path}: no summands found")
    return GpmSpec(summands)


def write_cdf_csv(cdf: SteppedCdf, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(("x", "cdf"))
        for x, c in zip(cdf.xs, cdf.cum):
            writer.writerow([f"{x:.12g}", f"{c:.12g}"])
