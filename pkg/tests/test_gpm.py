"""Sum-of-discrete-variables machinery: exact inversion, lattice
approximation, baselines and distances.

Oracles here are independent routes: iterated np.convolve for lattice
pmfs, itertools.product for tiny real-valued sums, and hand-enumerated
frozen examples.
"""

import itertools
import math

import numpy as np
import pytest

from conftest import random_integer_spec, random_spec
from uavcov.gpm import (
    DiscreteSummand,
    GaussianCdf,
    GpmSpec,
    LatticeDistribution,
    SteppedCdf,
    cf_sample,
    enumerate_cdf,
    gaussian_cdf,
    kolmogorov_distance,
    la_cdf,
    lattice_invert,
    load_spec,
    mc_cdf,
    quantization_adjusted_distance,
    write_cdf_csv,
)


def convolve_pmf(spec, length):
    """Exact lattice pmf by iterated convolution (independent oracle)."""
    out = np.zeros(length)
    out[0] = 1.0
    for summand in spec.summands:
        vec = np.zeros(length)
        for v, p in zip(summand.values, summand.probs):
            vec[int(round(v))] += p
        out = np.convolve(out, vec)[:length]
    return out


def product_atoms(spec):
    """All joint outcomes by brute force (independent oracle)."""
    acc = {}
    for combo in itertools.product(*[range(s.support_size) for s in spec.summands]):
        value = sum(s.values[i] for s, i in zip(spec.summands, combo))
        prob = math.prod(s.probs[i] for s, i in zip(spec.summands, combo))
        acc[value] = acc.get(value, 0.0) + prob
    return acc


# ---------------------------------------------------------------------------
# Summands and specs
# ---------------------------------------------------------------------------

def test_summand_validation():
    DiscreteSummand([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        DiscreteSummand([1.0, 0.0], [0.5, 0.5])      # not ascending
    with pytest.raises(ValueError):
        DiscreteSummand([0.0, 0.0], [0.5, 0.5])      # duplicate value
    with pytest.raises(ValueError):
        DiscreteSummand([0.0, 1.0], [0.6, 0.6])      # does not sum to 1
    with pytest.raises(ValueError):
        DiscreteSummand([0.0, 1.0], [-0.2, 1.2])


def test_summand_from_pairs_merges_and_drops():
    s = DiscreteSummand.from_pairs([(1.0, 0.25), (0.0, 0.5), (1.0, 0.25), (2.0, 0.0)])
    assert s.values.tolist() == [0.0, 1.0]
    assert s.probs.tolist() == [0.5, 0.5]


def test_summand_arrays_read_only():
    s = DiscreteSummand([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


def test_spec_moments_match_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(10):
        spec = random_spec(rng, 4)
        atoms = product_atoms(spec)
        mean = sum(v * p for v, p in atoms.items())
        var = sum((v - mean) ** 2 * p for v, p in atoms.items())
        assert spec.mean() == pytest.approx(mean, rel=1e-9)
        assert spec.variance() == pytest.approx(var, rel=1e-9, abs=1e-12)
        lo = sum(s.values[0] for s in spec.summands)
        hi = sum(s.values[-1] for s in spec.summands)
        assert spec.offset == pytest.approx(lo)
        assert spec.span == pytest.approx(hi - lo)


# ---------------------------------------------------------------------------
# Characteristic function and exact inversion
# ---------------------------------------------------------------------------

def test_cf_bounded_and_one_at_zero():
    rng = np.random.default_rng(17)
    for _ in range(25):
        spec = random_spec(rng, int(rng.integers(1, 9)))
        freqs = rng.uniform(-50.0, 50.0, size=64)
        vals = cf_sample(spec, freqs)
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)
        assert cf_sample(spec, 0.0) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_lattice_invert_matches_convolution():
    rng = np.random.default_rng(29)
    for _ in range(50):
        spec = random_integer_spec(rng, int(rng.integers(1, 9)), max_value=5)
        top = int(sum(s.values[-1] for s in spec.summands))
        n = top + 1 + int(rng.integers(0, 4))   # exact for any n >= support
        pmf = lattice_invert(spec.cf, n)
        want = convolve_pmf(spec, n)
        assert np.max(np.abs(pmf - want)) < 1e-9


def test_lattice_invert_point_mass():
    spec = GpmSpec([DiscreteSummand([3.0], [1.0])])
    pmf = lattice_invert(spec.cf, 8)
    want = np.zeros(8)
    want[3] = 1.0
    assert np.max(np.abs(pmf - want)) < 1e-12


def test_lattice_invert_rejects_off_lattice():
    spec = GpmSpec([DiscreteSummand([0.0, 0.5], [0.5, 0.5])])
    with pytest.raises(ValueError):
        lattice_invert(spec.cf, 8)


def test_lattice_invert_rejects_bad_length():
    with pytest.raises(ValueError):
        lattice_invert(lambda s: np.ones_like(s, dtype=complex), 0)


# ---------------------------------------------------------------------------
# Stepped cdfs
# ---------------------------------------------------------------------------

def test_stepped_cdf_eval_semantics():
    cdf = SteppedCdf([1.0, 2.0], [0.25, 1.0])
    assert cdf.eval(0.5) == 0.0
    assert cdf.eval(1.0) == 0.25       # right-continuous: includes the jump
    assert cdf.eval_left(1.0) == 0.0   # open variant excludes it
    assert cdf.eval(1.5) == 0.25
    assert cdf.eval_left(2.0) == 0.25
    assert cdf.eval(2.0) == 1.0
    assert cdf.eval(99.0) == 1.0
    np.testing.assert_allclose(cdf.jump_sizes(), [0.25, 0.75])


def test_stepped_cdf_from_pmf_coalesces():
    cdf = SteppedCdf.from_pmf([2.0, 1.0, 2.0 * (1 + 1e-15)], [0.5, 0.25, 0.25])
    assert cdf.xs.tolist() == [1.0, 2.0]
    np.testing.assert_allclose(cdf.cum, [0.25, 1.0])


def test_stepped_cdf_validation():
    with pytest.raises(ValueError):
        SteppedCdf([2.0, 1.0], [0.5, 1.0])
    with pytest.raises(ValueError):
        SteppedCdf([1.0, 2.0], [0.8, 0.5])
    with pytest.raises(ValueError):
        SteppedCdf([1.0, 2.0], [0.5, 0.9])


def test_lattice_distribution_to_cdf():
    dist = LatticeDistribution(10.0, 2.0, [0.25, 0.0, 0.75])
    cdf = dist.to_cdf()
    assert cdf.xs.tolist() == [10.0, 11.0]     # zero-mass lattice point dropped
    np.testing.assert_allclose(cdf.cum, [0.25, 1.0])
    with pytest.raises(ValueError):
        LatticeDistribution(0.0, 0.0, [1.0])
    with pytest.raises(ValueError):
        LatticeDistribution(0.0, 1.0, [0.4, 0.4])


# ---------------------------------------------------------------------------
# Lattice approximation
# ---------------------------------------------------------------------------

def test_la_cdf_frozen_example():
    # two fair summands on {0,1} and {0,2}: the four equally likely sums
    spec = GpmSpec([
        DiscreteSummand([0.0, 1.0], [0.5, 0.5]),
        DiscreteSummand([0.0, 2.0], [0.5, 0.5]),
    ])
    _, cdf = la_cdf(spec, 300.0)
    assert cdf.xs.tolist() == pytest.approx([0.0, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(cdf.cum, [0.25, 0.5, 0.75, 1.0], atol=1e-9)


def test_la_exact_when_values_hit_lattice():
    # span 4, c0 1000 -> beta 250: every scaled value is integral, so the
    # approximation must coincide with enumeration to float noise
    spec = GpmSpec([
        DiscreteSummand([0.0, 1.0], [0.3, 0.7]),
        DiscreteSummand([0.0, 3.0], [0.6, 0.4]),
    ])
    _, la = la_cdf(spec, 1000.0)
    exact = enumerate_cdf(spec)
    assert kolmogorov_distance(exact, la) < 1e-9


def test_la_degenerate_span():
    spec = GpmSpec([DiscreteSummand([4.0], [1.0]), DiscreteSummand([1.5], [1.0])])
    dist, cdf = la_cdf(spec, 1000.0)
    assert cdf.xs.tolist() == [5.5]
    assert cdf.cum.tolist() == [1.0]
    assert dist.pmf.tolist() == [1.0]


def test_la_rejects_small_c0():
    spec = GpmSpec([DiscreteSummand([0.0, 1.0], [0.5, 0.5])])
    with pytest.raises(ValueError):
        la_cdf(spec, 0.5)


def test_la_quantization_envelope():
    # every jump of the LA cdf lies within M/(2 beta) of enumeration mass
    rng = np.random.default_rng(41)
    for _ in range(20):
        spec = random_spec(rng, int(rng.integers(2, 9)))
        _, la = la_cdf(spec, 1000.0)
        exact = enumerate_cdf(spec)
        slack = len(spec) / (2.0 * 1000.0 / spec.span) * (1.0 + 1e-9)
        assert quantization_adjusted_distance(la, exact, slack) <= 1e-9


def test_la_moment_preservation():
    rng = np.random.default_rng(43)
    for _ in range(10):
        spec = random_spec(rng, int(rng.integers(2, 9)))
        dist, _ = la_cdf(spec, 1000.0)
        mean_la = float(np.arange(dist.pmf.size) @ dist.pmf) / dist.scale + dist.offset
        assert abs(mean_la - spec.mean()) <= len(spec) / (2.0 * dist.scale) + 1e-12


def test_la_cdf_monotone_and_normalised():
    rng = np.random.default_rng(47)
    for _ in range(10):
        spec = random_spec(rng, 6)
        _, cdf = la_cdf(spec, 500.0)
        assert np.all(np.diff(cdf.cum) >= 0)
        assert cdf.cum[-1] == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def test_enumerate_matches_product_oracle():
    rng = np.random.default_rng(53)
    for _ in range(10):
        spec = random_spec(rng, 4)
        cdf = enumerate_cdf(spec)
        atoms = sorted(product_atoms(spec).items())
        want = np.cumsum([p for _, p in atoms])
        assert np.allclose(cdf.xs, [v for v, _ in atoms], rtol=1e-12)
        assert np.allclose(cdf.cum, want / want[-1], atol=1e-12)


def test_enumerate_cap():
    spec = GpmSpec([DiscreteSummand([0.0, 1.0, 2.0], [0.3, 0.3, 0.4])] * 14)
    with pytest.raises(ValueError):
        enumerate_cdf(spec)


def test_enumerate_coalescing_keeps_distribution():
    # force intermediate coalescing with 15 binary summands (32768 states)
    rng = np.random.default_rng(59)
    summands = [
        DiscreteSummand([0.0, float(rng.uniform(0.5, 1.5))], [0.4, 0.6])
        for _ in range(15)
    ]
    spec = GpmSpec(summands)
    cdf = enumerate_cdf(spec)
    assert cdf.cum[-1] == pytest.approx(1.0, abs=1e-9)
    assert abs(float(np.diff(cdf.cum, prepend=0.0) @ cdf.xs) - spec.mean()) < 1e-9


def test_mc_cdf_deterministic_and_convergent():
    rng = np.random.default_rng(61)
    spec = random_spec(rng, 5)
    a = mc_cdf(spec, 50_000, seed=123)
    b = mc_cdf(spec, 50_000, seed=123)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.cum, b.cum)
    c = mc_cdf(spec, 50_000, seed=124)
    assert kolmogorov_distance(a, c) > 0.0
    assert kolmogorov_distance(enumerate_cdf(spec), a) < 0.02


def test_gaussian_cdf_shape():
    spec = GpmSpec([
        DiscreteSummand([0.0, 1.0], [0.5, 0.5]),
        DiscreteSummand([0.0, 2.0], [0.5, 0.5]),
    ])
    g = gaussian_cdf(spec)
    assert g.mean == pytest.approx(1.5)
    assert g.std == pytest.approx(math.sqrt(0.25 + 1.0))
    xs = np.linspace(-1.0, 6.0, 200)
    ys = g(xs)
    assert np.all(np.diff(ys) >= -1e-15)
    assert np.all(ys[xs < 0.0] == 0.0)
    assert g(6.0) > 0.999
    # degenerate spread collapses to a step
    step = GaussianCdf(2.0, 0.0)
    assert step(1.9) == 0.0 and step(2.0) == 1.0


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

def test_kolmogorov_displaced_atom():
    a = SteppedCdf([0.0], [1.0])
    b = SteppedCdf([1.0], [1.0])
    assert kolmogorov_distance(a, b) == 1.0
    assert kolmogorov_distance(a, a) == 0.0


def test_kolmogorov_symmetric_between_stepped():
    rng = np.random.default_rng(67)
    for _ in range(10):
        x = enumerate_cdf(random_spec(rng, 3))
        y = enumerate_cdf(random_spec(rng, 3))
        assert kolmogorov_distance(x, y) == pytest.approx(kolmogorov_distance(y, x))


def test_kolmogorov_hand_value():
    a = SteppedCdf([0.0, 2.0], [0.5, 1.0])
    b = SteppedCdf([1.0], [1.0])
    # on [0,1): |0.5-0| ; at 1: |0.5-1| ; on [1,2): 0.5 -> sup is 0.5
    assert kolmogorov_distance(a, b) == pytest.approx(0.5)


def test_kolmogorov_against_continuous():
    spec = GpmSpec([DiscreteSummand([0.0, 1.0], [0.5, 0.5])] * 15)
    exact = enumerate_cdf(spec)
    # a 15-trial coin sum is near normal; the gap to its moment-matched
    # gaussian is dominated by half the central atom, about 0.098
    d = kolmogorov_distance(exact, gaussian_cdf(spec))
    assert 0.05 < d < 0.15


def test_quantization_adjusted_bounds_plain_distance():
    rng = np.random.default_rng(71)
    for _ in range(10):
        a = enumerate_cdf(random_spec(rng, 3))
        b = enumerate_cdf(random_spec(rng, 3))
        assert quantization_adjusted_distance(a, b, 0.0) == pytest.approx(
            kolmogorov_distance(a, b)
        )
        assert quantization_adjusted_distance(a, b, 10.0) == 0.0
    with pytest.raises(ValueError):
        quantization_adjusted_distance(a, b, -1.0)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

def test_load_spec(tmp_path):
    path = tmp_path / "spec.txt"
    path.write_text(
        "# interference atoms\n"
        "values=0,1.5,4 probs=0.5,0.3,0.2\n"
        "\n"
        "values=0,2 probs=0.5,0.5   # trailing comment\n"
    )
    spec = load_spec(path)
    assert len(spec) == 2
    assert spec.summands[0].values.tolist() == [0.0, 1.5, 4.0]
    assert spec.summands[1].probs.tolist() == [0.5, 0.5]


def test_load_spec_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("values=0,1 probs=0.5\n")
    with pytest.raises(ValueError, match="bad.txt:1"):
        load_spec(bad)
    bad.write_text("values=0,x probs=0.5,0.5\n")
    with pytest.raises(ValueError, match="non-numeric"):
        load_spec(bad)
    bad.write_text("# only comments\n")
    with pytest.raises(ValueError, match="no summands"):
        load_spec(bad)


def test_write_cdf_csv(tmp_path):
    cdf = SteppedCdf([0.5, 1.5], [0.25, 1.0])
    path = tmp_path / "cdf.csv"
    write_cdf_csv(cdf, path, comment="config_sha256=cafe")
    lines = path.read_text().splitlines()
    assert lines[0] == "# config_sha256=cafe"
    assert lines[1] == "x,cdf"
    assert lines[2] == "0.5,0.25"
    assert lines[3] == "1.5,1"
