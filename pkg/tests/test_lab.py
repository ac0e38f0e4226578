import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoffman import (FIXTURES, SampledMultifunction, Schedule, UnknownFixture, estimate_moduli,
                     fixture, max_shift_kappa, polygon_fixture)

FAST = Schedule(radii=(1e-1, 1e-2, 1e-3), per_level=200, global_samples=500)


def test_fixture_names():
    assert set(FIXTURES) == {"staircase", "step", "interval", "truncated-halfline"}
    with pytest.raises(UnknownFixture):
        fixture("nope")


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(radii=(1e-2, 1e-1))
    with pytest.raises(ValueError):
        Schedule(radii=(1e-1,), eps=(1e-2,))  # eps below radius
    s = Schedule(radii=(1e-1, 1e-2)).refined()
    assert s.radii == (1e-1, 1e-2, 1e-3) and s.eps == s.radii


def test_truncated_halfline_negative():
    est = estimate_moduli(fixture("truncated-halfline", -0.5), FAST)
    assert float(est.hof) == pytest.approx(1.0, abs=0.05)
    assert est.chain_holds()


def test_truncated_halfline_positive():
    est = estimate_moduli(fixture("truncated-halfline", 0.5), FAST)
    assert float(est.hof) == pytest.approx(0.0, abs=0.05)


def test_step_at_zero():
    est = estimate_moduli(fixture("step", 0.0))
    assert float(est.uclm) == pytest.approx(0.0, abs=0.05)
    assert est.diverged["lipusc"]


def test_step_locally_constant():
    ybar = 0.5
    est = estimate_moduli(fixture("step", ybar), FAST)
    assert est.sup_clm == 0 and est.uclm == 0 and est.lipusc == 0
    # the Hoffman ratio is global: points of M(y) = {0} for y <= 0 sit at
    # distance 1 from M(ybar) = {1}, with |y - ybar| >= ybar
    # sampled from below; the supremum 1 / ybar is approached as y -> 0-
    assert 1.5 <= float(est.hof) <= 1 / ybar + 1e-12


def test_interval_fixture():
    est = estimate_moduli(fixture("interval", -1.0))
    assert float(est.lipusc) == pytest.approx(0.0, abs=0.05)
    assert est.diverged["hof"]


@pytest.mark.parametrize("R", [1e2, 1e3])
def test_staircase_sup_clm(R):
    est = estimate_moduli(fixture("staircase", R=R), FAST)
    assert float(est.sup_clm) == pytest.approx(1.0, abs=0.05)
    assert est.chain_holds()


def test_staircase_uclm_grows_with_truncation():
    vals = [estimate_moduli(fixture("staircase", R=R), FAST).levels["uclm"][0] for R in (1e2, 1e3, 1e4)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 5 * vals[0]


def test_levels_are_nested():
    est = estimate_moduli(fixture("interval", -1.0), FAST)
    for name in ("uclm", "lipusc"):
        lv = est.levels[name]
        assert all(a >= b for a, b in zip(lv, lv[1:]))
    assert est.counts[0] >= est.counts[-1]


def test_deterministic():
    a = estimate_moduli(fixture("staircase"), FAST)
    b = estimate_moduli(fixture("staircase"), FAST)
    assert a.levels == b.levels


def test_max_shift_kappa_limit():
    # the map is calm with constant 0 on a neighborhood, yet the eps-restricted
    # constant stays positive and tends to eps / (1 + eps)
    for eps in (0.5, 0.1, 0.01):
        assert max_shift_kappa(eps, 100_001) == pytest.approx(eps / (1 + eps), rel=1e-3)
    assert max_shift_kappa(0.5) > 0


@pytest.mark.parametrize("seed", range(6))
def test_polygon_routes_agree(seed):
    m = polygon_fixture(seed)
    est = estimate_moduli(m, FAST)
    vals = [float(est.sup_clm), float(est.uclm), float(est.lipusc), float(est.hof)]
    assert est.chain_holds()
    assert max(vals) <= 1.05 * min(vals)
    # eps-restricted ratio against the neighborhood form
    assert float(est.uclm_inverse) == pytest.approx(float(est.uclm), rel=0.05)


def _random_pwa(rng):
    """``y -> {p_j(y)}`` with 1-3 piecewise affine branches on [-2, 2]."""
    k = int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(-1.5, 1.5, (k, 2)), axis=1)
    slopes = rng.uniform(-3, 3, (k, 3))
    offsets = rng.uniform(-1, 1, k)

    def branch(j, y):
        lo, hi = cuts[j]
        s1, s2, s3 = slopes[j]
        if y < lo:
            return offsets[j] + s1 * (y - lo)
        if y < hi:
            return offsets[j] + s2 * (y - lo)
        return offsets[j] + s2 * (hi - lo) + s3 * (y - hi)

    def evaluator(y):
        return np.array([branch(j, y) for j in range(k)])

    return SampledMultifunction(evaluator, float(rng.uniform(-1, 1)), domain=(-2.0, 2.0))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000))
def test_chain_on_random_piecewise_affine(seed):
    rng = np.random.default_rng(seed)
    m = _random_pwa(rng)
    est = estimate_moduli(m, Schedule(radii=(1e-1, 1e-2), per_level=100, global_samples=200,
                                      global_radius=2.0, seed=seed))
    assert est.chain_holds(1e-6)
    for name in ("sup_clm", "uclm", "lipusc"):
        lv = est.levels[name]
        assert all(a >= b - 1e-12 for a, b in zip(lv, lv[1:]))
