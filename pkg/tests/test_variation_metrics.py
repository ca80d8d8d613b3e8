import numpy as np
import pytest

from gaussrough import (
    Dissection,
    SamplePath,
    TimeGrid,
    all_dissections,
    holder_dist,
    holder_norm,
    lift_pl,
    pvar_dist,
    pvar_norm,
    rect_increment,
    rho_var_2d,
    uniform_grid,
)
from conftest import random_path


def lift(values):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[1] - 1
    return lift_pl(SamplePath(uniform_grid(n), values))


def test_dissection_validation():
    Dissection((0, 2, 5))
    with pytest.raises(ValueError):
        Dissection((0,))
    with pytest.raises(ValueError):
        Dissection((1, 3))
    with pytest.raises(ValueError):
        Dissection((0, 3, 2))


def test_all_dissections_count():
    # Interior nodes are free, endpoints fixed: 2^(n-1) dissections.
    assert sum(1 for _ in all_dissections(4)) == 8
    seen = {d.indices for d in all_dissections(3)}
    assert (0, 3) in seen and (0, 1, 2, 3) in seen


def test_zigzag_total_variation():
    x = lift([0.0, 1.0, 0.0, 1.0])
    assert abs(pvar_norm(x, 1.0) - 3.0) <= 1e-12
    assert abs(pvar_norm(x, 1.0, mode="brute") - 3.0) <= 1e-12


def test_monotone_scalar_closed_form(rng):
    # For a scalar increasing path the node distance is the bare increment,
    # and (a+b)^p >= a^p + b^p makes the single-jump dissection optimal.
    vals = np.cumsum(np.abs(rng.normal(size=9)))
    vals = np.concatenate([[0.0], vals])
    x = lift(vals)
    total = vals[-1] - vals[0]
    for p in (1.0, 1.5, 2.0, 3.7):
        assert abs(pvar_norm(x, p) - total) <= 1e-10 * max(1.0, total)


def test_dp_equals_brute(rng):
    for _ in range(20):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(2, 11))
        x = lift_pl(random_path(rng, d, n))
        y = lift_pl(random_path(rng, d, n))
        p = float(rng.uniform(1.0, 4.0))
        a = pvar_dist(x, y, p, mode="dp")
        b = pvar_dist(x, y, p, mode="brute")
        assert abs(a - b) <= 1e-10 * max(1.0, b)


def test_pvar_nonincreasing_in_p(rng):
    x = lift_pl(random_path(rng, 2, 12))
    vals = [pvar_norm(x, p) for p in (1.0, 1.5, 2.0, 3.0, 4.0)]
    for lo, hi in zip(vals[1:], vals[:-1]):
        assert lo <= hi + 1e-12


def test_pvar_dist_symmetry_and_zero(rng):
    x = lift_pl(random_path(rng, 2, 10))
    y = lift_pl(random_path(rng, 2, 10))
    assert abs(pvar_dist(x, y, 2.2) - pvar_dist(y, x, 2.2)) <= 1e-12
    # The self-distance floor reflects cube-root rounding in the norm.
    assert pvar_dist(x, x, 2.2) <= 1e-5


def test_pvar_refinement_monotone(rng):
    # The refined node set contains the coarse one, so the sup cannot drop.
    path = random_path(rng, 2, 6)
    t = path.grid.times
    fine_t = np.sort(np.concatenate([t, 0.5 * (t[:-1] + t[1:])]))
    fine_vals = np.stack([np.interp(fine_t, t, path.values[c]) for c in range(2)])
    coarse = lift_pl(path)
    fine = lift_pl(SamplePath(TimeGrid(fine_t), fine_vals))
    for p in (1.0, 2.5):
        assert pvar_norm(fine, p) >= pvar_norm(coarse, p) - 1e-12


def test_pvar_validation(rng):
    x = lift_pl(random_path(rng, 1, 4))
    y = lift_pl(random_path(rng, 1, 5))
    with pytest.raises(ValueError):
        pvar_dist(x, y, 2.0)
    with pytest.raises(ValueError):
        pvar_norm(x, 0.5)
    with pytest.raises(ValueError):
        pvar_norm(x, 2.0, mode="annealing")
    big = lift_pl(random_path(rng, 1, 20))
    with pytest.raises(ValueError):
        pvar_norm(big, 2.0, mode="brute")


def test_holder_line():
    n = 8
    x = lift(uniform_grid(n).times)
    assert abs(holder_norm(x, 1.0) - 1.0) <= 1e-12


def test_holder_alpha_zero_is_max_dist(rng):
    x = lift_pl(random_path(rng, 2, 8))
    got = holder_norm(x, 0.0)
    # With no time weighting the bound is the largest pairwise distance.
    from gaussrough import dist

    pts = x.points
    expect = max(
        dist(pts[i], pts[j]) for i in range(9) for j in range(i + 1, 9)
    )
    assert abs(got - expect) <= 1e-12


def test_holder_constant_path():
    x = lift(np.zeros(6))
    assert holder_norm(x, 0.5) <= 1e-12


def test_holder_validation(rng):
    x = lift_pl(random_path(rng, 1, 4))
    with pytest.raises(ValueError):
        holder_norm(x, 1.2)
    with pytest.raises(ValueError):
        holder_norm(x, -0.1)


def test_rect_increment_values():
    r = np.arange(16, dtype=float).reshape(4, 4)
    got = rect_increment(r, 0, 2, 1, 3)
    assert got == r[2, 3] - r[2, 1] - r[0, 3] + r[0, 1]
    with pytest.raises(ValueError):
        rect_increment(r, 2, 1, 0, 3)
    with pytest.raises(ValueError):
        rect_increment(r, 0, 4, 0, 3)


def test_rect_increment_additivity(rng):
    r = rng.normal(size=(6, 6))
    whole = rect_increment(r, 0, 5, 1, 4)
    parts = (
        rect_increment(r, 0, 3, 1, 2)
        + rect_increment(r, 0, 3, 2, 4)
        + rect_increment(r, 3, 5, 1, 2)
        + rect_increment(r, 3, 5, 2, 4)
    )
    assert abs(whole - parts) <= 1e-12


def brownian_cov(n):
    t = uniform_grid(n).times
    return np.minimum.outer(t, t)


def test_brownian_one_variation_is_one():
    r = brownian_cov(8)
    for mode in ("fullgrid", "brute", "hillclimb"):
        assert abs(rho_var_2d(r, 1.0, mode=mode) - 1.0) <= 1e-12


def test_brownian_sub_block():
    r = brownian_cov(8)
    # Only the diagonal contributes, so a half window carries half the mass.
    v = rho_var_2d(r, 1.0, mode="fullgrid", lo=0, hi=4)
    assert abs(v - 0.5) <= 1e-12


def test_fullgrid_le_brute_le_hillclimb_consistency(rng):
    for _ in range(12):
        n = int(rng.integers(2, 8))
        a = rng.normal(size=(n + 1, n + 1))
        r = a @ a.T
        rho = float(rng.uniform(1.0, 2.5))
        full = rho_var_2d(r, rho, mode="fullgrid")
        brute = rho_var_2d(r, rho, mode="brute")
        climb = rho_var_2d(r, rho, mode="hillclimb")
        assert full <= brute + 1e-12
        assert climb <= brute + 1e-12
        assert climb >= full - 1e-12


def test_hillclimb_matches_brute_small(rng):
    for _ in range(10):
        n = int(rng.integers(2, 7))
        a = rng.normal(size=(n + 1, n + 1))
        r = a @ a.T
        brute = rho_var_2d(r, 1.4, mode="brute")
        climb = rho_var_2d(r, 1.4, mode="hillclimb")
        assert abs(climb - brute) <= 1e-10 * max(1.0, brute)


def test_rho_var_nonincreasing_in_rho(rng):
    a = rng.normal(size=(7, 7))
    r = a @ a.T
    vals = [rho_var_2d(r, rho, mode="brute") for rho in (1.0, 1.3, 1.8, 2.5)]
    for lo, hi in zip(vals[1:], vals[:-1]):
        assert lo <= hi + 1e-12


def test_rho_var_validation():
    r = brownian_cov(4)
    with pytest.raises(ValueError):
        rho_var_2d(r, 0.9)
    with pytest.raises(ValueError):
        rho_var_2d(r[:4, :5], 1.0)
    with pytest.raises(ValueError):
        rho_var_2d(r, 1.0, lo=3, hi=3)
    with pytest.raises(ValueError):
        rho_var_2d(r, 1.0, mode="gradient")
    big = brownian_cov(16)
    with pytest.raises(ValueError):
        rho_var_2d(big, 1.0, mode="brute")
