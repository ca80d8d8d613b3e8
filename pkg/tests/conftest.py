"""Shared helpers: random algebra elements, paths, and comparison asserts."""

import numpy as np
import pytest

from gaussrough import (
    GroupPath,
    LieElement,
    SamplePath,
    TimeGrid,
    exp,
    lift_pl,
    max_abs_diff,
)


def bracket_triple(i: int, j: int, k: int, d: int) -> np.ndarray:
    """Degree-3 tensor of [e_i, [e_j, e_k]]."""
    cube = np.zeros((d, d, d))
    cube[i, j, k] += 1.0
    cube[i, k, j] -= 1.0
    cube[j, k, i] -= 1.0
    cube[k, j, i] += 1.0
    return cube


def random_lie(rng: np.random.Generator, d: int, depth: int = 3, scale: float = 1.0) -> LieElement:
    """Random Lie element: free degree 1, antisymmetric degree 2, degree 3
    spanned by triple brackets."""
    levels = [np.zeros(()), scale * rng.standard_normal(d)]
    if depth >= 2:
        m = rng.standard_normal((d, d))
        levels.append(scale**2 * 0.5 * (m - m.T))
    if depth >= 3:
        cube = np.zeros((d, d, d))
        coeff = rng.standard_normal((d, d, d))
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    cube += coeff[i, j, k] * bracket_triple(i, j, k, d)
        levels.append(scale**3 * cube / max(1, d))
    return LieElement(d, depth, tuple(levels))


def random_group(rng: np.random.Generator, d: int, depth: int = 3, scale: float = 1.0):
    return exp(random_lie(rng, d, depth, scale))


def random_grid(rng: np.random.Generator, n: int) -> TimeGrid:
    interior = np.sort(rng.uniform(0.05, 0.95, size=n - 1))
    return TimeGrid(np.concatenate(([0.0], interior, [1.0])))


def random_path(rng: np.random.Generator, d: int, n: int, uniform: bool = True) -> SamplePath:
    grid = TimeGrid(np.linspace(0.0, 1.0, n + 1)) if uniform else random_grid(rng, n)
    steps = rng.standard_normal((d, n)) / np.sqrt(n)
    values = np.concatenate([np.zeros((d, 1)), np.cumsum(steps, axis=1)], axis=1)
    return SamplePath(grid, values)


def random_group_path(rng: np.random.Generator, d: int, n: int, depth: int = 3) -> GroupPath:
    return lift_pl(random_path(rng, d, n), depth)


def assert_elements_close(a, b, tol: float, label: str = ""):
    err = max_abs_diff(a, b)
    assert err <= tol, f"{label} differs by {err:.3e} (tol {tol:.1e})"


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
