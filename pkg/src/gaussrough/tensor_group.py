"""Truncated tensor algebra over R^d and the step-N free nilpotent group, N <= 3.

Elements live in T = R + R^d + (R^d)^2 + (R^d)^3, truncated at the chosen
depth.  Group elements have scalar part 1, Lie elements scalar part 0; exp and
log are the (finite) truncated power series and are exact inverses of each
other on these sets.  The homogeneous norm used throughout is the symmetrized
max norm

    ||g|| = max_k max(|pi_k(g)|, |pi_k(g^{-1})|)^(1/k),

which is equivalent to the Carnot-Caratheodory norm and exactly computable.
The induced left-invariant distance is dist(g, h) = ||g^{-1} h||.

The module-private ``*_levels`` helpers operate on lists of arrays with
arbitrary leading batch axes (level k has shape ``batch + (d,)*k``); the
public API wraps single elements in frozen dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TensorElement",
    "GroupElement",
    "LieElement",
    "mul",
    "exp",
    "log",
    "inverse",
    "increment",
    "dilate",
    "hom_norm",
    "dist",
    "bracket_iij_tensor",
    "shuffle_defect",
    "is_group_like",
    "unit",
    "zero",
    "identity",
    "lie_from_vector",
    "max_abs_diff",
]

MAX_DEPTH = 3

# einsum subscripts for the graded product, keyed by (level of a, level of b).
# '...' carries any shared batch axes.
_PROD_SUBS = {
    (0, 0): "...,...->...",
    (0, 1): "...,...i->...i",
    (1, 0): "...i,...->...i",
    (0, 2): "...,...ij->...ij",
    (2, 0): "...ij,...->...ij",
    (1, 1): "...i,...j->...ij",
    (0, 3): "...,...ijk->...ijk",
    (3, 0): "...ijk,...->...ijk",
    (1, 2): "...i,...jk->...ijk",
    (2, 1): "...ij,...k->...ijk",
}


def _check_depth(depth: int) -> None:
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in 1..{MAX_DEPTH}, got {depth}")


def _unit_levels(dim: int, depth: int, batch: tuple = ()) -> list[np.ndarray]:
    levels = [np.ones(batch)]
    for k in range(1, depth + 1):
        levels.append(np.zeros(batch + (dim,) * k))
    return levels


def _mul_levels(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> list[np.ndarray]:
    depth = len(a) - 1
    out = []
    for k in range(depth + 1):
        acc = np.einsum(_PROD_SUBS[(0, k)], a[0], b[k])
        for p in range(1, k + 1):
            acc = acc + np.einsum(_PROD_SUBS[(p, k - p)], a[p], b[k - p])
        out.append(acc)
    return out


def _scaled_sum(*terms: tuple[float, Sequence[np.ndarray]]) -> list[np.ndarray]:
    depth = len(terms[0][1]) - 1
    out = []
    for k in range(depth + 1):
        acc = terms[0][0] * terms[0][1][k]
        for c, lv in terms[1:]:
            acc = acc + c * lv[k]
        out.append(acc)
    return out


def _exp_levels(l: Sequence[np.ndarray]) -> list[np.ndarray]:
    # Truncated exponential of a scalar-free element; the series terminates
    # because products of scalar-free elements vanish past the depth.
    depth = len(l) - 1
    dim = l[1].shape[-1] if depth >= 1 else 1
    batch = l[0].shape
    acc = _scaled_sum((1.0, _unit_levels(dim, depth, batch)), (1.0, l))
    if depth >= 2:
        l2 = _mul_levels(l, l)
        acc = _scaled_sum((1.0, acc), (0.5, l2))
        if depth >= 3:
            l3 = _mul_levels(l2, l)
            acc = _scaled_sum((1.0, acc), (1.0 / 6.0, l3))
    return acc


def _strip_scalar(g: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [np.zeros_like(np.asarray(g[0]))] + [np.asarray(lv) for lv in g[1:]]


def _log_levels(g: Sequence[np.ndarray]) -> list[np.ndarray]:
    # log(1 + u) = u - u^2/2 + u^3/3 with u scalar-free; exact at this depth.
    depth = len(g) - 1
    u = _strip_scalar(g)
    acc = u
    if depth >= 2:
        u2 = _mul_levels(u, u)
        acc = _scaled_sum((1.0, acc), (-0.5, u2))
        if depth >= 3:
            u3 = _mul_levels(u2, u)
            acc = _scaled_sum((1.0, acc), (1.0 / 3.0, u3))
    return acc


def _inv_levels(g: Sequence[np.ndarray]) -> list[np.ndarray]:
    # (1 + u)^{-1} = 1 - u + u^2 - u^3; identical to exp(-log g) at this depth.
    depth = len(g) - 1
    u = _strip_scalar(g)
    dim = u[1].shape[-1] if depth >= 1 else 1
    acc = _scaled_sum((1.0, _unit_levels(dim, depth, np.asarray(g[0]).shape)), (-1.0, u))
    if depth >= 2:
        u2 = _mul_levels(u, u)
        acc = _scaled_sum((1.0, acc), (1.0, u2))
        if depth >= 3:
            u3 = _mul_levels(u2, u)
            acc = _scaled_sum((1.0, acc), (-1.0, u3))
    return acc


def _level_abs(levels: Sequence[np.ndarray]) -> list[np.ndarray]:
    # Euclidean norm of each graded piece, batch axes preserved.
    out = []
    for k, lv in enumerate(levels):
        if k == 0:
            out.append(np.abs(np.asarray(lv)))
        else:
            axes = tuple(range(lv.ndim - k, lv.ndim))
            out.append(np.sqrt(np.sum(lv * lv, axis=axes)))
    return out


def _hom_norm_levels(g: Sequence[np.ndarray]) -> np.ndarray:
    depth = len(g) - 1
    fwd = _level_abs(g)
    bwd = _level_abs(_inv_levels(g))
    best = np.zeros_like(fwd[0])
    for k in range(1, depth + 1):
        best = np.maximum(best, np.maximum(fwd[k], bwd[k]) ** (1.0 / k))
    return best


def _dilate_levels(lam: float, g: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [(lam**k) * np.asarray(lv) for k, lv in enumerate(g)]


@dataclass(frozen=True, eq=False)
class TensorElement:
    """Element of the depth-truncated tensor algebra.

    ``levels[k]`` is the degree-k component with shape ``(dim,)*k``; the
    scalar part is a 0-d array.
    """

    dim: int
    depth: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        _check_depth(self.depth)
        if len(self.levels) != self.depth + 1:
            raise ValueError("levels must have one entry per degree 0..depth")
        norm = []
        for k, lv in enumerate(self.levels):
            arr = np.asarray(lv, dtype=float)
            if arr.shape != (self.dim,) * k:
                raise ValueError(f"level {k} must have shape {(self.dim,) * k}")
            norm.append(arr)
        object.__setattr__(self, "levels", tuple(norm))

    @property
    def scalar(self) -> float:
        return float(self.levels[0])

    @property
    def level1(self) -> np.ndarray:
        return self.levels[1]

    @property
    def level2(self) -> np.ndarray | None:
        return self.levels[2] if self.depth >= 2 else None

    @property
    def level3(self) -> np.ndarray | None:
        return self.levels[3] if self.depth >= 3 else None

    def _like(self, levels: Sequence[np.ndarray]) -> "TensorElement":
        return type(self)(self.dim, self.depth, tuple(levels))


class GroupElement(TensorElement):
    """Group-like element: scalar part 1; shuffle identities hold for lifts."""

    def __post_init__(self):
        super().__post_init__()
        if abs(float(self.levels[0]) - 1.0) > 1e-12:
            raise ValueError("group element must have scalar part 1")


class LieElement(TensorElement):
    """Lie element: scalar part 0 and antisymmetric degree-2 part."""

    def __post_init__(self):
        super().__post_init__()
        if abs(float(self.levels[0])) > 1e-12:
            raise ValueError("Lie element must have scalar part 0")
        if self.depth >= 2:
            m = self.levels[2]
            if np.max(np.abs(m + m.T), initial=0.0) > 1e-9:
                raise ValueError("Lie element must have antisymmetric level 2")


def _check_compatible(a: TensorElement, b: TensorElement) -> None:
    if a.dim != b.dim or a.depth != b.depth:
        raise ValueError(
            f"incompatible elements: dim/depth ({a.dim},{a.depth}) vs ({b.dim},{b.depth})"
        )


def unit(dim: int, depth: int) -> TensorElement:
    """Multiplicative unit 1 of the tensor algebra."""
    return TensorElement(dim, depth, tuple(_unit_levels(dim, depth)))


def zero(dim: int, depth: int) -> TensorElement:
    lv = _unit_levels(dim, depth)
    lv[0] = np.zeros(())
    return TensorElement(dim, depth, tuple(lv))


def identity(dim: int, depth: int) -> GroupElement:
    """Group identity e (same underlying tensor as ``unit``)."""
    return GroupElement(dim, depth, tuple(_unit_levels(dim, depth)))


def lie_from_vector(vec: np.ndarray, depth: int = MAX_DEPTH) -> LieElement:
    """Degree-1 Lie element with the given coordinates."""
    vec = np.asarray(vec, dtype=float)
    lv = _unit_levels(vec.shape[0], depth)
    lv[0] = np.zeros(())
    lv[1] = vec
    return LieElement(vec.shape[0], depth, tuple(lv))


def mul(a: TensorElement, b: TensorElement) -> TensorElement:
    """Truncated tensor product a (x) b.

    The product of two group elements is again a group element and the result
    is typed accordingly.
    """
    _check_compatible(a, b)
    out = _mul_levels(a.levels, b.levels)
    cls = GroupElement if isinstance(a, GroupElement) and isinstance(b, GroupElement) else TensorElement
    return cls(a.dim, a.depth, tuple(out))


def exp(l: TensorElement) -> GroupElement:
    """Truncated exponential; requires scalar part 0."""
    if abs(l.scalar) > 1e-12:
        raise ValueError("exp requires scalar part 0")
    return GroupElement(l.dim, l.depth, tuple(_exp_levels(l.levels)))


def log(g: TensorElement) -> LieElement:
    """Truncated logarithm; requires scalar part 1."""
    if abs(g.scalar - 1.0) > 1e-12:
        raise ValueError("log requires scalar part 1")
    return LieElement(g.dim, g.depth, tuple(_log_levels(g.levels)))


def inverse(g: GroupElement) -> GroupElement:
    """Group inverse via the truncated Neumann series (equals exp(-log g))."""
    if abs(g.scalar - 1.0) > 1e-12:
        raise ValueError("inverse requires scalar part 1")
    return GroupElement(g.dim, g.depth, tuple(_inv_levels(g.levels)))


def increment(g: GroupElement, h: GroupElement) -> GroupElement:
    """Left increment g^{-1} (x) h."""
    _check_compatible(g, h)
    return GroupElement(g.dim, g.depth, tuple(_mul_levels(_inv_levels(g.levels), h.levels)))


def dilate(lam: float, g: GroupElement) -> GroupElement:
    """Dilation: scales the degree-k part by lam^k.  dilate(0, g) is e."""
    return GroupElement(g.dim, g.depth, tuple(_dilate_levels(float(lam), g.levels)))


def hom_norm(g: GroupElement) -> float:
    """Symmetrized homogeneous max norm of g."""
    return float(_hom_norm_levels(g.levels))


def dist(g: GroupElement, h: GroupElement) -> float:
    """Left-invariant homogeneous distance ||g^{-1} h||."""
    _check_compatible(g, h)
    return float(_hom_norm_levels(_mul_levels(_inv_levels(g.levels), h.levels)))


def bracket_iij_tensor(i: int, j: int, dim: int) -> LieElement:
    """Iterated bracket [e_i, [e_i, e_j]] as a depth-3 Lie element.

    Its degree-3 part has +1 at (i,i,j), -2 at (i,j,i), +1 at (j,i,i); all
    other entries and all lower degrees vanish.  Requires i != j.
    """
    if i == j:
        raise ValueError("bracket [e_i,[e_i,e_j]] requires i != j")
    if not (0 <= i < dim and 0 <= j < dim):
        raise ValueError("component index out of range")
    lv = _unit_levels(dim, 3)
    lv[0] = np.zeros(())
    cube = np.zeros((dim, dim, dim))
    cube[i, i, j] = 1.0
    cube[i, j, i] = -2.0
    cube[j, i, i] = 1.0
    lv[3] = cube
    return LieElement(dim, 3, tuple(lv))


def shuffle_defect(g: TensorElement) -> float:
    """Largest violation of the degree-2 and degree-3 shuffle identities.

    For group-like g these are pi_2[i,j] + pi_2[j,i] = pi_1[i] pi_1[j] and
    pi_1[i] pi_2[j,k] = pi_3[i,j,k] + pi_3[j,i,k] + pi_3[j,k,i]; together they
    cut out exactly the group-like set at this depth.
    """
    worst = 0.0
    v = g.levels[1]
    if g.depth >= 2:
        m = g.levels[2]
        worst = float(np.max(np.abs(m + m.T - np.outer(v, v)), initial=0.0))
    if g.depth >= 3:
        m = g.levels[2]
        c = g.levels[3]
        lhs = np.einsum("i,jk->ijk", v, m)
        rhs = c + c.transpose(1, 0, 2) + c.transpose(2, 0, 1)
        worst = max(worst, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    return worst


def is_group_like(g: TensorElement, tol: float = 1e-9) -> bool:
    return abs(g.scalar - 1.0) <= tol and shuffle_defect(g) <= tol


def max_abs_diff(a: TensorElement, b: TensorElement) -> float:
    """Largest entrywise difference across all levels."""
    _check_compatible(a, b)
    return max(float(np.max(np.abs(x - y), initial=0.0)) for x, y in zip(a.levels, b.levels))
