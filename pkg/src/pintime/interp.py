"""Chebyshev nodes, barycentric Lagrange interpolation, spectral differentiation."""
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateNodes

NODE_FAMILIES = ("gauss", "lobatto")


@dataclass(frozen=True)
class InitialValueSpace:
    """Interval ``[a, b]`` of slice-entry states sampled at ``M`` nodes."""

    a: float = 0.0
    b: float = 2.0
    M: int = 6
    family: str = "gauss"

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("need a < b")
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if self.family not in NODE_FAMILIES:
            raise ValueError(f"unknown node family {self.family!r}")

    @property
    def spacing(self):
        return (self.b - self.a) / self.M

    def nodes(self):
        return chebyshev_points(self.M, self.a, self.b, self.family)

    def contains(self, xi):
        return self.a <= xi <= self.b


def cheb_nodes(M, a, b):
    """First-kind Chebyshev points (roots of T_M) on ``[a, b]``, ascending."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if not a < b:
        raise ValueError("need a < b")
    k = np.arange(1, M + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * M))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * x)


def cheb_lobatto_nodes(M, a, b):
    """Second-kind Chebyshev points (extrema of T_{M-1}, endpoints included), ascending.

    ``M = 1`` gives the midpoint.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    if not a < b:
        raise ValueError("need a < b")
    if M == 1:
        return np.array([0.5 * (a + b)])
    x = -np.cos(np.pi * np.arange(M) / (M - 1))
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    # exact symmetry about the midpoint
    mid = 0.5 * (a + b)
    for k in range(M // 2):
        half = 0.5 * ((nodes[M - 1 - k] - mid) - (nodes[k] - mid))
        nodes[k], nodes[M - 1 - k] = mid - half, mid + half
    if M % 2 == 1:
        nodes[M // 2] = mid
    nodes[0], nodes[-1] = a, b
    return nodes


def chebyshev_points(M, a, b, family="lobatto"):
    if family == "gauss":
        return cheb_nodes(M, a, b)
    if family == "lobatto":
        return cheb_lobatto_nodes(M, a, b)
    raise ValueError(f"unknown node family {family!r}")


def barycentric_weights(nodes):
    """Weights ``w_k = 1 / prod_{j != k} (x_k - x_j)``, scaled to max |w| = 1."""
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("nodes must be a non-empty 1-D array")
    if np.unique(x).size != x.size:
        raise DuplicateNodes("interpolation nodes must be distinct")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # scale each factor by the interval length so the product cannot overflow
    scale = (x.max() - x.min()) / 4.0 if x.size > 1 else 1.0
    w = 1.0 / np.prod(diff / scale, axis=1)
    return w / np.max(np.abs(w))


@dataclass(frozen=True)
class InterpolantData:
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    @classmethod
    def from_samples(cls, nodes, values):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.shape != values.shape:
            raise ValueError("nodes and values differ in shape")
        if nodes.size > 1 and np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        return cls(nodes, barycentric_weights(nodes), values)

    @property
    def a(self):
        return float(self.nodes[0])

    @property
    def b(self):
        return float(self.nodes[-1])

    def __call__(self, xi):
        return interp_eval(self, xi)


def interp_eval(data, xi):
    """Evaluate the interpolant at ``xi`` with the second barycentric formula.

    Returns the stored value exactly when ``xi`` coincides with a node.
    """
    x, w, f = data.nodes, data.weights, data.values
    if x.size == 1:
        return float(f[0])
    diff = xi - x
    hit = np.abs(diff) <= 1e-14 * np.maximum(1.0, np.abs(x))
    if np.any(hit):
        return float(f[np.argmax(hit)])
    t = w / diff
    return float(np.dot(t, f) / np.sum(t))


def cheb_diff_matrix(M, a=-1.0, b=1.0):
    """Chebyshev differentiation matrix on ``M + 1`` extrema points in ``[a, b]``.

    Returns ``(D, x)`` with ``x`` ascending.  Diagonal entries use the
    negative-sum trick, so ``D`` annihilates constants to rounding.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    if not a < b:
        raise ValueError("need a < b")
    k = np.arange(M + 1)
    t = -np.cos(np.pi * k / M)  # ascending on [-1, 1]
    c = np.ones(M + 1)
    c[0] = c[-1] = 2.0
    c = c * (-1.0) ** k
    dt = t[:, None] - t[None, :]
    D = np.outer(c, 1.0 / c) / (dt + np.eye(M + 1))
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    x[0], x[-1] = a, b
    return D * (2.0 / (b - a)), x
