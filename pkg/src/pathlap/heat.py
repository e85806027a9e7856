"""Heat semigroup exp(-t * Laplacian) on p-forms and derived quantities.

The operator is always assembled from the Laplacian's eigendecomposition, so
the semigroup law, self-adjointness and the spectral decay bound hold to
rounding error.  Kernel entries in path coordinates are only meaningful when
the two-sided subspace fills the whole allowed space; otherwise the matrix is
frame-dependent and reported as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import Cochain, allowed_path_basis
from .digraph import Digraph, graph_distance
from .hodge import LaplacianBundle, laplacian

__all__ = [
    "HeatOperator",
    "HeatTrajectory",
    "QuadratureGreen",
    "StochasticCompleteness",
    "evolve",
    "fit_decay_rate",
    "green_quadrature",
    "harmonic_limit",
    "heat_kernel_row_sum_deviation",
    "heat_operator",
    "spectral_gap",
    "stochastic_completeness",
]


@dataclass
class HeatOperator:
    """exp(-t*Delta) at one time, in Omega^p frame coordinates."""

    t: float
    p: int
    matrix: np.ndarray
    bundle: LaplacianBundle

    @property
    def frame_is_full(self) -> bool:
        return self.bundle.omega.dim == len(self.bundle.omega.ambient)

    def path_matrix(self) -> np.ndarray:
        """Kernel entries over allowed-path coordinates (W exp(-tL) W^T)."""
        w = self.bundle.omega.frame
        return w @ self.matrix @ w.T

    def apply(self, f: Cochain) -> Cochain:
        c = self.bundle.to_frame(f)
        return self.bundle.embed(self.matrix @ c)


def heat_operator(g: Digraph, p: int, t: float) -> HeatOperator:
    if t < 0:
        raise ValueError("heat operator requires t >= 0")
    bundle = laplacian(g, p)
    spec = bundle.spectral
    lam = np.clip(spec.eigenvalues, 0.0, None)
    mat = spec.eigenvectors @ (np.exp(-t * lam)[:, None] * spec.eigenvectors.T)
    return HeatOperator(t=float(t), p=p, matrix=mat, bundle=bundle)


@dataclass
class HeatTrajectory:
    times: list[float]
    states: list[Cochain]
    norms: list[float]


def evolve(g: Digraph, p: int, u0: Cochain, times) -> HeatTrajectory:
    """Solve the heat flow u' = -Delta u from u0 (must lie in Omega^p)."""
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be ascending and non-negative")
    bundle = laplacian(g, p)
    c0 = bundle.to_frame(u0)
    spec = bundle.spectral
    lam = np.clip(spec.eigenvalues, 0.0, None)
    coeffs = spec.eigenvectors.T @ c0
    states, norms = [], []
    for t in times:
        ct = spec.eigenvectors @ (np.exp(-t * lam) * coeffs)
        state = bundle.embed(ct)
        states.append(state)
        norms.append(state.norm())
    return HeatTrajectory(times=times, states=states, norms=norms)


def harmonic_limit(g: Digraph, p: int, u0: Cochain) -> Cochain:
    """Long-time limit of the heat flow: projection onto the harmonic space."""
    bundle = laplacian(g, p)
    c0 = bundle.to_frame(u0)
    return bundle.embed(bundle.spectral.kernel_projector() @ c0)


def spectral_gap(g: Digraph, p: int) -> float:
    """Smallest nonzero Laplacian eigenvalue; inf sentinel when Delta = 0."""
    return laplacian(g, p).spectral.lambda1


def fit_decay_rate(g: Digraph, p: int, u0: Cochain, times) -> float:
    """Empirical decay rate of |T_t u0 - harmonic part| by log-linear fit.

    Returns the fitted lambda in exp(-lambda * t); nan when the distance to
    the harmonic part is already negligible.
    """
    bundle = laplacian(g, p)
    c0 = bundle.to_frame(u0)
    resid0 = c0 - bundle.spectral.kernel_projector() @ c0
    if np.linalg.norm(resid0) < 1e-13:
        return math.nan
    times = np.asarray(list(times), dtype=np.float64)
    spec = bundle.spectral
    lam = np.clip(spec.eigenvalues, 0.0, None)
    coeffs = spec.eigenvectors.T @ resid0
    dists = []
    for t in times:
        dists.append(np.linalg.norm(np.exp(-t * lam) * coeffs))
    dists = np.asarray(dists)
    slope = np.polyfit(times, np.log(dists), 1)[0]
    return float(-slope)


@dataclass
class StochasticCompleteness:
    """Row-sum and mass-conservation diagnostics of the degree-0 heat kernel."""

    t: float
    applicable: bool
    reason: str
    row_sum_deviation: float
    mass_deviation: float


def stochastic_completeness(g: Digraph, t: float, u0: Cochain | None = None) -> StochasticCompleteness:
    """Max |row sum - 1| of the vertex-coordinate heat kernel at time t.

    Requires a digraph connected under symmetrized adjacency and the constant
    vector inside Omega^0; otherwise reports not-applicable.  Also checks that
    the total mass of u0 (default: the constant vector) is conserved.
    """
    if t < 0:
        raise ValueError("requires t >= 0")
    n = g.n_vertices
    if n == 0:
        return StochasticCompleteness(t, False, "empty digraph", math.nan, math.nan)
    if not graph_distance(g).is_connected:
        return StochasticCompleteness(t, False, "digraph disconnected", math.nan, math.nan)
    bundle = laplacian(g, 0)
    ones = np.ones(n)
    if not bundle.omega.contains(ones):
        return StochasticCompleteness(t, False, "constants not in the degree-0 subspace", math.nan, math.nan)
    op = heat_operator(g, 0, t)
    kernel = op.path_matrix()
    row_dev = float(np.max(np.abs(kernel @ ones - 1.0)))
    if u0 is None:
        u0 = Cochain(allowed_path_basis(g, 0), ones)
    ut = kernel @ u0.coeffs
    mass_dev = float(abs(ut.sum() - u0.coeffs.sum()))
    return StochasticCompleteness(t, True, "", row_dev, mass_dev)


def heat_kernel_row_sum_deviation(g: Digraph, p: int, t: float) -> float:
    """Diagnostic only: max |row sum - 1| of the path-coordinate kernel.

    Nothing forces this to vanish for p >= 1 (the constant path-vector need
    not lie in Omega^p); the value is reported, never asserted.
    """
    op = heat_operator(g, p, t)
    kernel = op.path_matrix()
    if kernel.shape[0] == 0:
        return math.nan
    return float(np.max(np.abs(kernel.sum(axis=1) - 1.0)))


@dataclass
class QuadratureGreen:
    value: Cochain
    t_max: float
    n_steps: int
    tail_bound: float


def green_quadrature(g: Digraph, p: int, f: Cochain,
                     t_max: float | None = None, n_steps: int = 4096) -> QuadratureGreen:
    """Green's operator by composite-trapezoid integration of T_t f - Hf.

    The analytic tail bound exp(-lambda1*t_max)/lambda1 * |f - Hf| is
    reported alongside the value.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    bundle = laplacian(g, p)
    basis = bundle.omega.ambient
    if bundle.omega.dim == 0:
        return QuadratureGreen(Cochain(basis, np.zeros(len(basis))), 0.0, n_steps, 0.0)
    c = bundle.to_frame(f)
    spec = bundle.spectral
    lam = np.clip(spec.eigenvalues, 0.0, None)
    coeffs = spec.eigenvectors.T @ c
    nonzero = ~spec.kernel_mask
    resid = np.where(nonzero, coeffs, 0.0)
    resid_norm = float(np.linalg.norm(resid))
    lambda1 = spec.lambda1
    if not math.isfinite(lambda1) or resid_norm == 0.0:
        return QuadratureGreen(Cochain(basis, np.zeros(len(basis))), 0.0, n_steps, 0.0)
    if t_max is None:
        t_max = max(10.0, 20.0 / lambda1)
    grid = np.linspace(0.0, t_max, n_steps + 1)
    # integrand in the eigenbasis: exp(-lambda t) on the non-kernel part
    weights = np.full(n_steps + 1, grid[1] - grid[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    integrated = np.zeros_like(resid)
    for w, t in zip(weights, grid):
        integrated += w * np.exp(-t * lam) * resid
    integrated = np.where(nonzero, integrated, 0.0)
    tail = math.exp(-lambda1 * t_max) / lambda1 * resid_norm
    return QuadratureGreen(bundle.embed(spec.eigenvectors @ integrated), float(t_max), n_steps, tail)
