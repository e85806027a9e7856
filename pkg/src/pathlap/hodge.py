"""Laplacians on the two-sided subspaces, harmonic forms, Hodge decomposition.

All operators live in the orthonormal Omega^p frame.  The differential used
is the restricted one extended by zero off its closure domain D^p, which
squares to zero; its metric adjoint (a transpose, in orthonormal frames) is
the codifferential.  The eigendecomposition of the resulting Laplacian is the
single source of truth for harmonic projections, Green's operators and the
heat semigroup.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import (
    Cochain,
    Subspace,
    allowed_d_matrix,
    omega_subspace,
    orthonormal_image,
    restricted_d,
)
from .digraph import Digraph

__all__ = [
    "EIG_ZERO_RTOL",
    "HodgeParts",
    "LaplacianBundle",
    "SpectralData",
    "green_spectral",
    "harmonic_basis",
    "harmonic_representative",
    "hodge_decompose",
    "laplacian",
    "vertex_laplacian",
]

# Eigenvalues below EIG_ZERO_RTOL * max(1, largest eigenvalue) count as zero.
EIG_ZERO_RTOL = 1e-9

OMEGA_MEMBERSHIP_TOL = 1e-9
CLOSED_TOL = 1e-9


def vertex_laplacian(g: Digraph) -> np.ndarray:
    """Vertex-level Laplacian built from the adjoint of the edge differential.

    On a symmetric digraph this equals 2*(diag(m) - sym_adjacency) with m the
    undirected degree; with one-directional edges each edge contributes once,
    so the diagonal is in-degree + out-degree without doubling.
    """
    dmat = allowed_d_matrix(g, 0).astype(np.float64)
    return dmat.T @ dmat


@dataclass
class SpectralData:
    """Eigendecomposition of a symmetric PSD matrix in frame coordinates."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_tol: float

    @classmethod
    def from_matrix(cls, mat: np.ndarray, rtol: float = EIG_ZERO_RTOL) -> "SpectralData":
        if mat.size == 0:
            return cls(np.zeros(0), np.zeros((0, 0)), rtol)
        vals, vecs = np.linalg.eigh(mat)
        tol = rtol * max(1.0, float(vals[-1]) if vals.size else 0.0)
        return cls(vals, vecs, tol)

    @property
    def lambda1(self) -> float:
        """Smallest eigenvalue above the zero tolerance; inf when none."""
        positive = self.eigenvalues[self.eigenvalues > self.zero_tol]
        return float(positive[0]) if positive.size else math.inf

    @property
    def kernel_mask(self) -> np.ndarray:
        return self.eigenvalues <= self.zero_tol

    def kernel_projector(self) -> np.ndarray:
        q0 = self.eigenvectors[:, self.kernel_mask]
        return q0 @ q0.T

    def pseudo_inverse(self) -> np.ndarray:
        inv = np.where(self.kernel_mask, 0.0, 1.0 / np.where(self.kernel_mask, 1.0, self.eigenvalues))
        return self.eigenvectors @ (inv[:, None] * self.eigenvectors.T)


@dataclass
class LaplacianBundle:
    """Laplacian and its two halves on Omega^p, in frame coordinates."""

    p: int
    omega: Subspace
    delta_plus: np.ndarray    # adjoint-of-d composed after d
    delta_minus: np.ndarray   # d composed after its adjoint from below
    delta: np.ndarray
    up_matrix: np.ndarray     # zero-extended differential Omega^p -> Omega^{p+1}
    down_matrix: np.ndarray   # zero-extended differential Omega^{p-1} -> Omega^p
    spectral: SpectralData = field(init=False)

    def __post_init__(self):
        self.spectral = SpectralData.from_matrix(self.delta)

    def embed(self, frame_vec: np.ndarray) -> Cochain:
        """Frame coordinates -> cochain on the allowed basis."""
        return Cochain(self.omega.ambient, self.omega.frame @ frame_vec)

    def to_frame(self, f: Cochain, tol: float = OMEGA_MEMBERSHIP_TOL) -> np.ndarray:
        """Allowed-basis cochain -> frame coordinates; rejects vectors off Omega^p."""
        vec = f.coeffs
        c = self.omega.frame.T @ vec
        resid = np.linalg.norm(vec - self.omega.frame @ c)
        if resid > tol * max(1.0, np.linalg.norm(vec)):
            raise ValueError(
                f"cochain is not in the two-sided subspace at dimension {self.p} "
                f"(membership residual {resid:.3e})"
            )
        return c


@functools.lru_cache(maxsize=None)
def laplacian(g: Digraph, p: int) -> LaplacianBundle:
    omega = omega_subspace(g, p)
    up = restricted_d(g, p).extended_matrix()
    if p >= 1:
        down = restricted_d(g, p - 1).extended_matrix()
    else:
        down = np.zeros((omega.dim, 0))
    delta_plus = up.T @ up
    delta_minus = down @ down.T
    return LaplacianBundle(
        p=p,
        omega=omega,
        delta_plus=delta_plus,
        delta_minus=delta_minus,
        delta=delta_plus + delta_minus,
        up_matrix=up,
        down_matrix=down,
    )


def harmonic_basis(g: Digraph, p: int) -> Subspace:
    """Orthonormal basis of the kernel of the Laplacian, in allowed coordinates."""
    bundle = laplacian(g, p)
    q0 = bundle.spectral.eigenvectors[:, bundle.spectral.kernel_mask]
    return Subspace(bundle.omega.ambient, bundle.omega.frame @ q0)


@dataclass
class HodgeParts:
    """Orthogonal three-way split of a form on Omega^p."""

    input: Cochain
    harmonic: Cochain
    d_exact: Cochain
    delta_exact: Cochain

    def reconstruction_residual(self) -> float:
        total = self.harmonic.coeffs + self.d_exact.coeffs + self.delta_exact.coeffs
        return float(np.linalg.norm(self.input.coeffs - total))

    def max_pairwise_inner(self) -> float:
        parts = [self.harmonic.coeffs, self.d_exact.coeffs, self.delta_exact.coeffs]
        worst = 0.0
        for i in range(3):
            for j in range(i + 1, 3):
                worst = max(worst, abs(float(parts[i] @ parts[j])))
        return worst


def hodge_decompose(g: Digraph, p: int, f: Cochain) -> HodgeParts:
    """Split f into harmonic + image-of-d + image-of-adjoint parts."""
    bundle = laplacian(g, p)
    c = bundle.to_frame(f)
    harmonic = bundle.spectral.kernel_projector() @ c
    d_image = orthonormal_image(bundle.down_matrix)
    d_exact = d_image @ (d_image.T @ c)
    codiff_image = orthonormal_image(bundle.up_matrix.T)
    delta_exact = codiff_image @ (codiff_image.T @ c)
    return HodgeParts(
        input=f,
        harmonic=bundle.embed(harmonic),
        d_exact=bundle.embed(d_exact),
        delta_exact=bundle.embed(delta_exact),
    )


def harmonic_representative(g: Digraph, p: int, f: Cochain, tol: float = CLOSED_TOL) -> Cochain:
    """Harmonic form cohomologous to a closed f (differs from f by an exact form).

    Closedness is measured with the complex's own differential (the restricted
    one, extended by zero off its closure domain): exactly the forms for which
    f minus its harmonic part is guaranteed to be exact.
    """
    bundle = laplacian(g, p)
    c = bundle.to_frame(f)
    df = bundle.up_matrix @ c
    if df.size and np.linalg.norm(df) > tol * max(1.0, f.norm()):
        raise ValueError(f"form is not closed (|df| = {np.linalg.norm(df):.3e})")
    return bundle.embed(bundle.spectral.kernel_projector() @ c)


def green_spectral(g: Digraph, p: int, f: Cochain) -> Cochain:
    """Green's operator: spectral pseudo-inverse of the Laplacian applied to f."""
    bundle = laplacian(g, p)
    c = bundle.to_frame(f)
    return bundle.embed(bundle.spectral.pseudo_inverse() @ c)
