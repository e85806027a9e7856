"""Exact rational rank/kernel oracle.

Recomputes the subspace dimensions, cohomology dimensions, harmonic
dimensions, and chain Betti numbers over the rationals, sharing only the
integer constraint/operator builders with the floating-point path.  Any
disagreement between the two routes is a hard failure for the `verify`
command.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import (
    allowed_d_matrix,
    allowed_path_basis,
    closure_constraint_matrix,
    omega_constraint_matrix,
)
from .digraph import Digraph

__all__ = [
    "ORACLE_MAX_P",
    "ORACLE_MAX_VERTICES",
    "ExactComplexDims",
    "OracleCapExceeded",
    "exact_chain_betti",
    "exact_complex_dims",
    "frac_kernel",
    "frac_rank",
    "frac_rref",
]

ORACLE_MAX_VERTICES = 6
ORACLE_MAX_P = 3

Matrix = list[list[Fraction]]


class OracleCapExceeded(RuntimeError):
    """The instance exceeds the exact-arithmetic size cap."""


def _to_frac(rows) -> Matrix:
    return [[Fraction(int(v)) for v in row] for row in np.asarray(rows)]


def frac_rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (rref, pivot column list)."""
    m = [row[:] for row in mat]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def frac_rank(mat: Matrix) -> int:
    if not mat or not mat[0]:
        return 0
    return len(frac_rref(mat)[1])


def frac_kernel(mat: Matrix, n_cols: int) -> list[list[Fraction]]:
    """Basis of the kernel of mat (n_cols columns), deterministic order."""
    if not mat:
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    rref, pivots = frac_rref(mat)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        basis.append(vec)
    return basis


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return []
    n_inner = len(b)
    return [
        [sum((row[k] * b[k][j] for k in range(n_inner)), Fraction(0)) for j in range(len(b[0]))]
        for row in a
    ]


def _columns(vectors: list[list[Fraction]]) -> Matrix:
    """Stack vectors as the columns of a matrix."""
    if not vectors:
        return []
    return [[vec[i] for vec in vectors] for i in range(len(vectors[0]))]


def check_oracle_cap(g: Digraph, max_p: int,
                     max_vertices: int = ORACLE_MAX_VERTICES,
                     max_dim: int = ORACLE_MAX_P) -> None:
    if g.n_vertices > max_vertices or max_p > max_dim:
        raise OracleCapExceeded(
            f"exact oracle supports n <= {max_vertices}, p <= {max_dim}; "
            f"got n = {g.n_vertices}, p = {max_p}"
        )


@dataclass(frozen=True)
class ExactComplexDims:
    """Per-dimension exact counts for the cochain complex of one digraph."""

    max_p: int
    allowed: list[int]
    omega: list[int]
    domain: list[int]          # dim D^p
    restricted_rank: list[int]
    cohomology: list[int]
    harmonic: list[int]

    @property
    def defects(self) -> list[int]:
        return [o - d for o, d in zip(self.omega, self.domain)]


def exact_complex_dims(g: Digraph, max_p: int, enforce_cap: bool = True) -> ExactComplexDims:
    """Exact-rational dims of A^p, Omega^p, D^p, ranks, H^p and harmonic spaces."""
    if enforce_cap:
        check_oracle_cap(g, max_p)
    allowed, omega_dims, domain_dims, ranks = [], [], [], []
    omega_bases: list[list[list[Fraction]]] = []
    for p in range(max_p + 2):
        basis = allowed_path_basis(g, p)
        allowed.append(len(basis))
        constraints = _to_frac(omega_constraint_matrix(g, p))
        omega_vecs = frac_kernel(constraints, len(basis))
        omega_bases.append(omega_vecs)
        omega_dims.append(len(omega_vecs))
    for p in range(max_p + 1):
        omega_cols = _columns(omega_bases[p])
        closure = _to_frac(closure_constraint_matrix(g, p))
        if closure and omega_cols:
            reduced = _matmul(closure, omega_cols)
            k_vecs = frac_kernel(reduced, omega_dims[p])
        else:
            k_vecs = [[Fraction(int(i == j)) for j in range(omega_dims[p])] for i in range(omega_dims[p])]
        domain_dims.append(len(k_vecs))
        if k_vecs and omega_cols:
            domain_cols = _matmul(omega_cols, _columns(k_vecs))
            dmat = _to_frac(allowed_d_matrix(g, p))
            image = _matmul(dmat, domain_cols) if dmat else []
            ranks.append(frac_rank(image))
        else:
            ranks.append(0)
    cohomology = []
    harmonic = []
    for p in range(max_p + 1):
        below = ranks[p - 1] if p >= 1 else 0
        cohomology.append(domain_dims[p] - ranks[p] - below)
        harmonic.append(omega_dims[p] - ranks[p] - below)
    return ExactComplexDims(
        max_p=max_p,
        allowed=allowed[: max_p + 1],
        omega=omega_dims[: max_p + 1],
        domain=domain_dims,
        restricted_rank=ranks,
        cohomology=cohomology,
        harmonic=harmonic,
    )


def exact_chain_omega_dims(g: Digraph, max_p: int, enforce_cap: bool = True) -> list[int]:
    """Exact dims of the chain-side subspaces (boundary stays allowed)."""
    if enforce_cap:
        check_oracle_cap(g, max_p)
    return [len(_chain_omega_basis(g, p)) for p in range(max_p + 1)]


def _chain_omega_basis(g: Digraph, p: int) -> list[list[Fraction]]:
    basis = allowed_path_basis(g, p)
    if p == 0:
        return [[Fraction(int(i == j)) for j in range(len(basis))] for i in range(len(basis))]
    from .complexes import _nonallowed_faces, _omissions  # shared generators

    rows: Matrix = []
    for y in _nonallowed_faces(g, p):
        row = [Fraction(0)] * len(basis)
        for j, u in enumerate(basis.paths):
            for q, face in _omissions(u):
                if face == y:
                    row[j] += Fraction((-1) ** q)
        rows.append(row)
    return frac_kernel(rows, len(basis))


def exact_chain_betti(g: Digraph, max_p: int, enforce_cap: bool = True) -> list[int]:
    """Exact Betti numbers of the chain path complex."""
    if enforce_cap:
        check_oracle_cap(g, max_p)
    dims = []
    ranks = []
    for p in range(max_p + 2):
        omega_vecs = _chain_omega_basis(g, p)
        dims.append(len(omega_vecs))
        if p == 0 or not omega_vecs:
            ranks.append(0)
            continue
        bmat = _to_frac(allowed_d_matrix(g, p - 1).T)
        image = _matmul(bmat, _columns(omega_vecs)) if bmat else []
        ranks.append(frac_rank(image))
    return [dims[p] - ranks[p] - ranks[p + 1] for p in range(max_p + 1)]
