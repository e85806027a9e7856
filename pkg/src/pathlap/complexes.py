"""Operators and subspaces of the path complex of a digraph.

The full complex at dimension ``p`` is spanned by all ``n^(p+1)`` elementary
p-paths ("lambda" bases).  The allowed complex is spanned by the allowed
paths only.  The two-sided subspace Omega^p consists of allowed forms whose
differential and boundary are again supported on allowed paths; since d need
not preserve Omega, the differential of the cochain complex is restricted to
the largest subdomain D^p = {f in Omega^p : df in Omega^{p+1}} and the lost
dimensions are reported as the *closure defect*.

All operator entries are small integers; matrices are exact in float64.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .digraph import Digraph, enumerate_allowed

__all__ = [
    "DEFAULT_DENSE_CAP",
    "RANK_RTOL",
    "CapExceeded",
    "Cochain",
    "LinearOperator",
    "PathBasis",
    "RestrictedDifferential",
    "Subspace",
    "allowed_boundary_matrix",
    "allowed_d_matrix",
    "allowed_path_basis",
    "allowed_subspace",
    "build_boundary",
    "build_d",
    "chain_homology_dim",
    "chain_omega_subspace",
    "closure_constraint_matrix",
    "cohomology_dim",
    "frame_csv",
    "full_path_basis",
    "numerical_rank",
    "omega_constraint_matrix",
    "omega_subspace",
    "orthonormal_image",
    "orthonormal_kernel",
    "restricted_d",
    "triplet_text",
]

# Dense full-complex matrices are only built while n^(p+1) stays below this.
DEFAULT_DENSE_CAP = 100_000

# Singular values below RANK_RTOL * max(largest singular value, 1) count as
# zero.  Functions taking rtol=None read this module value at call time.
RANK_RTOL = 1e-9


class CapExceeded(RuntimeError):
    """A full-complex basis would exceed the dense size cap."""


@dataclass(frozen=True)
class PathBasis:
    """An ordered basis of elementary paths of one dimension.

    ``label`` is "lambda" for the full basis, "allowed" for the allowed
    sub-basis.  Paths are in lexicographic order and ``index`` inverts the
    ordering.
    """

    dimension: int
    paths: tuple[tuple[int, ...], ...]
    label: str = "allowed"
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {p: i for i, p in enumerate(self.paths)})

    def __len__(self) -> int:
        return len(self.paths)


@functools.lru_cache(maxsize=None)
def full_path_basis(g: Digraph, p: int, cap: int = DEFAULT_DENSE_CAP) -> PathBasis:
    if p < 0:
        return PathBasis(p, (), "lambda")
    size = g.n_vertices ** (p + 1)
    if size > cap:
        raise CapExceeded(f"full basis at dimension {p} has {size} paths (cap {cap})")
    paths = tuple(itertools.product(range(g.n_vertices), repeat=p + 1))
    return PathBasis(p, paths, "lambda")


@functools.lru_cache(maxsize=None)
def allowed_path_basis(g: Digraph, p: int) -> PathBasis:
    if p < 0:
        return PathBasis(p, (), "allowed")
    return PathBasis(p, enumerate_allowed(g, p), "allowed")


@dataclass
class Cochain:
    """A form: a real coefficient vector over an explicit path basis."""

    basis: PathBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (len(self.basis),):
            raise ValueError(
                f"coefficient vector of length {self.coeffs.shape} does not match basis of size {len(self.basis)}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __getitem__(self, path: tuple[int, ...]) -> float:
        return float(self.coeffs[self.basis.index[path]])


@dataclass
class LinearOperator:
    """A dense matrix between two explicit bases (or frames of subspaces)."""

    domain: object  # PathBasis or Subspace
    codomain: object
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (_dim(self.codomain), _dim(self.domain)):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({_dim(self.codomain)}, {_dim(self.domain)})"
            )

    def apply(self, f: Cochain) -> Cochain:
        if not isinstance(self.domain, PathBasis) or not isinstance(self.codomain, PathBasis):
            raise TypeError("apply() expects basis-to-basis operators")
        if f.basis is not self.domain and f.basis != self.domain:
            raise ValueError("cochain basis does not match operator domain")
        return Cochain(self.codomain, self.matrix @ f.coeffs)


def _dim(handle) -> int:
    if isinstance(handle, PathBasis):
        return len(handle)
    return handle.dim


@dataclass
class Subspace:
    """A subspace given by an orthonormal frame inside an explicit path basis."""

    ambient: PathBasis
    frame: np.ndarray

    def __post_init__(self):
        self.frame = np.asarray(self.frame, dtype=np.float64)
        if self.frame.ndim != 2 or self.frame.shape[0] != len(self.ambient):
            raise ValueError("frame must be (len(ambient) x dim)")

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def project(self, vec: np.ndarray) -> np.ndarray:
        return self.frame @ (self.frame.T @ np.asarray(vec, dtype=np.float64))

    def contains(self, vec: np.ndarray, tol: float = 1e-9) -> bool:
        vec = np.asarray(vec, dtype=np.float64)
        resid = np.linalg.norm(vec - self.project(vec))
        return resid <= tol * max(1.0, np.linalg.norm(vec))


# ---------------------------------------------------------------------------
# full-complex (lambda-level) operators


def _omissions(path: tuple[int, ...]):
    for q in range(len(path)):
        yield q, path[:q] + path[q + 1:]


def _insertions(path: tuple[int, ...], n: int):
    for q in range(len(path) + 1):
        for k in range(n):
            yield q, path[:q] + (k,) + path[q:]


def build_d(g: Digraph, p: int, cap: int = DEFAULT_DENSE_CAP) -> LinearOperator:
    """Exterior differential on the full complex: Lambda^p -> Lambda^{p+1}.

    Row w (a (p+1)-path), column u (a p-path):  sum over omission positions q
    with omit_q(w) = u of (-1)^q.
    """
    dom = full_path_basis(g, p, cap)
    cod = full_path_basis(g, p + 1, cap)
    mat = np.zeros((len(cod), len(dom)))
    for r, w in enumerate(cod.paths):
        for q, u in _omissions(w):
            mat[r, dom.index[u]] += (-1) ** q
    return LinearOperator(dom, cod, mat)


def build_boundary(g: Digraph, p: int, cap: int = DEFAULT_DENSE_CAP) -> LinearOperator:
    """Boundary on the full complex: Lambda^p -> Lambda^{p-1}.

    Row u (a (p-1)-path), column w (a p-path): sum over insertions
    (position q, vertex k) with insert(u, q, k) = w of (-1)^q.  For p = 0
    this is the zero operator into the trivial space.
    """
    dom = full_path_basis(g, p, cap)
    if p == 0:
        return LinearOperator(dom, full_path_basis(g, -1), np.zeros((0, len(dom))))
    cod = full_path_basis(g, p - 1, cap)
    mat = np.zeros((len(cod), len(dom)))
    for r, u in enumerate(cod.paths):
        for q, w in _insertions(u, g.n_vertices):
            mat[r, dom.index[w]] += (-1) ** q
    return LinearOperator(dom, cod, mat)


# ---------------------------------------------------------------------------
# allowed-complex (compressed) operators; exact integer matrices


@functools.lru_cache(maxsize=None)
def allowed_d_matrix(g: Digraph, p: int) -> np.ndarray:
    """Differential compressed to allowed coordinates: A^p -> A^{p+1} (int64)."""
    dom = allowed_path_basis(g, p)
    cod = allowed_path_basis(g, p + 1)
    mat = np.zeros((len(cod), len(dom)), dtype=np.int64)
    for r, w in enumerate(cod.paths):
        for q, u in _omissions(w):
            c = dom.index.get(u)
            if c is not None:
                mat[r, c] += (-1) ** q
    return mat


def allowed_boundary_matrix(g: Digraph, p: int) -> np.ndarray:
    """Insertion boundary compressed to allowed coordinates: A^p -> A^{p-1}.

    Equals the transpose of the compressed differential, since restriction to
    coordinate subspaces commutes with transposition.
    """
    if p <= 0:
        return np.zeros((0, len(allowed_path_basis(g, p))), dtype=np.int64)
    return allowed_d_matrix(g, p - 1).T


def _nonallowed_parents(g: Digraph, p: int) -> list[tuple[int, ...]]:
    """Non-allowed (p+1)-paths with at least one allowed p-face."""
    allowed_next = set(allowed_path_basis(g, p + 1).paths)
    found = set()
    for u in allowed_path_basis(g, p).paths:
        for _, w in _insertions(u, g.n_vertices):
            if w not in allowed_next:
                found.add(w)
    return sorted(found)


def _nonallowed_faces(g: Digraph, p: int) -> list[tuple[int, ...]]:
    """Non-allowed (p-1)-paths that arise as faces of allowed p-paths."""
    if p == 0:
        return []
    allowed_prev = set(allowed_path_basis(g, p - 1).paths)
    found = set()
    for u in allowed_path_basis(g, p).paths:
        for _, y in _omissions(u):
            if y not in allowed_prev:
                found.add(y)
    return sorted(found)


@functools.lru_cache(maxsize=None)
def omega_constraint_matrix(g: Digraph, p: int) -> np.ndarray:
    """Integer rows whose kernel inside A^p defines Omega^p.

    One row per non-allowed (p+1)-path w touched by an allowed face (df must
    vanish there) and, for p >= 1, one per non-allowed (p-1)-path y reachable
    by an allowed insertion (the boundary must vanish there).
    """
    basis = allowed_path_basis(g, p)
    rows: list[np.ndarray] = []
    for w in _nonallowed_parents(g, p):
        row = np.zeros(len(basis), dtype=np.int64)
        for q, u in _omissions(w):
            c = basis.index.get(u)
            if c is not None:
                row[c] += (-1) ** q
        rows.append(row)
    if p >= 1:
        prev_nonallowed = _nonallowed_faces(g, p)
        for y in prev_nonallowed:
            row = np.zeros(len(basis), dtype=np.int64)
            for q, z in _insertions(y, g.n_vertices):
                c = basis.index.get(z)
                if c is not None:
                    row[c] += (-1) ** q
            rows.append(row)
    if not rows:
        return np.zeros((0, len(basis)), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def closure_constraint_matrix(g: Digraph, p: int) -> np.ndarray:
    """Integer rows (over A^p) cutting out {f : boundary of df vanishes off A^p}.

    Together with membership in Omega^p this characterizes D^p, the largest
    subdomain the differential maps into Omega^{p+1}.
    """
    basis = allowed_path_basis(g, p)
    next_basis = allowed_path_basis(g, p + 1)
    dmat = allowed_d_matrix(g, p)
    rows: list[np.ndarray] = []
    for y in _nonallowed_faces(g, p + 1):
        trow = np.zeros(len(next_basis), dtype=np.int64)
        for q, z in _insertions(y, g.n_vertices):
            c = next_basis.index.get(z)
            if c is not None:
                trow[c] += (-1) ** q
        rows.append(trow @ dmat)
    if not rows:
        return np.zeros((0, len(basis)), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# numerical rank / kernel with the package-wide tolerance convention


def numerical_rank(mat: np.ndarray, rtol: float | None = None) -> int:
    rtol = RANK_RTOL if rtol is None else rtol
    mat = np.asarray(mat, dtype=np.float64)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    tol = rtol * max(float(s[0]), 1.0)
    return int(np.sum(s > tol))


def orthonormal_kernel(mat: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of mat acting on R^ncols."""
    rtol = RANK_RTOL if rtol is None else rtol
    mat = np.asarray(mat, dtype=np.float64)
    ncols = mat.shape[1]
    if mat.shape[0] == 0 or ncols == 0 or not mat.any():
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(mat)
    tol = rtol * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > tol))
    return vt[rank:].T.copy()


def orthonormal_image(mat: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of mat."""
    rtol = RANK_RTOL if rtol is None else rtol
    mat = np.asarray(mat, dtype=np.float64)
    if mat.size == 0 or not mat.any():
        return np.zeros((mat.shape[0], 0))
    u, s, _ = np.linalg.svd(mat)
    tol = rtol * max(float(s[0]), 1.0)
    rank = int(np.sum(s > tol))
    return u[:, :rank].copy()


# ---------------------------------------------------------------------------
# subspaces


def allowed_subspace(g: Digraph, p: int, cap: int = DEFAULT_DENSE_CAP) -> Subspace:
    """A^p as a coordinate subspace of the full basis (indicator frame)."""
    ambient = full_path_basis(g, p, cap)
    allowed = allowed_path_basis(g, p)
    frame = np.zeros((len(ambient), len(allowed)))
    for j, path in enumerate(allowed.paths):
        frame[ambient.index[path], j] = 1.0
    return Subspace(ambient, frame)


@functools.lru_cache(maxsize=None)
def omega_subspace(g: Digraph, p: int) -> Subspace:
    """Omega^p in allowed coordinates, with an orthonormal frame."""
    basis = allowed_path_basis(g, p)
    frame = orthonormal_kernel(omega_constraint_matrix(g, p))
    return Subspace(basis, frame)


@dataclass
class RestrictedDifferential:
    """The differential D^p -> Omega^{p+1} expressed in orthonormal frames.

    ``domain_in_omega`` (K) holds D^p coordinates inside the Omega^p frame;
    ``matrix`` maps D^p-frame coordinates to Omega^{p+1}-frame coordinates.
    ``extended_matrix`` is the same map extended by zero off D^p, i.e. the
    matrix of d composed with orthogonal projection onto D^p; this extension
    squares to zero because d(D^p) lands back inside D^{p+1}.
    """

    p: int
    omega_domain: Subspace
    codomain: Subspace
    domain_in_omega: np.ndarray
    matrix: np.ndarray

    @property
    def domain(self) -> Subspace:
        return Subspace(self.omega_domain.ambient, self.omega_domain.frame @ self.domain_in_omega)

    @property
    def domain_dim(self) -> int:
        return self.domain_in_omega.shape[1]

    @property
    def defect(self) -> int:
        return self.omega_domain.dim - self.domain_dim

    def extended_matrix(self) -> np.ndarray:
        return self.matrix @ self.domain_in_omega.T

    def as_operator(self) -> LinearOperator:
        return LinearOperator(self.domain, self.codomain, self.matrix)

    @property
    def rank(self) -> int:
        return numerical_rank(self.matrix)


@functools.lru_cache(maxsize=None)
def restricted_d(g: Digraph, p: int) -> RestrictedDifferential:
    """Differential restricted to D^p = {f in Omega^p : df in Omega^{p+1}}."""
    omega_p = omega_subspace(g, p)
    omega_next = omega_subspace(g, p + 1)
    dmat = allowed_d_matrix(g, p).astype(np.float64)
    constraints = closure_constraint_matrix(g, p).astype(np.float64)
    if constraints.shape[0] and omega_p.dim:
        k = orthonormal_kernel(constraints @ omega_p.frame)
    else:
        k = np.eye(omega_p.dim)
    sub_frame = omega_p.frame @ k
    matrix = omega_next.frame.T @ (dmat @ sub_frame)
    return RestrictedDifferential(p, omega_p, omega_next, k, matrix)


def cohomology_dim(g: Digraph, n: int) -> int:
    """dim ker(d on D^n) - dim im(d on D^{n-1}).

    The image always sits inside the kernel: for f in D^{n-1}, df lies in
    Omega^n by definition and in D^n because d(df) = 0.
    """
    if n < 0:
        raise ValueError("cohomology dimension index must be non-negative")
    up = restricted_d(g, n)
    rank_below = restricted_d(g, n - 1).rank if n >= 1 else 0
    return (up.domain_dim - up.rank) - rank_below


# ---------------------------------------------------------------------------
# chain-side homology (cross-check oracle)


@functools.lru_cache(maxsize=None)
def chain_omega_subspace(g: Digraph, p: int) -> Subspace:
    """Chains in A_p whose boundary is supported on allowed (p-1)-paths."""
    basis = allowed_path_basis(g, p)
    rows: list[np.ndarray] = []
    allowed_prev = allowed_path_basis(g, p - 1) if p >= 1 else None
    if p >= 1:
        for y in _nonallowed_faces(g, p):
            row = np.zeros(len(basis), dtype=np.int64)
            for j, u in enumerate(basis.paths):
                for q, face in _omissions(u):
                    if face == y:
                        row[j] += (-1) ** q
            rows.append(row)
    mat = np.array(rows, dtype=np.int64) if rows else np.zeros((0, len(basis)), dtype=np.int64)
    return Subspace(basis, orthonormal_kernel(mat))


def _chain_boundary_on_omega(g: Digraph, p: int) -> np.ndarray:
    """Boundary restricted to the chain subspace, in allowed coordinates."""
    omega = chain_omega_subspace(g, p)
    if p == 0 or omega.dim == 0:
        return np.zeros((len(allowed_path_basis(g, p - 1)) if p >= 1 else 0, omega.dim))
    # boundary of an allowed p-path, kept on allowed (p-1) coordinates;
    # the non-allowed coordinates vanish on the subspace by construction.
    bmat = allowed_d_matrix(g, p - 1).T.astype(np.float64)
    return bmat @ omega.frame


def chain_homology_dim(g: Digraph, n: int) -> int:
    """Betti number of the chain path complex: ker boundary / im boundary."""
    if n < 0:
        raise ValueError("homology dimension index must be non-negative")
    omega_n = chain_omega_subspace(g, n)
    rank_n = numerical_rank(_chain_boundary_on_omega(g, n)) if n >= 1 else 0
    rank_up = numerical_rank(_chain_boundary_on_omega(g, n + 1))
    return omega_n.dim - rank_n - rank_up


# ---------------------------------------------------------------------------
# exports


def triplet_text(op: LinearOperator) -> str:
    """Triplet-list form: header 'rows cols nnz', lines 'row col value'."""
    mat = op.matrix
    rows, cols = mat.shape
    entries = []
    for (r, c), v in np.ndenumerate(mat):
        if v != 0.0:
            sval = str(int(v)) if float(v).is_integer() else repr(float(v))
            entries.append(f"{r} {c} {sval}")
    return "\n".join([f"{rows} {cols} {len(entries)}"] + entries) + "\n"


def frame_csv(sub: Subspace) -> str:
    """Dense CSV of the frame, one ambient coordinate per line."""
    lines = []
    for row in sub.frame:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
