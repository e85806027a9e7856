"""Oriented path states, valence-weighted operators, and the lazy random walk.

The signed neighbour relation is *derived*, not transcribed: two allowed
d-paths are neighbours once for every ordered pair of allowed faces of a
common allowed (d+1)-parent, with orientation sign -(-1)^(a+b) for omission
positions a (giving v) and b (giving w).  This is exactly the cross-term
structure of the composition boundary-after-weighted-differential on allowed
coordinates, so the explicit neighbour-sum form of the upper Laplacian and
the matrix composition agree by construction.

The walk itself additionally needs the diagonal normalization
``parent_count(v) == m(v)`` (each parent contributing exactly one neighbour
occurrence); only then do "kernel rows sum to one" and
"A = I - (1-p) * upper Laplacian" hold at the same time.  Instances violating
it are rejected for walk purposes with the offending path named.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import (
    Cochain,
    LinearOperator,
    PathBasis,
    allowed_boundary_matrix,
    allowed_d_matrix,
    allowed_path_basis,
)
from .digraph import Digraph

try:
    from ._walk_kernel import simulate_counts as _simulate_counts
    WALK_BACKEND = "compiled"
except ImportError:  # extension not built: numpy fallback
    from ._walk_kernel_py import simulate_counts as _simulate_counts
    WALK_BACKEND = "python"

__all__ = [
    "WALK_BACKEND",
    "ExpectationProcess",
    "McExpectation",
    "OrientedState",
    "SignedNeighborTable",
    "TransitionOperator",
    "WalkSpaceError",
    "WeightedMetric",
    "WitnessResult",
    "expectation_exact",
    "expectation_limit",
    "expectation_mc",
    "lower_laplacian",
    "lower_laplacian_explicit",
    "mc_exact_max_sigma",
    "signed_neighbors",
    "transition_matrix",
    "upper_laplacian",
    "upper_laplacian_explicit",
    "upper_spectrum",
    "weighted_d",
    "witness_lower_bound",
]

DUAL_CONSTRUCTION_TOL = 1e-10
OPERATOR_MATCH_TOL = 1e-12
AGREEMENT_TOL = 1e-10


class WalkSpaceError(ValueError):
    """The digraph does not satisfy the walk hypotheses at this dimension."""


@dataclass(frozen=True)
class OrientedState:
    """An allowed d-path together with an orientation sign (+1 or -1)."""

    path: tuple[int, ...]
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("orientation sign must be +1 or -1")


@dataclass
class WeightedMetric:
    """Inner-product weights: reciprocal valence at the distinguished
    dimension, one everywhere else.  Positive definite since valences are
    validated to be >= 1."""

    d: int
    valences: np.ndarray

    def weights(self, k: int, size: int) -> np.ndarray:
        if k == self.d:
            return 1.0 / self.valences.astype(np.float64)
        return np.ones(size)

    def norm(self, coeffs: np.ndarray) -> float:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        return math.sqrt(float(np.sum(coeffs * coeffs / self.valences)))

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(np.asarray(f) * np.asarray(g) / self.valences))


@dataclass
class SignedNeighborTable:
    """Signed neighbour multiset of every allowed d-path, plus valences.

    ``neighbors[i]`` lists (path index, sign) occurrences; the valence m(i)
    is the list length.  ``parent_counts`` is the diagonal of the
    boundary-times-transpose matrix; ``regular`` records whether it equals m
    everywhere (the standing hypothesis of the walk layer).
    """

    d: int
    basis: PathBasis
    neighbors: tuple[tuple[tuple[int, int], ...], ...]
    parent_counts: np.ndarray
    valences: np.ndarray = field(init=False)

    def __post_init__(self):
        self.valences = np.array([len(ns) for ns in self.neighbors], dtype=np.int64)

    @property
    def n_paths(self) -> int:
        return len(self.basis)

    @property
    def n_states(self) -> int:
        return 2 * len(self.basis)

    @property
    def valence_bound(self) -> int:
        return int(self.valences.max()) if self.valences.size else 0

    @property
    def regular(self) -> bool:
        return bool(np.array_equal(self.parent_counts, self.valences))

    def irregular_paths(self) -> list[tuple[int, ...]]:
        return [
            self.basis.paths[i]
            for i in range(self.n_paths)
            if self.parent_counts[i] != self.valences[i]
        ]

    @property
    def d_connected(self) -> bool:
        parent = list(range(self.n_paths))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, ns in enumerate(self.neighbors):
            for j, _ in ns:
                parent[find(i)] = find(j)
        return len({find(i) for i in range(self.n_paths)}) <= 1

    @property
    def metric(self) -> WeightedMetric:
        return WeightedMetric(self.d, self.valences)

    def weighted_norm(self, coeffs: np.ndarray) -> float:
        return self.metric.norm(coeffs)

    def weighted_inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return self.metric.inner(f, g)

    def state_index(self, state: OrientedState) -> int:
        i = self.basis.index.get(state.path)
        if i is None:
            raise WalkSpaceError(f"path {state.path} is not an allowed {self.d}-path")
        return 2 * i + (0 if state.sign > 0 else 1)

    def state_of(self, index: int) -> OrientedState:
        return OrientedState(self.basis.paths[index // 2], 1 if index % 2 == 0 else -1)


@functools.lru_cache(maxsize=None)
def signed_neighbors(g: Digraph, d: int) -> SignedNeighborTable:
    """Derive the signed neighbour table at dimension d (d >= 1)."""
    if d < 1:
        raise ValueError("the walk dimension must be at least 1")
    basis = allowed_path_basis(g, d)
    if len(basis) == 0:
        raise WalkSpaceError(f"no allowed {d}-paths: walk undefined")
    parents = allowed_path_basis(g, d + 1)
    neighbors: list[list[tuple[int, int]]] = [[] for _ in basis.paths]
    for u in parents.paths:
        faces = []
        for a in range(len(u)):
            face = u[:a] + u[a + 1:]
            idx = basis.index.get(face)
            if idx is not None:
                faces.append((a, idx))
        for a, vi in faces:
            for b, wi in faces:
                if a != b and wi != vi:
                    neighbors[vi].append((wi, -((-1) ** (a + b))))
    bmat = allowed_boundary_matrix(g, d + 1)
    parent_counts = np.einsum("ij,ij->i", bmat, bmat) if bmat.size else np.zeros(len(basis), dtype=np.int64)
    table = SignedNeighborTable(
        d=d,
        basis=basis,
        neighbors=tuple(tuple(ns) for ns in neighbors),
        parent_counts=parent_counts,
    )
    if int(table.valences.min()) == 0:
        bad = table.basis.paths[int(np.argmin(table.valences))]
        raise WalkSpaceError(f"allowed {d}-path {bad} has valence 0: walk undefined")
    return table


def weighted_d(g: Digraph, k: int, d: int) -> LinearOperator:
    """Metric-adjoint differential at level k for the dimension-d weights.

    Maps (k-1)-forms to k-forms on allowed coordinates.  Rows are scaled by m
    when k equals the distinguished dimension, columns by 1/m when k is one
    above it, and the operator is the plain compressed differential otherwise.
    """
    table = signed_neighbors(g, d)
    base = allowed_d_matrix(g, k - 1).astype(np.float64)
    m = table.valences.astype(np.float64)
    if k == d:
        mat = m[:, None] * base
    elif k == d + 1:
        mat = base / m[None, :]
    else:
        mat = base
    return LinearOperator(allowed_path_basis(g, k - 1), allowed_path_basis(g, k), mat)


def upper_laplacian_explicit(g: Digraph, d: int) -> np.ndarray:
    """Neighbour-sum form: diag(parent_count/m) minus signed neighbours over m."""
    table = signed_neighbors(g, d)
    m = table.valences.astype(np.float64)
    mat = np.zeros((table.n_paths, table.n_paths))
    np.fill_diagonal(mat, table.parent_counts / m)
    for vi, ns in enumerate(table.neighbors):
        for wi, sign in ns:
            mat[vi, wi] -= sign / m[wi]
    return mat


def upper_laplacian(g: Digraph, d: int) -> LinearOperator:
    """Boundary composed after the weighted differential, on d-forms.

    Checked entrywise against the explicit neighbour-sum construction.
    """
    table = signed_neighbors(g, d)
    bmat = allowed_boundary_matrix(g, d + 1).astype(np.float64)
    composed = bmat @ weighted_d(g, d + 1, d).matrix
    explicit = upper_laplacian_explicit(g, d)
    resid = float(np.max(np.abs(composed - explicit))) if composed.size else 0.0
    if resid > DUAL_CONSTRUCTION_TOL:
        raise RuntimeError(f"upper Laplacian dual construction mismatch: {resid:.3e}")
    basis = table.basis
    return LinearOperator(basis, basis, composed)


def lower_laplacian_explicit(g: Digraph, d: int) -> np.ndarray:
    """Face-sharing form: m(v) * sum over common allowed faces with signs."""
    table = signed_neighbors(g, d)
    face_basis = allowed_path_basis(g, d - 1)
    mat = np.zeros((table.n_paths, table.n_paths))
    face_incidence: dict[int, list[tuple[int, int]]] = {}
    for vi, v in enumerate(table.basis.paths):
        for a in range(len(v)):
            fi = face_basis.index.get(v[:a] + v[a + 1:])
            if fi is not None:
                face_incidence.setdefault(fi, []).append((a, vi))
    m = table.valences.astype(np.float64)
    for pairs in face_incidence.values():
        for a, vi in pairs:
            for b, wi in pairs:
                mat[vi, wi] += ((-1) ** (a + b)) * m[vi]
    return mat


def lower_laplacian(g: Digraph, d: int) -> LinearOperator:
    """Weighted differential composed after the boundary, on d-forms."""
    table = signed_neighbors(g, d)
    composed = weighted_d(g, d, d).matrix @ allowed_boundary_matrix(g, d).astype(np.float64)
    explicit = lower_laplacian_explicit(g, d)
    resid = float(np.max(np.abs(composed - explicit))) if composed.size else 0.0
    if resid > DUAL_CONSTRUCTION_TOL:
        raise RuntimeError(f"lower Laplacian dual construction mismatch: {resid:.3e}")
    return LinearOperator(table.basis, table.basis, composed)


@dataclass
class UpperSpectrum:
    """Weighted-metric eigendecomposition of the upper Laplacian."""

    eigenvalues: np.ndarray         # ascending
    vectors_plain: np.ndarray       # eigenvectors of the similar symmetric matrix
    valences: np.ndarray
    zero_tol: float

    @property
    def kernel_mask(self) -> np.ndarray:
        return self.eigenvalues <= self.zero_tol

    def kernel_projector(self) -> np.ndarray:
        """Orthogonal projector onto the kernel in the weighted metric."""
        sqrt_m = np.sqrt(self.valences.astype(np.float64))
        q0 = self.vectors_plain[:, self.kernel_mask]
        return (sqrt_m[:, None] * q0) @ (q0.T / sqrt_m[None, :])


@functools.lru_cache(maxsize=None)
def upper_spectrum(g: Digraph, d: int) -> UpperSpectrum:
    table = signed_neighbors(g, d)
    lap = upper_laplacian(g, d).matrix
    sqrt_m = np.sqrt(table.valences.astype(np.float64))
    sym = lap / sqrt_m[:, None] * sqrt_m[None, :]
    sym = 0.5 * (sym + sym.T)
    vals, vecs = np.linalg.eigh(sym)
    tol = 1e-9 * max(1.0, float(vals[-1]) if vals.size else 0.0)
    return UpperSpectrum(vals, vecs, table.valences, tol)


@dataclass
class TransitionOperator:
    """Lazy-walk transition data: form-level matrix and state-level kernel."""

    p_lazy: float
    table: SignedNeighborTable
    matrix: np.ndarray    # on d-forms: identity minus (1-p) * upper Laplacian
    kernel: np.ndarray    # row-stochastic matrix on oriented states

    @property
    def spectrum_bounds(self) -> tuple[float, float]:
        m_bound = self.table.valence_bound
        return (self.p_lazy - m_bound * (1.0 - self.p_lazy), 1.0)


def transition_matrix(g: Digraph, d: int, p: float) -> TransitionOperator:
    if not 0.0 <= p <= 1.0:
        raise ValueError("laziness must lie in [0, 1]")
    table = signed_neighbors(g, d)
    if not table.regular:
        bad = table.irregular_paths()[0]
        raise WalkSpaceError(
            f"path {bad} has parent count != valence; "
            "the walk and the form-level transition operator would disagree"
        )
    lap = upper_laplacian(g, d).matrix
    a_mat = np.eye(table.n_paths) - (1.0 - p) * lap

    m = table.valences.astype(np.float64)
    a_nbr = np.zeros_like(a_mat)
    np.fill_diagonal(a_nbr, p)
    for wi, ns in enumerate(table.neighbors):
        for ui, sign in ns:
            a_nbr[wi, ui] += (1.0 - p) * sign / m[ui]
    resid = float(np.max(np.abs(a_mat - a_nbr))) if a_mat.size else 0.0
    if resid > OPERATOR_MATCH_TOL:
        raise RuntimeError(f"form-level transition operator mismatch: {resid:.3e}")

    n_states = table.n_states
    kernel = np.zeros((n_states, n_states))
    np.fill_diagonal(kernel, p)
    for vi, ns in enumerate(table.neighbors):
        step = (1.0 - p) / m[vi]
        for wi, sign in ns:
            kernel[2 * vi, 2 * wi + (0 if sign > 0 else 1)] += step
            kernel[2 * vi + 1, 2 * wi + (1 if sign > 0 else 0)] += step
    return TransitionOperator(p_lazy=float(p), table=table, matrix=a_mat, kernel=kernel)


def _indicator_form(table: SignedNeighborTable, v: tuple[int, ...]) -> np.ndarray:
    vi = table.basis.index.get(v)
    if vi is None:
        raise WalkSpaceError(f"path {v} is not an allowed {table.d}-path")
    e = np.zeros(table.n_paths)
    e[vi] = 1.0
    return e


@dataclass
class ExpectationProcess:
    """Expectation forms E_n and state distributions p_n of one walk."""

    start: OrientedState
    p_lazy: float
    table: SignedNeighborTable
    forms: list[np.ndarray]
    probabilities: list[np.ndarray]
    agreement_residual: float

    @property
    def weighted_norms(self) -> list[float]:
        return [self.table.weighted_norm(f) for f in self.forms]

    def form_cochain(self, n: int) -> Cochain:
        return Cochain(self.table.basis, self.forms[n])


def expectation_exact(g: Digraph, d: int, v: tuple[int, ...], n: int, p: float) -> ExpectationProcess:
    """Exact kernel iteration and form iteration, cross-checked against each other."""
    if n < 0:
        raise ValueError("step count must be non-negative")
    op = transition_matrix(g, d, p)
    table = op.table
    start = OrientedState(tuple(v), 1)
    s0 = table.state_index(start)
    prob = np.zeros(table.n_states)
    prob[s0] = 1.0
    form = _indicator_form(table, tuple(v))
    probs = [prob]
    forms = [form]
    for _ in range(n):
        probs.append(op.kernel.T @ probs[-1])
        forms.append(op.matrix @ forms[-1])
    resid = 0.0
    for fk, pk in zip(forms, probs):
        signed = pk[0::2] - pk[1::2]
        resid = max(resid, float(np.max(np.abs(fk - signed))))
    if resid > AGREEMENT_TOL:
        raise RuntimeError(f"kernel iteration and form iteration disagree: {resid:.3e}")
    return ExpectationProcess(
        start=start, p_lazy=float(p), table=table,
        forms=forms, probabilities=probs, agreement_residual=resid,
    )


@dataclass
class McExpectation:
    """Monte Carlo estimate of the state distributions of one walk."""

    start: OrientedState
    p_lazy: float
    table: SignedNeighborTable
    samples: int
    seed: int
    backend: str
    counts: np.ndarray       # (steps+1, n_states) visit counts
    frequencies: np.ndarray
    stderr: np.ndarray       # sqrt(q(1-q)/samples) at the empirical q

    def expectation_forms(self) -> np.ndarray:
        return self.frequencies[:, 0::2] - self.frequencies[:, 1::2]


def oriented_neighbor_arrays(table: SignedNeighborTable) -> tuple[np.ndarray, np.ndarray]:
    """CSR-style (indptr, targets) over oriented states for the samplers."""
    indptr = np.zeros(table.n_states + 1, dtype=np.int64)
    targets: list[int] = []
    for si in range(table.n_states):
        vi, neg = divmod(si, 2)
        for wi, sign in table.neighbors[vi]:
            eff = -sign if neg else sign
            targets.append(2 * wi + (0 if eff > 0 else 1))
        indptr[si + 1] = len(targets)
    return indptr, np.array(targets, dtype=np.int64)


def expectation_mc(g: Digraph, d: int, v: tuple[int, ...], n: int, p: float,
                   samples: int, seed: int) -> McExpectation:
    """Sampled walk; deterministic given the seed (trajectory i = uniform row i)."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("laziness must lie in [0, 1]")
    table = signed_neighbors(g, d)
    if not table.regular:
        bad = table.irregular_paths()[0]
        raise WalkSpaceError(f"path {bad} has parent count != valence; walk rejected")
    start = OrientedState(tuple(v), 1)
    s0 = table.state_index(start)
    indptr, targets = oriented_neighbor_arrays(table)
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random((samples, n))
    counts = np.zeros((n + 1, table.n_states), dtype=np.int64)
    _simulate_counts(indptr, targets, float(p), s0, uniforms, counts)
    freqs = counts.astype(np.float64) / samples
    stderr = np.sqrt(freqs * (1.0 - freqs) / samples)
    return McExpectation(
        start=start, p_lazy=float(p), table=table, samples=samples, seed=seed,
        backend=WALK_BACKEND, counts=counts, frequencies=freqs, stderr=stderr,
    )


def mc_exact_max_sigma(mc: McExpectation, exact: ExpectationProcess) -> float:
    """Worst deviation of MC frequencies from exact probabilities, in exact-q
    standard errors.  Zero-probability states must have zero frequency."""
    worst = 0.0
    for k, pk in enumerate(exact.probabilities):
        if k >= mc.frequencies.shape[0]:
            break
        q = pk
        fhat = mc.frequencies[k]
        se = np.sqrt(q * (1.0 - q) / mc.samples)
        for s in range(q.size):
            if se[s] == 0.0:
                if fhat[s] != q[s]:
                    return math.inf
            else:
                worst = max(worst, abs(fhat[s] - q[s]) / se[s])
    return worst


@dataclass
class LimitResult:
    limit: Cochain
    subdominant: float       # largest |eigenvalue| of A off the kernel block
    kernel_dim: int


def expectation_limit(g: Digraph, d: int, v: tuple[int, ...], p: float) -> LimitResult:
    """Limit of E_n: weighted-orthogonal projection of the start form onto
    the kernel of the upper Laplacian.  Errors out when a non-kernel
    eigenvalue of the transition operator reaches modulus 1."""
    op = transition_matrix(g, d, p)  # validates laziness and regularity
    table = op.table
    spec = upper_spectrum(g, d)
    a_eigs = 1.0 - (1.0 - p) * spec.eigenvalues
    off_kernel = a_eigs[~spec.kernel_mask]
    subdominant = float(np.max(np.abs(off_kernel))) if off_kernel.size else 0.0
    if subdominant >= 1.0:
        worst = off_kernel[np.argmax(np.abs(off_kernel))]
        raise WalkSpaceError(
            f"walk does not converge: transition eigenvalue {worst:.6g} has modulus >= 1"
        )
    e0 = _indicator_form(table, tuple(v))
    limit = spec.kernel_projector() @ e0
    return LimitResult(
        limit=Cochain(table.basis, limit),
        subdominant=subdominant,
        kernel_dim=int(spec.kernel_mask.sum()),
    )


@dataclass
class WitnessResult:
    witnessed: bool
    reason: str
    face: tuple[int, ...] | None
    constant: int | None      # integer K with 1/K a certified lower bound
    projection_bound: float   # |<f/|f|, start form>| in the weighted metric


def witness_lower_bound(g: Digraph, d: int, v: tuple[int, ...]) -> WitnessResult:
    """Search for an allowed (d-1)-path u whose weighted differential lands in
    the kernel of the upper Laplacian and overlaps the start form; when found,
    1/ceil(|f|^2) certifies a floor for every |E_n|."""
    table = signed_neighbors(g, d)
    lap = upper_laplacian(g, d).matrix
    e0 = _indicator_form(table, tuple(v))
    dw = weighted_d(g, d, d).matrix
    face_basis = allowed_path_basis(g, d - 1)
    best: WitnessResult | None = None
    for u in face_basis.paths:
        fu = np.zeros(len(face_basis))
        fu[face_basis.index[u]] = 1.0
        f = dw @ fu
        fnorm = table.weighted_norm(f)
        if fnorm <= 1e-12:
            continue
        if table.weighted_norm(lap @ f) > 1e-9 * max(1.0, fnorm):
            continue
        overlap = abs(table.weighted_inner(f, e0)) / fnorm
        if overlap <= 1e-12:
            continue
        k_const = max(1, math.ceil(fnorm * fnorm - 1e-9))
        if 1.0 / k_const <= overlap + 1e-12:
            result = WitnessResult(True, "", u, k_const, overlap)
            if best is None or result.projection_bound > best.projection_bound:
                best = result
    if best is not None:
        return best
    return WitnessResult(False, "no weighted differential of a (d-1)-indicator lies in the kernel "
                                "with nonzero overlap", None, None, 0.0)
