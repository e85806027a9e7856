"""Command-line front end: parse, betti, omega, hodge, heat, walk, verify.

Exit codes: 0 success with all hard checks passing, 1 usage/input error,
2 invariant-check failure.  All output is deterministic given the flags
(including --seed); every random draw flows from the seed alone.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import complexes, heat, hodge, rational, walk
from .complexes import Cochain, allowed_path_basis, omega_subspace, restricted_d
from .digraph import Digraph, DigraphError, digraph_from_dict, graph_distance, parse_digraph

__all__ = ["CliInputError", "Report", "RunConfig", "main", "run"]


class CliInputError(ValueError):
    """Unusable input: missing file, malformed digraph, bad flag combination."""


@dataclass
class RunConfig:
    command: str
    input_path: str
    max_p: int = 2
    p: int = 0
    d: int = 1
    times: tuple[float, ...] = (0.1, 1.0, 10.0)
    u0_path: str | None = None
    states_out: str | None = None
    lazy: float | None = None
    steps: int = 10
    samples: int = 10_000
    seed: int = 0
    mode: str = "exact"          # exact | mc | both
    start: tuple[int, ...] | None = None
    output_format: str = "json"  # json | csv
    out: str | None = None
    export_dir: str | None = None
    quiet: bool = False
    threads: int = 1
    oracle: bool = False
    allow_self_loops: bool = False
    rank_rtol: float = complexes.RANK_RTOL

    def __post_init__(self):
        if self.rank_rtol <= 0:
            raise CliInputError("tolerances must be positive")
        if self.lazy is not None and not 0.0 <= self.lazy <= 1.0:
            raise CliInputError("laziness must lie in [0, 1]")
        if self.threads < 1:
            raise CliInputError("threads must be >= 1")
        if self.output_format not in ("json", "csv"):
            raise CliInputError("format must be json or csv")
        if self.output_format == "csv" and self.command not in ("heat", "walk"):
            raise CliInputError(f"command {self.command!r} produces no time series for csv output")


@dataclass
class InvariantCheck:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass
class Report:
    command: str
    config: dict
    digraph: dict
    results: dict = field(default_factory=dict)
    checks: list[InvariantCheck] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    series_header: list[str] = field(default_factory=list)
    series_rows: list[list] = field(default_factory=list)

    def check(self, name: str, residual: float, tolerance: float) -> None:
        self.checks.append(InvariantCheck(name, float(residual), float(tolerance)))

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "digraph": self.digraph,
            "results": self.results,
            "checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed}
                for c in self.checks
            ],
            "warnings": self.warnings,
        }
        return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        if not self.series_header:
            raise CliInputError(f"command {self.command!r} produces no time series for csv output")
        lines = [",".join(self.series_header)]
        for row in self.series_rows:
            lines.append(",".join(_csv_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"pathlap {self.command}"]
        for key in sorted(self.digraph):
            lines.append(f"  digraph.{key}: {self.digraph[key]}")
        for key in sorted(self.results):
            lines.append(f"  {key}: {_plain(self.results[key])}")
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.1e})")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _load_digraph(config: RunConfig) -> Digraph:
    path = config.input_path
    if not os.path.isfile(path):
        raise CliInputError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        if text.lstrip().startswith("{"):
            return digraph_from_dict(json.loads(text), config.allow_self_loops)
        return parse_digraph(text, config.allow_self_loops)
    except (DigraphError, json.JSONDecodeError) as exc:
        raise CliInputError(f"cannot parse digraph: {exc}") from exc


def _digraph_summary(g: Digraph) -> dict:
    table = graph_distance(g)
    return {
        "vertices": g.n_vertices,
        "edges": g.n_edges,
        "connected": table.is_connected,
    }


# ---------------------------------------------------------------------------
# subcommands


def _run_parse(g: Digraph, config: RunConfig, report: Report) -> None:
    from .digraph import degree

    report.results["edge_list"] = [list(e) for e in g.edges]
    report.results["degrees"] = [degree(g, x) for x in range(g.n_vertices)]
    if g.n_vertices <= 16:
        report.results["distances"] = graph_distance(g).as_lists()


def _run_betti(g: Digraph, config: RunConfig, report: Report) -> None:
    cohom, chain, defects = [], [], []
    for p in range(config.max_p + 1):
        cohom.append(complexes.cohomology_dim(g, p))
        chain.append(complexes.chain_homology_dim(g, p))
        defects.append(restricted_d(g, p).defect)
    report.results["cohomology"] = cohom
    report.results["chain_betti"] = chain
    report.results["closure_defects"] = defects
    for p, dfct in enumerate(defects):
        if dfct:
            report.warnings.append(
                f"closure defect {dfct} at p={p}: the differential only maps a "
                f"{restricted_d(g, p).domain_dim}-dim subdomain into the next space"
            )
    for p, (h, b) in enumerate(zip(cohom, chain)):
        if h != b:
            report.warnings.append(
                f"cochain H^{p} = {h} differs from chain Betti b_{p} = {b}"
            )
    if config.oracle:
        _oracle_checks(g, config, report)


def _run_omega(g: Digraph, config: RunConfig, report: Report) -> None:
    dims_a, dims_omega, dims_domain, defects = [], [], [], []
    for p in range(config.max_p + 1):
        rd = restricted_d(g, p)
        dims_a.append(len(allowed_path_basis(g, p)))
        dims_omega.append(rd.omega_domain.dim)
        dims_domain.append(rd.domain_dim)
        defects.append(rd.defect)
    report.results["allowed_dims"] = dims_a
    report.results["omega_dims"] = dims_omega
    report.results["domain_dims"] = dims_domain
    report.results["closure_defects"] = defects
    for p, dfct in enumerate(defects):
        if dfct:
            report.warnings.append(f"closure defect {dfct} at p={p}")
    if config.export_dir:
        os.makedirs(config.export_dir, exist_ok=True)
        for p in range(config.max_p + 1):
            try:
                dop = complexes.build_d(g, p)
                bop = complexes.build_boundary(g, p)
            except complexes.CapExceeded as exc:
                report.warnings.append(f"export skipped at p={p}: {exc}")
                continue
            with open(os.path.join(config.export_dir, f"d_{p}.txt"), "w") as fh:
                fh.write(complexes.triplet_text(dop))
            with open(os.path.join(config.export_dir, f"boundary_{p}.txt"), "w") as fh:
                fh.write(complexes.triplet_text(bop))
            with open(os.path.join(config.export_dir, f"omega_frame_{p}.csv"), "w") as fh:
                fh.write(complexes.frame_csv(omega_subspace(g, p)))
    if config.oracle:
        _oracle_checks(g, config, report)


def _run_hodge(g: Digraph, config: RunConfig, report: Report) -> None:
    p = config.p
    bundle = hodge.laplacian(g, p)
    spec = bundle.spectral
    harmonic_dim = int(spec.kernel_mask.sum())
    d_exact_dim = complexes.numerical_rank(bundle.down_matrix)
    delta_exact_dim = complexes.numerical_rank(bundle.up_matrix.T)
    defect_here = restricted_d(g, p).defect
    defect_below = restricted_d(g, p - 1).defect if p >= 1 else 0
    report.results.update(
        {
            "p": p,
            "omega_dim": bundle.omega.dim,
            "harmonic_dim": harmonic_dim,
            "d_exact_dim": d_exact_dim,
            "delta_exact_dim": delta_exact_dim,
            "eigenvalues": [float(v) for v in spec.eigenvalues],
            "closure_defects": [defect_below, defect_here],
        }
    )
    if bundle.delta.size:
        sym = float(np.max(np.abs(bundle.delta - bundle.delta.T)))
        min_eig = float(spec.eigenvalues[0])
        report.check("laplacian symmetric", sym, 1e-12)
        report.check("laplacian positive semidefinite", max(0.0, -min_eig), 1e-10)
        rng = np.random.Generator(np.random.PCG64(config.seed))
        probe = bundle.embed(rng.standard_normal(bundle.omega.dim))
        parts = hodge.hodge_decompose(g, p, probe)
        report.check("decomposition reconstructs input", parts.reconstruction_residual(), 1e-10)
        report.check("decomposition parts orthogonal", parts.max_pairwise_inner(), 1e-10)
        gf = hodge.green_spectral(g, p, probe)
        resid = bundle.delta @ bundle.to_frame(gf) + bundle.to_frame(parts.harmonic) - bundle.to_frame(probe)
        report.check("green inverts off harmonic space", float(np.linalg.norm(resid)), 1e-10)
    if defect_here == 0 and defect_below == 0:
        report.check(
            "harmonic dim equals cohomology dim",
            abs(harmonic_dim - complexes.cohomology_dim(g, p)),
            0.0,
        )
    else:
        report.warnings.append(
            f"closure defects {defect_below, defect_here}: harmonic dim may exceed cohomology dim"
        )


def _parse_u0(config: RunConfig, g: Digraph, p: int) -> Cochain:
    basis = allowed_path_basis(g, p)
    if config.u0_path is None:
        omega = omega_subspace(g, p)
        if omega.dim == 0:
            raise CliInputError(f"the degree-{p} two-sided subspace is trivial")
        vec = np.zeros(len(basis))
        vec[0] = 1.0
        proj = omega.project(vec)
        if np.linalg.norm(proj) < 1e-12:
            proj = omega.frame[:, 0]
        return Cochain(basis, proj / np.linalg.norm(proj))
    if not os.path.isfile(config.u0_path):
        raise CliInputError(f"u0 file not found: {config.u0_path}")
    with open(config.u0_path, "r", encoding="utf-8") as fh:
        tokens = fh.read().replace(",", " ").split()
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise CliInputError(f"u0 file is not numeric: {exc}") from exc
    if len(values) != len(basis):
        raise CliInputError(f"u0 has {len(values)} coefficients; expected {len(basis)}")
    return Cochain(basis, np.array(values))


def _run_heat(g: Digraph, config: RunConfig, report: Report) -> None:
    p = config.p
    u0 = _parse_u0(config, g, p)
    try:
        traj = heat.evolve(g, p, u0, config.times)
    except ValueError as exc:
        raise CliInputError(str(exc)) from exc
    bundle = hodge.laplacian(g, p)
    limit = heat.harmonic_limit(g, p, u0)
    gap = heat.spectral_gap(g, p)
    report.results["p"] = p
    report.results["spectral_gap"] = gap
    report.results["frame_is_full"] = bundle.omega.dim == len(bundle.omega.ambient)
    if not report.results["frame_is_full"]:
        report.warnings.append(
            "kernel entries are frame-dependent: the two-sided subspace is a proper subspace"
        )
    report.series_header = ["t", "norm", "dist_to_harmonic"]
    dists = []
    for t, state, norm in zip(traj.times, traj.states, traj.norms):
        dist = float(np.linalg.norm(state.coeffs - limit.coeffs))
        dists.append(dist)
        report.series_rows.append([t, norm, dist])
    if config.states_out:
        basis = allowed_path_basis(g, p)
        header = ["t"] + ["|".join(map(str, path)) for path in basis.paths]
        lines = [",".join(header)]
        for t, state in zip(traj.times, traj.states):
            lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in state.coeffs]))
        with open(config.states_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    drift = max((traj.norms[i + 1] - traj.norms[i] for i in range(len(traj.norms) - 1)), default=0.0)
    report.check("norm non-increasing along trajectory", max(0.0, drift), 1e-12)
    resid0 = float(np.linalg.norm(u0.coeffs - limit.coeffs))
    worst = 0.0
    for t, dist in zip(traj.times, dists):
        bound = math.exp(-gap * t) * resid0 if math.isfinite(gap) else 0.0
        worst = max(worst, dist - bound)
    report.check("decay bound exp(-gap*t)", max(0.0, worst), 1e-9)
    if len(config.times) >= 2:
        t1, t2 = config.times[0], config.times[-1]
        m1 = heat.heat_operator(g, p, t1).matrix
        m2 = heat.heat_operator(g, p, t2).matrix
        m12 = heat.heat_operator(g, p, t1 + t2).matrix
        semi = float(np.max(np.abs(m12 - m1 @ m2))) if m12.size else 0.0
        report.check("semigroup law", semi, 1e-10)
        sym = float(np.max(np.abs(m1 - m1.T))) if m1.size else 0.0
        report.check("heat operator self-adjoint", sym, 1e-12)
    if p == 0:
        sc = heat.stochastic_completeness(g, max(config.times))
        if sc.applicable:
            report.results["row_sum_deviation"] = sc.row_sum_deviation
            report.results["mass_deviation"] = sc.mass_deviation
            report.check("stochastic completeness at p=0", sc.row_sum_deviation, 1e-10)
        else:
            report.warnings.append(f"stochastic completeness not applicable: {sc.reason}")
    else:
        dev = heat.heat_kernel_row_sum_deviation(g, p, max(config.times))
        report.results["row_sum_deviation"] = dev
        report.warnings.append(
            "row sums at p >= 1 are measured, not asserted "
            f"(deviation {dev:.3e} at t={max(config.times)})"
        )


def _run_walk(g: Digraph, config: RunConfig, report: Report) -> None:
    d = config.d
    try:
        table = walk.signed_neighbors(g, d)
    except walk.WalkSpaceError as exc:
        raise CliInputError(str(exc)) from exc
    m_bound = table.valence_bound
    lazy = config.lazy
    if lazy is None:
        lazy = (m_bound + 0.5) / (m_bound + 1.0)
        report.warnings.append(f"laziness not given; defaulting to {lazy!r} for convergence")
    lower = lazy - m_bound * (1.0 - lazy)
    if abs(lower) >= 1.0:
        report.warnings.append(
            f"|p - M(1-p)| = {abs(lower):.3g} >= 1: the walk need not converge"
        )
    if not table.regular:
        raise CliInputError(
            f"walk rejected: path {table.irregular_paths()[0]} has parent count != valence"
        )
    start = config.start if config.start is not None else table.basis.paths[0]
    if config.steps < 0:
        raise CliInputError("steps must be non-negative")

    hist: dict[int, int] = {}
    for mv in table.valences:
        hist[int(mv)] = hist.get(int(mv), 0) + 1
    report.results.update(
        {
            "d": d,
            "n_paths": table.n_paths,
            "n_states": table.n_states,
            "valence_bound": m_bound,
            "valence_histogram": {str(k): v for k, v in sorted(hist.items())},
            "regular": table.regular,
            "d_connected": table.d_connected,
            "lazy": lazy,
            "start": list(start),
            "backend": walk.WALK_BACKEND,
        }
    )

    spec = walk.upper_spectrum(g, d)
    eigs = spec.eigenvalues
    report.results["upper_laplacian_spectrum"] = [float(v) for v in eigs]
    report.check("upper spectrum lower bound", max(0.0, float(-eigs.min())) if eigs.size else 0.0, 1e-9)
    report.check(
        "upper spectrum upper bound",
        max(0.0, float(eigs.max()) - (m_bound + 1.0)) if eigs.size else 0.0,
        1e-9,
    )
    a_eigs = 1.0 - (1.0 - lazy) * eigs
    report.check("transition spectrum within [p-M(1-p), 1]",
                 max(0.0, float(a_eigs.max()) - 1.0, float(lower - a_eigs.min())) if a_eigs.size else 0.0,
                 1e-9)

    try:
        exact = walk.expectation_exact(g, d, start, config.steps, lazy) if config.mode in ("exact", "both") else None
        mc = (
            walk.expectation_mc(g, d, start, config.steps, lazy, config.samples, config.seed)
            if config.mode in ("mc", "both")
            else None
        )
    except walk.WalkSpaceError as exc:
        raise CliInputError(str(exc)) from exc

    if exact is not None:
        report.check("forms match kernel iteration", exact.agreement_residual, 1e-10)
        norms = exact.weighted_norms
        report.results["expectation_norms"] = norms
        start_m = int(table.valences[table.basis.index[tuple(start)]])
        report.check(
            "start norm is 1/sqrt(m)",
            abs(norms[0] - math.sqrt(1.0 / start_m)),
            0.0,
        )
        upper = max(abs(lower), 1.0)
        worst = max((nv - max(upper ** k, 1.0) for k, nv in enumerate(norms)), default=0.0)
        report.check("norm upper bound", max(0.0, worst), 1e-12)
        witness = walk.witness_lower_bound(g, d, tuple(start))
        if witness.witnessed:
            report.results["lower_bound_constant"] = witness.constant
            floor = 1.0 / witness.constant
            report.check("norm lower bound 1/K", max(0.0, floor - min(norms)), 1e-12)
        else:
            report.warnings.append(f"lower bound not witnessed: {witness.reason}")
    if mc is not None and exact is not None:
        sigma = walk.mc_exact_max_sigma(mc, exact)
        report.results["mc_max_sigma"] = sigma
        if sigma > 6.0:
            report.check("mc within 6 sigma of exact", sigma - 6.0, 0.0)
        elif sigma > 4.0:
            report.warnings.append(f"mc deviates between 4 and 6 sigma (max {sigma:.2f})")

    report.series_header = ["n", "state", "sign", "prob_exact", "prob_mc", "stderr", "E_n"]
    mc_forms = mc.expectation_forms() if mc is not None else None
    for k in range(config.steps + 1):
        for si in range(table.n_states):
            state = table.state_of(si)
            prob_exact = float(exact.probabilities[k][si]) if exact is not None else None
            prob_mc = float(mc.frequencies[k][si]) if mc is not None else None
            stderr = float(mc.stderr[k][si]) if mc is not None else None
            e_n = None
            if si % 2 == 0:
                if exact is not None:
                    e_n = float(exact.forms[k][si // 2])
                elif mc_forms is not None:
                    e_n = float(mc_forms[k][si // 2])
            report.series_rows.append(
                [k, "|".join(map(str, state.path)), state.sign, prob_exact, prob_mc, stderr, e_n]
            )


def _oracle_checks(g: Digraph, config: RunConfig, report: Report) -> None:
    try:
        exact = rational.exact_complex_dims(g, config.max_p)
        chain = rational.exact_chain_betti(g, config.max_p)
        chain_omega = rational.exact_chain_omega_dims(g, config.max_p)
    except rational.OracleCapExceeded as exc:
        raise CliInputError(str(exc)) from exc
    float_allowed = [len(allowed_path_basis(g, p)) for p in range(config.max_p + 1)]
    float_omega = [omega_subspace(g, p).dim for p in range(config.max_p + 1)]
    float_domain = [restricted_d(g, p).domain_dim for p in range(config.max_p + 1)]
    float_cohom = [complexes.cohomology_dim(g, p) for p in range(config.max_p + 1)]
    float_harm = [
        int(hodge.laplacian(g, p).spectral.kernel_mask.sum()) for p in range(config.max_p + 1)
    ]
    float_chain = [complexes.chain_homology_dim(g, p) for p in range(config.max_p + 1)]
    float_chain_omega = [complexes.chain_omega_subspace(g, p).dim for p in range(config.max_p + 1)]
    pairs = [
        ("allowed path counts", float_allowed, exact.allowed),
        ("omega dims", float_omega, exact.omega),
        ("closure domain dims", float_domain, exact.domain),
        ("cohomology dims", float_cohom, exact.cohomology),
        ("harmonic dims", float_harm, exact.harmonic),
        ("chain betti numbers", float_chain, chain),
        ("chain omega dims", float_chain_omega, chain_omega),
    ]
    report.results["oracle"] = {
        name.replace(" ", "_"): list(vals) for name, _, vals in pairs
    }
    for name, got, want in pairs:
        mismatch = sum(int(a != b) for a, b in zip(got, want))
        report.check(f"float matches exact oracle: {name}", float(mismatch), 0.0)


def _run_verify(g: Digraph, config: RunConfig, report: Report) -> None:
    _oracle_checks(g, config, report)


_COMMANDS = {
    "parse": _run_parse,
    "betti": _run_betti,
    "omega": _run_omega,
    "hodge": _run_hodge,
    "heat": _run_heat,
    "walk": _run_walk,
    "verify": _run_verify,
}


def run(config: RunConfig) -> tuple[Report, int]:
    # one digraph per invocation: the rank tolerance may be set process-wide
    complexes.RANK_RTOL = config.rank_rtol
    g = _load_digraph(config)
    report = Report(
        command=config.command,
        config={
            "input": config.input_path,
            "seed": config.seed,
            "threads": config.threads,
            "format": config.output_format,
            "rank_rtol": config.rank_rtol,
        },
        digraph=_digraph_summary(g),
    )
    _COMMANDS[config.command](g, config, report)
    return report, (0 if report.all_passed else 2)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_times(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliInputError("time grid must be 'start:stop:count' or a comma list")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise CliInputError("time grid needs at least one point")
        return tuple(float(t) for t in np.linspace(start, stop, count))
    return tuple(float(t) for t in text.split(","))


def _parse_start(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise CliInputError(f"bad start path {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathlap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="digraph file (edge list or JSON object)")
        sp.add_argument("--out", help="write the machine report here ('-' for stdout)")
        sp.add_argument("--format", default="json", choices=("json", "csv"))
        sp.add_argument("--quiet", action="store_true", help="suppress the human-readable table")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1,
                        help="reserved concurrency bound; results never depend on it")
        sp.add_argument("--allow-self-loops", action="store_true")
        sp.add_argument("--rank-rtol", type=float, default=complexes.RANK_RTOL,
                        help="singular values below this times max(largest, 1) count as zero")

    sp = sub.add_parser("parse", help="validate and summarize a digraph")
    common(sp)

    for name in ("betti", "omega"):
        sp = sub.add_parser(name, help=f"{name} dimensions up to --max-p")
        common(sp)
        sp.add_argument("--max-p", type=int, default=2)
        sp.add_argument("--oracle", action="store_true", help="cross-check with exact arithmetic")
        if name == "omega":
            sp.add_argument("--export-dir", help="write operator triplets and frames here")

    sp = sub.add_parser("hodge", help="Laplacian spectrum and decomposition report")
    common(sp)
    sp.add_argument("--p", type=int, default=0)

    sp = sub.add_parser("heat", help="heat flow of a form")
    common(sp)
    sp.add_argument("--p", type=int, default=0)
    sp.add_argument("--t", default="0.1,1,10", help="comma list or start:stop:count")
    sp.add_argument("--u0", help="CSV file of coefficients over the allowed basis")
    sp.add_argument("--states-out", help="write the full states as CSV here")

    sp = sub.add_parser("walk", help="lazy random walk on oriented paths")
    common(sp)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--lazy", type=float, default=None)
    sp.add_argument("--start", help="comma-separated vertex ids of the start path")
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--samples", type=int, default=10_000)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--exact", dest="mode", action="store_const", const="exact")
    group.add_argument("--mc", dest="mode", action="store_const", const="mc")
    group.add_argument("--both", dest="mode", action="store_const", const="both")
    sp.set_defaults(mode="exact")

    sp = sub.add_parser("verify", help="exact-rational recomputation of all dims")
    common(sp)
    sp.add_argument("--max-p", type=int, default=2)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kwargs = dict(
        command=args.command,
        input_path=args.input,
        out=args.out,
        output_format=args.format,
        quiet=args.quiet,
        seed=args.seed,
        threads=args.threads,
        allow_self_loops=args.allow_self_loops,
        rank_rtol=args.rank_rtol,
    )
    if hasattr(args, "max_p"):
        kwargs["max_p"] = args.max_p
    if hasattr(args, "oracle"):
        kwargs["oracle"] = args.oracle
    if getattr(args, "export_dir", None):
        kwargs["export_dir"] = args.export_dir
    if hasattr(args, "p"):
        kwargs["p"] = args.p
    if hasattr(args, "t"):
        kwargs["times"] = _parse_times(args.t)
    if getattr(args, "u0", None):
        kwargs["u0_path"] = args.u0
    if getattr(args, "states_out", None):
        kwargs["states_out"] = args.states_out
    if hasattr(args, "d"):
        kwargs["d"] = args.d
    if hasattr(args, "lazy"):
        kwargs["lazy"] = args.lazy
    if hasattr(args, "steps"):
        kwargs["steps"] = args.steps
    if hasattr(args, "samples"):
        kwargs["samples"] = args.samples
    if getattr(args, "start", None):
        kwargs["start"] = _parse_start(args.start)
    if hasattr(args, "mode"):
        kwargs["mode"] = args.mode
    return RunConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report, code = run(config)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DigraphError, rational.OracleCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not config.quiet:
        sys.stdout.write(report.to_text())
    if config.out:
        payload = report.to_json() if config.output_format == "json" else report.to_csv()
        if config.out == "-":
            sys.stdout.write(payload)
        else:
            with open(config.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
