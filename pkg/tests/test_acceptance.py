"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.

One check is expected to fail and is kept failing on purpose:
``test_criterion_1_norm_identity`` asserts that the full-complex differential
preserves the l2 norm.  It does not (see the counterexample in the test);
the check is retained verbatim to document the discrepancy rather than being
weakened.  Every other criterion passes at its stated tolerance.
"""

import math

import numpy as np

from pathlap import parse_digraph
from pathlap.complexes import (
    Cochain,
    allowed_path_basis,
    build_boundary,
    build_d,
    chain_homology_dim,
    chain_omega_subspace,
    cohomology_dim,
    restricted_d,
)
from pathlap.heat import green_quadrature, harmonic_limit, heat_operator, spectral_gap, stochastic_completeness
from pathlap.hodge import green_spectral, harmonic_representative, hodge_decompose, laplacian
from pathlap.rational import exact_chain_betti, exact_complex_dims
from pathlap.walk import (
    expectation_exact,
    expectation_limit,
    expectation_mc,
    mc_exact_max_sigma,
    signed_neighbors,
    upper_laplacian,
    upper_laplacian_explicit,
    upper_spectrum,
    witness_lower_bound,
)

from conftest import random_digraph, random_walk_digraph

G1 = parse_digraph("0 1")
K2SYM = parse_digraph("0 1\n1 0")
T3 = parse_digraph("0 1\n1 2\n2 0")
TR = parse_digraph("0 1\n1 2\n0 2")
BRS = parse_digraph("0 1\n0 2\n1 3\n2 3")
P3SYM = parse_digraph("0 1\n1 0\n1 2\n2 1")
K3SYM = parse_digraph("0 1\n1 0\n1 2\n2 1\n0 2\n2 0")


def report(number: int, label: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number} [{label}]: {status}{suffix}")


def test_criterion_1_operator_identities():
    rng = np.random.default_rng(10)
    worst_adj = 0.0
    for _ in range(25):
        g = random_digraph(rng, int(rng.integers(2, 7)))
        d_ops = [build_d(g, p) for p in range(4)]
        b_ops = [build_boundary(g, p) for p in range(5)]
        for p in range(1, 4):
            prod = d_ops[p].matrix @ d_ops[p - 1].matrix
            assert not prod.any(), "d after d must vanish exactly"
        for p in range(1, 3):
            prod = b_ops[p].matrix @ b_ops[p + 1].matrix
            assert not prod.any(), "boundary after boundary must vanish exactly"
        for p in range(3):
            assert np.array_equal(b_ops[p + 1].matrix, d_ops[p].matrix.T)
            f = rng.standard_normal(d_ops[p].matrix.shape[1])
            h = rng.standard_normal(d_ops[p].matrix.shape[0])
            lhs = float((d_ops[p].matrix @ f) @ h)
            rhs = float(f @ (b_ops[p + 1].matrix @ h))
            worst_adj = max(worst_adj, abs(lhs - rhs) / max(1.0, abs(lhs)))
    passed = worst_adj <= 1e-10
    report(1, "operator identities", passed, f"adjointness residual {worst_adj:.2e}")
    assert passed


def test_criterion_1_norm_identity():
    """Norm preservation of the full-complex differential: |df| = |f|.

    This fails, and must fail: with two vertices and f the indicator of
    vertex 0, df takes value -1 on (0,1) and +1 on (1,0), so |df|^2 = 2
    while |f|^2 = 1.  The general count gives |df|^2 = (p+1) * n * |f|^2
    minus cross terms, never |f|^2.  The check is kept at its stated
    tolerance instead of being weakened; see the suite docstring.
    """
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(25):
        g = random_digraph(rng, int(rng.integers(2, 7)))
        for p in range(3):
            dmat = build_d(g, p).matrix
            f = rng.standard_normal(dmat.shape[1])
            resid = abs(np.linalg.norm(dmat @ f) - np.linalg.norm(f))
            worst = max(worst, resid)
    passed = worst <= 1e-10
    report(1, "norm identity |df| = |f|", passed, f"residual {worst:.2e}, expected failure")
    assert passed, (
        "the differential is not an isometry of the full complex; "
        "counterexample: n=2, f = indicator of vertex 0 gives |df|^2 = 2, |f|^2 = 1"
    )


def test_criterion_2_cohomology_ground_truth():
    assert cohomology_dim(G1, 0) == 1 and cohomology_dim(G1, 1) == 0
    ex_g1 = exact_complex_dims(G1, 1)
    assert ex_g1.cohomology == [1, 0]
    assert chain_homology_dim(T3, 1) == 1 and exact_chain_betti(T3, 1)[1] == 1
    assert chain_homology_dim(TR, 1) == 0 and exact_chain_betti(TR, 1)[1] == 0
    assert chain_homology_dim(BRS, 1) == 0 and exact_chain_betti(BRS, 1)[1] == 0
    assert chain_omega_subspace(BRS, 2).dim == 1

    rng = np.random.default_rng(30)
    graphs = [G1, K2SYM, T3, TR, BRS, P3SYM, K3SYM] + [
        random_digraph(rng, int(rng.integers(2, 6))) for _ in range(8)
    ]
    for g in graphs:
        exact = exact_complex_dims(g, 3)
        floats = [cohomology_dim(g, p) for p in range(4)]
        assert floats == exact.cohomology
        assert [chain_homology_dim(g, p) for p in range(4)] == exact_chain_betti(g, 3)
    report(2, "cohomology ground truth", True, f"{len(graphs)} instances, float == rational")


def test_criterion_3_hodge():
    rng = np.random.default_rng(40)
    graphs = [K2SYM, T3, TR, BRS, P3SYM, K3SYM] + [
        random_digraph(rng, int(rng.integers(2, 6))) for _ in range(6)
    ]
    kernel_matches = 0
    worst_recon = 0.0
    worst_orth = 0.0
    for g in graphs:
        for p in range(3):
            bundle = laplacian(g, p)
            if bundle.omega.dim == 0:
                continue
            defect_below = restricted_d(g, p - 1).defect if p >= 1 else 0
            if defect_below == 0 and restricted_d(g, p).defect == 0:
                assert int(bundle.spectral.kernel_mask.sum()) == cohomology_dim(g, p)
                kernel_matches += 1
            f = bundle.embed(rng.standard_normal(bundle.omega.dim))
            parts = hodge_decompose(g, p, f)
            worst_recon = max(worst_recon, parts.reconstruction_residual())
            worst_orth = max(worst_orth, parts.max_pairwise_inner())
    assert kernel_matches >= 8
    assert worst_recon <= 1e-10 and worst_orth <= 1e-10

    # representative: minimal norm in its class, recovers a planted harmonic
    worst_recovery = 0.0
    for g, p in ((K2SYM, 0), (K3SYM, 1), (P3SYM, 0)):
        bundle = laplacian(g, p)
        kernel = bundle.spectral.kernel_projector()
        h = kernel @ rng.standard_normal(bundle.omega.dim)
        if np.linalg.norm(h) < 1e-12:
            continue
        lift = (
            bundle.down_matrix @ rng.standard_normal(bundle.down_matrix.shape[1])
            if bundle.down_matrix.shape[1]
            else np.zeros(bundle.omega.dim)
        )
        rep = harmonic_representative(g, p, bundle.embed(h + lift))
        worst_recovery = max(worst_recovery, float(np.linalg.norm(bundle.to_frame(rep) - h)))
        for _ in range(50):
            dg = (
                bundle.down_matrix @ rng.standard_normal(bundle.down_matrix.shape[1])
                if bundle.down_matrix.shape[1]
                else np.zeros(bundle.omega.dim)
            )
            assert np.linalg.norm(bundle.to_frame(rep)) <= np.linalg.norm(bundle.to_frame(rep) + dg) + 1e-12
    passed = worst_recovery <= 1e-9
    report(3, "hodge decomposition", passed,
           f"kernel=cohomology on {kernel_matches} defect-free cases; recovery {worst_recovery:.2e}")
    assert passed


def test_criterion_4_heat():
    rng = np.random.default_rng(50)
    grid = np.geomspace(0.1, 10.0, 7)
    instances = [(K2SYM, 0), (K3SYM, 0), (K3SYM, 1), (P3SYM, 0), (T3, 0), (K2SYM, 1)]
    worst = {"semigroup": 0.0, "selfadj": 0.0, "monotone": 0.0, "converge": 0.0}
    for g, p in instances:
        bundle = laplacian(g, p)
        if bundle.omega.dim == 0:
            continue
        t1, t2 = 0.4, 1.3
        m1, m2 = heat_operator(g, p, t1).matrix, heat_operator(g, p, t2).matrix
        m12 = heat_operator(g, p, t1 + t2).matrix
        worst["semigroup"] = max(worst["semigroup"], float(np.max(np.abs(m12 - m1 @ m2))))
        worst["selfadj"] = max(worst["selfadj"], float(np.max(np.abs(m1 - m1.T))))
        u0 = bundle.embed(rng.standard_normal(bundle.omega.dim))
        lim = harmonic_limit(g, p, u0)
        gap = spectral_gap(g, p)
        resid0 = float(np.linalg.norm(u0.coeffs - lim.coeffs))
        prev = float(np.linalg.norm(u0.coeffs))
        for t in grid:
            ut = heat_operator(g, p, t).apply(u0)
            norm_t = float(np.linalg.norm(ut.coeffs))
            worst["monotone"] = max(worst["monotone"], norm_t - prev)
            prev = norm_t
            bound = math.exp(-gap * t) * resid0 if math.isfinite(gap) else 0.0
            dist = float(np.linalg.norm(ut.coeffs - lim.coeffs))
            worst["converge"] = max(worst["converge"], dist - bound)

    sc_dev = 0.0
    for g in (K2SYM, K3SYM, P3SYM):
        for t in (0.1, 1.0, 10.0):
            sc = stochastic_completeness(g, t)
            assert sc.applicable
            sc_dev = max(sc_dev, sc.row_sum_deviation)

    closed_form = 0.0
    f = Cochain(allowed_path_basis(K2SYM, 0), np.array([1.0, 0.0]))
    for t in grid:
        ut = heat_operator(K2SYM, 0, t).apply(f)
        expect = np.array([0.5 + 0.5 * math.exp(-4 * t), 0.5 - 0.5 * math.exp(-4 * t)])
        closed_form = max(closed_form, float(np.max(np.abs(ut.coeffs - expect))))

    passed = (
        worst["semigroup"] <= 1e-10
        and worst["selfadj"] <= 1e-12
        and worst["monotone"] <= 1e-12
        and worst["converge"] <= 1e-9
        and sc_dev <= 1e-10
        and closed_form <= 1e-10
    )
    report(4, "heat semigroup", passed,
           f"semigroup {worst['semigroup']:.1e}, decay slack {worst['converge']:.1e}, "
           f"row sums {sc_dev:.1e}, closed form {closed_form:.1e}")
    assert passed


def test_criterion_5_green():
    rng = np.random.default_rng(60)
    worst_identity = 0.0
    worst_orth = 0.0
    for g, p in ((K2SYM, 0), (K3SYM, 0), (K3SYM, 1), (P3SYM, 0)):
        bundle = laplacian(g, p)
        kernel = bundle.spectral.kernel_projector()
        for _ in range(25):
            f = bundle.embed(rng.standard_normal(bundle.omega.dim))
            c = bundle.to_frame(f)
            gc = bundle.to_frame(green_spectral(g, p, f))
            worst_identity = max(
                worst_identity, float(np.linalg.norm(bundle.delta @ gc - (c - kernel @ c)))
            )
            worst_orth = max(worst_orth, float(np.linalg.norm(kernel @ gc)))
    assert worst_identity <= 1e-10 and worst_orth <= 1e-10

    quad_ok = True
    details = []
    for g in (K2SYM, T3):
        basis = allowed_path_basis(g, 0)
        vec = np.zeros(len(basis))
        vec[0] = 1.0
        bundle = laplacian(g, 0)
        f = Cochain(basis, bundle.omega.project(vec))
        qg = green_quadrature(g, 0, f, t_max=10.0, n_steps=10_000)
        err = float(np.linalg.norm(qg.value.coeffs - green_spectral(g, 0, f).coeffs))
        details.append(f"err {err:.1e} vs bound {qg.tail_bound:.1e}")
        quad_ok = quad_ok and err <= qg.tail_bound + 1e-6
    passed = quad_ok
    report(5, "green operator", passed,
           f"identity {worst_identity:.1e}, orthogonality {worst_orth:.1e}; quadrature " + "; ".join(details))
    assert passed


def test_criterion_6_walk_operators():
    rng = np.random.default_rng(70)
    instances = [(T3, 1)]
    while len(instances) < 11:
        g = random_walk_digraph(rng)
        d = 1 if len(instances) % 3 else 2
        try:
            table = signed_neighbors(g, d)
        except Exception:
            continue
        if table.regular:
            instances.append((g, d))

    worst_dual = 0.0
    worst_spec = 0.0
    worst_agree = 0.0
    for g, d in instances:
        table = signed_neighbors(g, d)
        up = upper_laplacian(g, d)
        worst_dual = max(worst_dual, float(np.max(np.abs(up.matrix - upper_laplacian_explicit(g, d)))))
        eigs = upper_spectrum(g, d).eigenvalues
        m_bound = table.valence_bound
        worst_spec = max(worst_spec, float(-eigs.min()), float(eigs.max() - (m_bound + 1.0)))
        p = float(rng.uniform(0.2, 0.95))
        a_eigs = 1.0 - (1.0 - p) * eigs
        worst_spec = max(worst_spec, float(a_eigs.max() - 1.0),
                         float((p - m_bound * (1.0 - p)) - a_eigs.min()))
        start = table.basis.paths[int(rng.integers(0, table.n_paths))]
        proc = expectation_exact(g, d, start, 12, p)
        worst_agree = max(worst_agree, proc.agreement_residual)
        m_start = int(table.valences[table.basis.index[start]])
        assert proc.weighted_norms[0] == math.sqrt(1.0 / m_start)
        bound_base = abs(p - m_bound * (1.0 - p))
        for n, nv in enumerate(proc.weighted_norms):
            assert nv <= max(bound_base ** n, 1.0) + 1e-12

    # lower bound, whenever a witness exists
    witnessed = 0
    for g, d, v in ((K2SYM, 1, (0, 1)), (P3SYM, 1, (0, 1)), (P3SYM, 1, (1, 2))):
        w = witness_lower_bound(g, d, v)
        if w.witnessed:
            witnessed += 1
            proc = expectation_exact(g, d, v, 15, 0.6)
            assert min(proc.weighted_norms) >= 1.0 / w.constant - 1e-12
    assert witnessed >= 2

    # convergence to the kernel projection at the subdominant rate
    res = expectation_limit(T3, 1, (0, 1), 0.5)
    proc = expectation_exact(T3, 1, (0, 1), 16, 0.5)
    resids = [proc.table.weighted_norm(f - res.limit.coeffs) for f in proc.forms]
    ns = np.arange(2, 15)
    slope = float(np.polyfit(ns, np.log([resids[n] for n in ns]), 1)[0])
    rate_err = abs(math.exp(slope) - res.subdominant) / res.subdominant

    passed = (
        worst_dual <= 1e-10 and worst_spec <= 1e-9 and worst_agree <= 1e-10 and rate_err <= 0.05
    )
    report(6, "walk operators", passed,
           f"dual {worst_dual:.1e}, spectra slack {worst_spec:.1e}, "
           f"kernel-vs-form {worst_agree:.1e}, rate error {rate_err:.1%}, "
           f"lower bound witnessed on {witnessed} instances")
    assert passed


def test_criterion_7_monte_carlo(tmp_path):
    exact = expectation_exact(T3, 1, (0, 1), 20, 0.5)
    mc = expectation_mc(T3, 1, (0, 1), 20, 0.5, samples=100_000, seed=90)
    sigma = mc_exact_max_sigma(mc, exact)

    rerun = expectation_mc(T3, 1, (0, 1), 20, 0.5, samples=100_000, seed=90)
    identical = bool(np.array_equal(mc.counts, rerun.counts))

    # thread-count independence at the command level
    from pathlap.cli import RunConfig, run

    graph_file = tmp_path / "t3.txt"
    graph_file.write_text("0 1\n1 2\n2 0\n")
    outputs = []
    for threads in (1, 4):
        config = RunConfig(
            command="walk", input_path=str(graph_file), d=1, lazy=0.5, steps=10,
            samples=20_000, seed=5, mode="both", output_format="csv", threads=threads,
        )
        rep, code = run(config)
        assert code == 0
        outputs.append(rep.to_csv())
    thread_independent = outputs[0] == outputs[1]

    passed = sigma <= 4.0 and identical and thread_independent
    report(7, "monte carlo", passed,
           f"max deviation {sigma:.2f} sigma at 1e5 samples; reruns bit-identical: {identical}; "
           f"thread-count independent: {thread_independent}")
    assert passed
