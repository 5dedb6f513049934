import itertools

import numpy as np
import pytest

from csvqe.bench import EXAMPLE_NC, example_hamiltonian
from csvqe.errors import InvariantError
from csvqe.heuristics import (
    SweepContext,
    generator_weights,
    greedy_pair_sweep,
    optimal_sweep,
    remove_generators,
    retained_for_qubits,
    run_sweep,
    weight_sweep,
)
from csvqe.io import bundled
from csvqe.oracle import exact_ground_energy
from csvqe.pauli import Hamiltonian, PauliOperator
from csvqe.pipeline import solve_classical
from strategies import random_hamiltonian

TOL = 1e-9


def context(h, nc_terms=None, dense_limit=14):
    cl = solve_classical(h, nc_terms=nc_terms)
    return SweepContext(h, cl.model, cl.state, exact_ground_energy(h), dense_limit), cl


def example_ctx(seed=0):
    h = example_hamiltonian(np.random.default_rng(seed).uniform(-1, 1, 14))
    return context(h, [PauliOperator.from_label(s) for s in EXAMPLE_NC])


def check_sweep(sweep, ctx, cl):
    recs = sweep.records
    assert not recs[0].corrected and recs[0].quantum_qubits == 0
    assert recs[0].energy == pytest.approx(cl.nc_energy, abs=TOL)
    assert recs[-1].energy == pytest.approx(ctx.exact_energy, abs=TOL)
    assert recs[-1].retained_generators == () and not recs[-1].constrained
    for a, b in zip(recs, recs[1:]):
        assert b.energy <= a.energy + TOL
        assert b.quantum_qubits >= a.quantum_qubits
        assert set(b.retained_generators) <= set(a.retained_generators)
    for r in recs:
        assert r.error_vs_exact >= -TOL
        if r.corrected:
            assert r.quantum_qubits == ctx.model.n - len(r.retained_generators)


class TestRemoveGenerators:
    def test_identity_and_full(self):
        ctx, cl = example_ctx()
        p = ctx.problem(ctx.all_generators)
        assert remove_generators(ctx, p, []) is p
        full = remove_generators(ctx, p, ctx.all_generators)
        assert full.n_free == ctx.h.n and full.a_restricted is None

    def test_unretained(self):
        ctx, _ = example_ctx()
        p = ctx.problem([])
        with pytest.raises(InvariantError):
            remove_generators(ctx, p, [0])

    def test_example_drop_migrates_z_terms(self):
        ctx, cl = example_ctx()
        p = remove_generators(ctx, ctx.problem([0]), [0])
        assert p.n_free == 3
        # every noncontextual term with a Z on qubit 0 now sits in the quantum problem
        migrated = {q for q in cl.decomposition.nc_terms if q.letter(0) == "Z"}
        assert migrated and all(q in p.rotated_h for q in migrated)
        assert p.contextual_source_count == len(cl.decomposition.contextual_terms) + len(cl.decomposition.nc_terms)

    def test_partition_preserved(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            h = random_hamiltonian(rng, 5, 18)
            ctx, _ = context(h)
            g = ctx.model.n_generators
            if g < 2:
                continue
            p = ctx.problem(ctx.all_generators)
            drop = {0, g - 1}
            p2 = remove_generators(ctx, p, drop)
            assert p2.n_free == p.n_free + len(drop)
            assert sorted(list(p2.generator_assignments) + list(p2.free_qubits)) == list(range(h.n))


class TestSweeps:
    @pytest.mark.parametrize("heuristic", ["greedy-pair", "optimal", "weight"])
    def test_example(self, heuristic):
        ctx, cl = example_ctx(1)
        check_sweep(run_sweep(ctx, heuristic), ctx, cl)

    def test_random(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            h = random_hamiltonian(rng, int(rng.integers(3, 6)), 20)
            ctx, cl = context(h)
            for sweep in (greedy_pair_sweep(ctx), optimal_sweep(ctx), weight_sweep(ctx), weight_sweep(ctx, "count")):
                check_sweep(sweep, ctx, cl)

    def test_endpoints_shared(self):
        ctx, _ = example_ctx(2)
        a, b, c = greedy_pair_sweep(ctx), optimal_sweep(ctx), weight_sweep(ctx)
        assert a[0] == b[0] == c[0] and a[-1] == b[-1] == c[-1]

    def test_example_heuristics_agree_at_two_qubits(self):
        for seed in range(10):
            ctx, _ = example_ctx(seed)
            pick = [next(r for r in s if r.corrected and r.quantum_qubits == 2)
                    for s in (greedy_pair_sweep(ctx), optimal_sweep(ctx))]
            assert pick[0].energy == pick[1].energy

    def test_greedy_pair_steps_by_two(self):
        rng = np.random.default_rng(3)
        h = random_hamiltonian(rng, 6, 20)
        ctx, _ = context(h)
        recs = greedy_pair_sweep(ctx).corrected_records
        sizes = [r.quantum_qubits for r in recs]
        steps = [b - a for a, b in zip(sizes, sizes[1:])]
        assert all(s in (0, 1, 2) for s in steps)
        assert steps.count(1) <= 1

    def test_greedy_pair_picks_best_pair(self):
        rng = np.random.default_rng(4)
        h = random_hamiltonian(rng, 5, 20)
        ctx, _ = context(h)
        g = ctx.all_generators
        if len(g) < 2:
            pytest.skip("needs two generators")
        sweep = greedy_pair_sweep(ctx)
        energies = {pr: ctx.energy(g - set(pr)) for pr in itertools.combinations(sorted(g), 2)}
        assert sweep.records[2].energy == pytest.approx(min(energies.values()))

    def test_optimal_matches_brute_force_ordering_on_small_cases(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            h = random_hamiltonian(rng, 4, 16)
            ctx, _ = context(h)
            g = sorted(ctx.all_generators)
            best = {}
            for k in range(len(g) + 1):
                best[k] = min(ctx.energy(set(c)) for c in itertools.combinations(g, k))
            for r in optimal_sweep(ctx).corrected_records:
                if r.retained_generators or not r.constrained:
                    assert r.energy >= best[len(r.retained_generators)] - TOL

    def test_weight_order_is_permutation(self):
        ctx, _ = context(bundled("h2_like").hamiltonian)
        s = weight_sweep(ctx)
        assert sorted(s.order) == sorted(ctx.all_generators)
        w = generator_weights(ctx)
        assert [w[j] for j in s.order] == sorted(w, reverse=True)
        with pytest.raises(ValueError):
            generator_weights(ctx, "mass")

    def test_truncation(self):
        ctx, _ = example_ctx()
        ctx.dense_limit = 2
        s = greedy_pair_sweep(ctx)
        assert s.truncated_at == 3 and s.records[-1].quantum_qubits == 2

    def test_retained_for_qubits(self):
        ctx, _ = example_ctx()
        s = optimal_sweep(ctx)
        assert retained_for_qubits(s, 2) == (0,)
        with pytest.raises(InvariantError):
            retained_for_qubits(s, 7)

    def test_unknown_heuristic(self):
        ctx, _ = example_ctx()
        with pytest.raises(ValueError):
            run_sweep(ctx, "random")

    def test_no_generators_keeps_both_full_register_records(self):
        h = Hamiltonian.from_labels({"XI": 0.5, "ZI": -0.4, "IX": 0.3, "IZ": 0.2})
        ctx, cl = context(h)
        s = greedy_pair_sweep(ctx)
        if ctx.model.n_generators == 0 and ctx.model.n_cliques:
            assert [r.constrained for r in s.corrected_records] == [True, False]
        check_sweep(s, ctx, cl)
