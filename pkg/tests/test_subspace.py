
import numpy as np
import pytest

from csvqe.bench import EXAMPLE_C, EXAMPLE_NC, example_hamiltonian
from csvqe.errors import DimensionError, InvariantError, ResourceError
from csvqe.oracle import exact_ground_energy
from csvqe.pauli import Hamiltonian, PauliOperator, to_dense_matrix
from csvqe.pipeline import solve_classical
from csvqe.subspace import (
    build_problem,
    constrained_basis,
    restrict,
    restrict_pauli,
    solve,
    zero_expectation_witness,
)
from strategies import random_hamiltonian, random_noncontextual, random_state


def example(seed=0):
    rng = np.random.default_rng(seed)
    h = example_hamiltonian(rng.uniform(-1, 1, 14))
    cl = solve_classical(h, nc_terms=[PauliOperator.from_label(s) for s in EXAMPLE_NC])
    return h, cl


class TestRestrict:
    def test_contextual_example(self):
        h = Hamiltonian.from_labels({"IIX": 0.1, "IIY": 0.2, "IIZ": 0.3})
        h2, const = restrict(h, {0: -1})
        assert h2.to_labels() == {"IX": 0.1, "IY": 0.2, "IZ": 0.3} and const == 0.0

    def test_z_term_becomes_constant(self):
        h2, const = restrict(Hamiltonian.from_labels({"ZII": 0.7}), {0: 1})
        assert len(h2) == 0 and const == pytest.approx(0.7)
        _, const = restrict(Hamiltonian.from_labels({"ZII": 0.7}), {0: -1})
        assert const == pytest.approx(-0.7)

    def test_flip_dropped(self):
        assert restrict_pauli(PauliOperator.from_label("XII"), {0: 1}, (1, 2)) is None

    def test_merging(self):
        h2, _ = restrict(Hamiltonian.from_labels({"ZX": 0.5, "IX": 0.25}), {0: -1})
        assert h2.to_labels() == {"X": -0.25}

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            restrict(Hamiltonian.from_labels({"ZZ": 1.0}), {2: 1})
        with pytest.raises(InvariantError):
            restrict(Hamiltonian.from_labels({"ZZ": 1.0}), {0: 0})

    def test_matches_dense_on_product_states(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            h = random_hamiltonian(rng, n, 15)
            fixed = sorted(rng.choice(n, int(rng.integers(1, n)), replace=False).tolist())
            values = {k: int(rng.choice([-1, 1])) for k in fixed}
            free = [k for k in range(n) if k not in values]
            h2, const = restrict(h, values)
            phi = random_state(rng, 1 << len(free))
            # place phi on the free qubits with the fixed qubits in their Z eigenstates
            full = np.zeros(1 << n, dtype=complex)
            for idx, amp in enumerate(phi):
                j = 0
                for k in range(n):
                    if k in values:
                        bit = 0 if values[k] > 0 else 1
                    else:
                        bit = (idx >> (len(free) - 1 - free.index(k))) & 1
                    j = (j << 1) | bit
                full[j] = amp
            want = np.vdot(full, to_dense_matrix(h) @ full).real
            got = np.vdot(phi, to_dense_matrix(h2) @ phi).real + const
            assert got == pytest.approx(want, abs=1e-10)


class TestBuildProblem:
    def test_example_clique_operator(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        assert p.n_free == 2 and p.free_qubits == (1, 2)
        r = cl.state.r
        assert p.a_restricted.allclose(Hamiltonian.from_labels(dict(zip(["XI", "YI", "ZX", "ZY", "ZZ"], r))))
        m = to_dense_matrix(p.a_restricted)
        np.testing.assert_allclose(m @ m, np.eye(4), atol=1e-10)

    def test_partition_of_qubits(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            h = random_hamiltonian(rng, int(rng.integers(2, 6)), 15)
            cl = solve_classical(h)
            p = build_problem(h, cl.model, cl.state)
            assert sorted(list(p.generator_assignments) + list(p.free_qubits)) == list(range(h.n))
            assert p.n_free == h.n - cl.model.n_generators

    def test_empty_retained_is_full_problem(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state, retained=[])
        assert p.a_restricted is None and p.restricted_h.allclose(h)
        assert solve(p) == pytest.approx(exact_ground_energy(h), abs=1e-9)

    def test_bad_retained(self):
        h, cl = example()
        with pytest.raises(InvariantError):
            build_problem(h, cl.model, cl.state, retained=[3])

    def test_serialisable(self):
        import json

        h, cl = example()
        json.dumps(build_problem(h, cl.model, cl.state).to_dict())


class TestSolve:
    def test_noncontextual_hamiltonian_gives_nc_energy(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            h = random_noncontextual(rng, 4, 2, 3, 10)
            cl = solve_classical(h)
            p = build_problem(h, cl.model, cl.state, constrain_at_endpoint=True)
            assert solve(p) == pytest.approx(cl.nc_energy, abs=1e-9)

    def test_bounds_and_methods_agree(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            h = random_hamiltonian(rng, int(rng.integers(2, 6)), 18)
            cl = solve_classical(h)
            p = build_problem(h, cl.model, cl.state, constrain_at_endpoint=True)
            e = solve(p, method="project")
            if p.a_restricted is not None:
                assert solve(p, method="rotate") == pytest.approx(e, abs=1e-9)
            assert e <= cl.nc_energy + 1e-9
            assert e >= exact_ground_energy(h) - 1e-9

    def test_single_term_clique_operator_keeps_its_sign(self):
        import dataclasses

        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        for coef in (1.0, -1.0):
            q = dataclasses.replace(p, a_restricted=Hamiltonian.from_labels({"ZX": coef}))
            assert solve(q, method="rotate") == pytest.approx(solve(q, method="project"), abs=1e-12)

    def test_eigenspace_dimension(self):
        h, cl = example(3)
        p = build_problem(h, cl.model, cl.state)
        assert constrained_basis(p.a_restricted).shape == (4, 2)

    def test_dense_limit(self):
        h, cl = example()
        with pytest.raises(ResourceError):
            solve(build_problem(h, cl.model, cl.state, retained=[]), dense_limit=2)

    def test_unknown_method(self):
        h, cl = example()
        with pytest.raises(ValueError):
            solve(build_problem(h, cl.model, cl.state), method="magic")


class TestWitness:
    def test_example(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        w = zero_expectation_witness(p, [PauliOperator.from_label(s) for s in EXAMPLE_C])
        assert w.objective < 1e-8
        rho = w.full_density()
        assert np.trace(rho).real == pytest.approx(1.0)
        for s in EXAMPLE_C:
            assert abs(np.trace(to_dense_matrix(PauliOperator.from_label(s)) @ rho)) < 1e-4
        # consistent with the noncontextual state: same nc energy
        nc = cl.decomposition.nc_hamiltonian()
        assert np.trace(to_dense_matrix(nc) @ rho).real == pytest.approx(cl.nc_energy, abs=1e-9)

    def test_pure_states_cannot_always_null_the_example(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        with pytest.raises(ResourceError):
            zero_expectation_witness(p, [PauliOperator.from_label(s) for s in EXAMPLE_C], pure=True, restarts=3)

    def test_each_operator_alone_has_a_pure_witness(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        for s in EXAMPLE_C:
            w = zero_expectation_witness(p, [PauliOperator.from_label(s)], pure=True)
            assert w.rank == 1 and w.objective < 1e-8

    def test_empty_set(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        w = zero_expectation_witness(p, [])
        assert w.objective == 0.0 and w.n_constrained_terms == 0

    def test_anticommuting_with_every_rep(self):
        h, cl = example()
        p = build_problem(h, cl.model, cl.state)
        # XII anticommutes with the stabiliser ZII, so every subspace state gives zero
        w = zero_expectation_witness(p, [PauliOperator.from_label("XII")], pure=True)
        assert w.n_constrained_terms == 0
