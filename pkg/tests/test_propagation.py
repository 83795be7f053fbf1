import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from nhbounds import (
    DensityOperator,
    LindbladModel,
    NonHermitianModel,
    StateVector,
    evolve_density_nonhermitian,
    evolve_lindblad,
    evolve_nonhermitian,
    kraus_operators,
    kraus_step,
    liouvillian,
    make_classical,
    make_dephasing,
    make_refrigerator,
    no_jump_heff_std,
    no_jump_state,
    propagator,
    propagator_with_error,
    pure_density,
    purify,
    random_commuting,
    random_density,
)
from nhbounds import linalg
from nhbounds.errors import NonPositiveGamma, NormUnderflow, StepTooLarge
from nhbounds.models import ClassicalMarkovModel
from conftest import SX, SZ, expm_2x2, tree_product


def lindblad_rhs_oracle(model, rho):
    """Direct master-equation right-hand side, independent of the Liouvillian."""
    h = model.h_s
    out = -1j * (h @ rho - rho @ h)
    for l in model.jumps:
        ldl = l.conj().T @ l
        out += l @ rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def lindblad_ode_oracle(model, rho0, t):
    """Integrate the master equation with solve_ivp at tight tolerance."""
    d = model.dim

    def rhs(_t, x):
        rho = (x[: d * d] + 1j * x[d * d :]).reshape(d, d)
        drho = lindblad_rhs_oracle(model, rho).reshape(-1)
        return np.concatenate([drho.real, drho.imag])

    x0 = np.concatenate([rho0.reshape(-1).real, rho0.reshape(-1).imag])
    sol = solve_ivp(rhs, (0.0, t), x0, rtol=1e-11, atol=1e-13)
    return (sol.y[: d * d, -1] + 1j * sol.y[d * d :, -1]).reshape(d, d)


class TestModelTypes:
    def test_gamma_must_be_psd(self):
        with pytest.raises(NonPositiveGamma):
            NonHermitianModel(np.eye(2), np.diag([1.0, -0.5]))

    def test_effective_hamiltonian(self):
        model = make_dephasing(1.0)
        assert np.allclose(model.jump_rate_operator(), np.eye(2))
        assert np.allclose(model.effective_hamiltonian(), -0.5j * np.eye(2))

    def test_no_jump_model_equivalence(self, two_level_lindblad):
        nh = two_level_lindblad.no_jump_model()
        assert np.allclose(
            nh.full_generator(), two_level_lindblad.effective_hamiltonian()
        )


class TestEvolveNonHermitian:
    def test_unitary_limit_preserves_norm(self):
        rng = np.random.default_rng(2)
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        model = NonHermitianModel(0.5 * (h + h.conj().T), np.zeros((3, 3)))
        psi0 = StateVector(np.array([1.0, 0.0, 0.0]))
        out = evolve_nonhermitian(model, psi0, 2.5)
        assert abs(out.norm - 1.0) <= 1e-10

    def test_diagonal_closed_form(self, two_level_model, plus_state):
        out = evolve_nonhermitian(two_level_model, plus_state, 0.5)
        want = np.array([1.0, np.exp(-0.5j - 0.25)]) / np.sqrt(2.0)
        assert np.max(np.abs(out.amplitudes - want)) <= 1e-12
        assert out.norm == pytest.approx(np.sqrt((1 + np.exp(-0.5)) / 2.0), abs=1e-12)
        assert out.norm == pytest.approx(0.896251, abs=1e-6)

    def test_norm_underflow(self):
        model = NonHermitianModel(np.zeros((2, 2)), np.diag([40.0, 40.0]))
        with pytest.raises(NormUnderflow):
            evolve_nonhermitian(model, StateVector(np.array([1.0, 0.0])), 1.0)

    def test_time_dependent_vs_product_oracle(self):
        def parts(t):
            h = 0.4 * math.cos(1.3 * t) * SX + 0.3 * SZ
            g = 0.25 * (1.0 + 0.5 * math.sin(0.7 * t)) * np.diag([0.0, 1.0])
            return h, g.astype(complex)

        model = NonHermitianModel(*parts(0.0), time_dependence=parts)
        t_final = 0.5
        n = 50_000
        dt = t_final / n
        mids = (np.arange(n) + 0.5) * dt
        gens = np.stack([-1j * dt * (parts(s)[0] - 1j * parts(s)[1]) for s in mids])
        oracle = tree_product(expm_2x2(gens))
        got = propagator(model, t_final, steps=1000)
        assert np.max(np.abs(got - oracle)) <= 1e-6

    def test_richardson_estimate_bounds_error(self):
        def parts(t):
            h = 0.5 * math.sin(t) * SX
            g = 0.2 * (1 + math.cos(t) ** 2) * np.diag([1.0, 0.0])
            return h, g.astype(complex)

        model = NonHermitianModel(*parts(0.0), time_dependence=parts)
        got, est = propagator_with_error(model, 1.0, steps=400)
        n = 100_000
        dt = 1.0 / n
        mids = (np.arange(n) + 0.5) * dt
        gens = np.stack([-1j * dt * (parts(s)[0] - 1j * parts(s)[1]) for s in mids])
        truth = tree_product(expm_2x2(gens))
        assert np.max(np.abs(got - truth)) <= est + 1e-12


class TestEvolveDensityNonHermitian:
    def test_unitary_conjugation(self):
        model = NonHermitianModel(SZ, np.zeros((2, 2)))
        rho0 = random_density(2, 3)
        out = evolve_density_nonhermitian(model, rho0, 1.2)
        assert out.trace() == pytest.approx(1.0, abs=1e-12)
        u = linalg.expm(-1.2j * SZ)
        assert np.max(np.abs(out.matrix - u @ rho0.matrix @ u.conj().T)) <= 1e-12

    def test_pure_state_consistency(self, two_level_model, plus_state):
        psi_t = evolve_nonhermitian(two_level_model, plus_state, 0.7)
        rho_t = evolve_density_nonhermitian(
            two_level_model, pure_density(plus_state), 0.7
        )
        outer = np.outer(psi_t.amplitudes, psi_t.amplitudes.conj())
        assert np.max(np.abs(rho_t.matrix - outer)) <= 1e-10

    def test_purification_route(self, two_level_model):
        rho0 = random_density(2, 8)
        t = 0.6
        direct = evolve_density_nonhermitian(two_level_model, rho0, t)
        psi = purify(rho0)
        da = psi.layout[1]
        big = NonHermitianModel(
            linalg.kron(two_level_model.h, np.eye(da)),
            linalg.kron(two_level_model.gamma, np.eye(da)),
        )
        evolved = propagator(big, t) @ psi.amplitudes
        lifted = np.outer(evolved, evolved.conj())
        traced = linalg.partial_trace(lifted, psi.layout, "S")
        assert np.max(np.abs(traced - direct.matrix)) <= 1e-9

    def test_norm_monotone_for_commuting_models(self):
        for seed in range(5):
            model = random_commuting(4, seed, gamma_scale=0.8)
            psi0 = StateVector(np.ones(4) / 2.0)
            norms = [
                evolve_nonhermitian(model, psi0, t).norm
                for t in np.linspace(0.0, 2.0, 21)[1:]
            ]
            assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


class TestEvolveLindblad:
    def test_all_jumps_zero_is_unitary(self):
        model = LindbladModel(SZ, ())
        rho0 = random_density(2, 5)
        out = evolve_lindblad(model, rho0, 0.8)
        u = linalg.expm(-0.8j * SZ)
        assert np.max(np.abs(out.matrix - u @ rho0.matrix @ u.conj().T)) <= 1e-12

    def test_dephasing_closed_form_and_ode_oracle(self):
        gamma = 1.0
        model = make_dephasing(gamma)
        rho0 = DensityOperator(np.array([[0.5, 0.5], [0.5, 0.5]]))
        for t in (0.3, 1.0):
            out = evolve_lindblad(model, rho0, t)
            # coherence decays at rate 2*gamma in this normalization
            assert out.matrix[0, 1] == pytest.approx(0.5 * np.exp(-2 * gamma * t), abs=1e-10)
            oracle = lindblad_ode_oracle(model, rho0.matrix, t)
            assert np.max(np.abs(out.matrix - oracle)) <= 1e-8

    def test_refrigerator_vs_ode_oracle(self):
        model = make_refrigerator(1.0, 1.0, 0.5, 1.0, 2.0, 0.7)
        amp = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        rho0 = pure_density(StateVector(amp))
        out = evolve_lindblad(model, rho0, 0.4)
        oracle = lindblad_ode_oracle(model, rho0.matrix, 0.4)
        assert np.max(np.abs(out.matrix - oracle)) <= 1e-8
        assert out.trace() == pytest.approx(1.0, abs=1e-8)

    def test_classical_embedding_matches_classical_ode(self):
        chain = ClassicalMarkovModel(
            np.array([[0.0, 1.0, 0.2], [0.5, 0.0, 0.9], [0.4, 0.3, 0.0]]),
            np.array([0.6, 0.3, 0.1]),
        )
        model = make_classical(chain)
        rho0 = DensityOperator(np.diag(chain.p0).astype(complex))
        for t in (0.5, 1.5):
            out = evolve_lindblad(model, rho0, t)
            p_t = chain.propagate(t)
            assert np.max(np.abs(np.diagonal(out.matrix).real - p_t)) <= 1e-8
            off = out.matrix - np.diag(np.diagonal(out.matrix))
            assert linalg.max_abs(off) <= 1e-10


class TestKrausStep:
    def test_small_dt_limit(self, two_level_lindblad):
        rho0 = random_density(2, 6)
        dt = 1e-5
        out = kraus_step(two_level_lindblad, rho0, dt)
        assert np.max(np.abs(out.matrix - rho0.matrix)) <= 10 * dt
        assert abs(out.trace() - 1.0) <= 10 * dt**2

    def test_completeness_residue(self, two_level_lindblad):
        dt = 1e-3
        ops = kraus_operators(two_level_lindblad, dt)
        total = sum(v.conj().T @ v for v in ops)
        assert linalg.max_abs(total - np.eye(2)) <= 10 * dt**2

    def test_dephasing_one_step_off_diagonal(self):
        # exact one-step factor (1 - gamma dt / 2)^2 - gamma dt = 1 - 2 gamma dt + O(dt^2)
        gamma, dt = 1.0, 1e-3
        model = make_dephasing(gamma)
        rho0 = DensityOperator(np.array([[0.5, 0.5], [0.5, 0.5]]))
        out = kraus_step(model, rho0, dt)
        exact = (1.0 - 0.5 * gamma * dt) ** 2 - gamma * dt
        assert out.matrix[0, 1].real == pytest.approx(0.5 * exact, abs=1e-15)
        q = gamma * dt
        assert out.matrix[0, 1].real == pytest.approx(0.5 * (1.0 - 2.0 * q), abs=dt**2)

    def test_repeated_steps_converge_to_lindblad(self, two_level_lindblad):
        rho0 = random_density(2, 7)
        t, k = 0.5, 1000
        dt = t / k
        rho = rho0
        for _ in range(k):
            rho = DensityOperator(
                kraus_step(two_level_lindblad, rho, dt).matrix, trace_normalized=False
            )
        exact = evolve_lindblad(two_level_lindblad, rho0, t)
        assert np.max(np.abs(rho.matrix - exact.matrix)) <= 20 * dt

    def test_step_too_large(self, two_level_lindblad):
        with pytest.raises(StepTooLarge):
            kraus_step(two_level_lindblad, random_density(2, 8), 0.5)


class TestNoJumpState:
    def test_no_jumps_is_unitary_weight_one(self):
        model = LindbladModel(SZ, ())
        rho0 = random_density(2, 9)
        cond = no_jump_state(model, rho0, 1.1)
        assert cond.weight == pytest.approx(1.0, abs=1e-12)
        u = linalg.expm(-1.1j * SZ)
        assert np.max(np.abs(cond.state.matrix - u @ rho0.matrix @ u.conj().T)) <= 1e-12

    def test_dephasing_scalar_form(self):
        gamma, t = 1.0, 0.7
        model = make_dephasing(gamma)
        rho0 = random_density(2, 10)
        cond = no_jump_state(model, rho0, t)
        assert cond.weight == pytest.approx(np.exp(-gamma * t), abs=1e-12)
        assert np.max(np.abs(cond.state.matrix - rho0.matrix)) <= 1e-12

    def test_weight_equals_branch_norm_for_pure_states(self, two_level_lindblad):
        psi0 = StateVector(np.array([1.0, 1.0]) / np.sqrt(2.0))
        t = 0.8
        cond = no_jump_state(two_level_lindblad, pure_density(psi0), t)
        branch = linalg.expm(-1j * t * two_level_lindblad.effective_hamiltonian()) @ psi0.amplitudes
        assert cond.weight == pytest.approx(float(np.vdot(branch, branch).real), abs=1e-10)

    def test_refrigerator_vs_expm_oracle(self):
        model = make_refrigerator(0.8, 1.0, 1.0, 1.2, 0.9, 1.1)
        rho0 = random_density(3, 11)
        t = 0.5
        cond = no_jump_state(model, rho0, t)
        m = linalg.expm(-1j * t * model.effective_hamiltonian())
        raw = m @ rho0.matrix @ m.conj().T
        z = np.trace(raw).real
        assert np.max(np.abs(cond.state.matrix - raw / z)) <= 1e-10
        assert cond.weight == pytest.approx(z, abs=1e-10)

    def test_weight_underflow(self):
        model = make_dephasing(1.0)
        with pytest.raises(NormUnderflow):
            no_jump_state(model, random_density(2, 12), 40.0)

    def test_weight_decreasing(self, two_level_lindblad):
        rho0 = random_density(2, 13)
        weights = [no_jump_state(two_level_lindblad, rho0, t).weight for t in np.linspace(0, 2, 9)]
        assert all(b <= a + 1e-12 for a, b in zip(weights, weights[1:]))


class TestNoJumpHeffStd:
    def test_scalar_effective_hamiltonian(self):
        model = make_dephasing(1.0)
        assert no_jump_heff_std(model, random_density(2, 14), 0.5) == pytest.approx(0.0, abs=1e-7)

    def test_constant_times_identity(self):
        model = LindbladModel(2.5 * np.eye(2), ())
        assert no_jump_heff_std(model, random_density(2, 15), 0.3) == pytest.approx(0.0, abs=1e-7)

    def test_two_level_closed_form(self, two_level_lindblad):
        psi0 = StateVector(np.array([1.0, 1.0]) / np.sqrt(2.0))
        got = no_jump_heff_std(two_level_lindblad, pure_density(psi0), 0.0)
        assert got == pytest.approx(np.sqrt(0.3125), abs=1e-12)


def test_liouvillian_action_matches_rhs(two_level_lindblad):
    rho = random_density(2, 16).matrix
    lv = liouvillian(two_level_lindblad)
    got = (lv @ rho.reshape(-1)).reshape(2, 2)
    want = lindblad_rhs_oracle(two_level_lindblad, rho)
    assert np.max(np.abs(got - want)) <= 1e-13
