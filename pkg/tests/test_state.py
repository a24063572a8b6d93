import numpy as np
import pytest

from ifmsim.errors import BasisError, NormalizationError, RegisterError
from ifmsim.matter import atom_register
from ifmsim.optics import CIRCULAR_BASIS, photon_input, photon_register
from ifmsim.scenario import canned, evolve
from ifmsim.measurement import measure
from ifmsim.state import (
    DensityMatrix,
    JointState,
    Register,
    apply_map,
    check_density,
    norm,
    normalize,
    partial_trace,
    pruning,
    reduced_state,
    tensor,
    to_density,
)

from conftest import R2, random_photon_atom_state, random_unitary


def test_unknown_label_rejected():
    with pytest.raises(BasisError):
        JointState.from_amplitudes([atom_register("a")], {("e",): 1})


def test_label_tuple_width_checked():
    with pytest.raises(BasisError):
        JointState.from_amplitudes([atom_register("a")], {("m+", "m-"): 1})


def test_pruning_drops_tiny_amplitudes():
    s = JointState.from_amplitudes([atom_register("a")], {("m+",): 1, ("m-",): 1e-16})
    assert list(s.amplitudes) == [("m+",)]
    with pruning(0.0):
        s = JointState.from_amplitudes([atom_register("a")], {("m+",): 1, ("m-",): 1e-16})
    assert len(s) == 2


class TestTensor:
    def test_photon_times_atom(self, equal_superposition):
        s = tensor(photon_input("lower", "sigma+"), equal_superposition)
        assert dict(s.amplitudes) == pytest.approx({("l+", "m+"): R2, ("l+", "m-"): R2})

    def test_single_basis_factor_appends_label(self, equal_superposition):
        s = tensor(equal_superposition, JointState.basis_state(atom_register("b"), "g"))
        assert dict(s.amplitudes) == pytest.approx({("m+", "g"): R2, ("m-", "g"): R2})

    def test_bell_times_linear_photon(self, bell):
        # hand expansion: (l- - l+)/sqrt2 x (|-+> + |+->)/sqrt2 gives four +-1/2 terms
        s = tensor(photon_input("lower", "x"), bell)
        expected = {
            ("l-", "m-", "m+"): 0.5, ("l-", "m+", "m-"): 0.5,
            ("l+", "m-", "m+"): -0.5, ("l+", "m+", "m-"): -0.5,
        }
        assert dict(s.amplitudes) == pytest.approx(expected, abs=1e-15)
        # cross-check with a dense kron
        dense = np.kron(photon_input("lower", "x").to_vector(), bell.to_vector())
        np.testing.assert_allclose(s.to_vector(), dense, atol=1e-15)

    def test_norm_multiplies(self, rng):
        a = random_photon_atom_state(rng).scaled(0.7)
        b = JointState.from_amplitudes([atom_register("z")], {("m+",): 0.3, ("g",): 0.4j})
        assert norm(tensor(a, b)) == pytest.approx(norm(a) * norm(b), abs=1e-14)

    def test_duplicate_register(self, equal_superposition):
        with pytest.raises(RegisterError):
            tensor(equal_superposition, equal_superposition)


class TestApplyMap:
    def test_identity(self, rng):
        s = random_photon_atom_state(rng)
        out = apply_map(s, "photon", np.eye(8))
        np.testing.assert_allclose(out.to_vector(), s.to_vector(), atol=0)

    def test_beam_splitter_row(self):
        bs = np.eye(8, dtype=complex)
        bs[np.ix_([0, 2], [0, 2])] = R2 * np.array([[1j, 1], [1, 1j]])
        out = apply_map(photon_input("lower", "sigma+"), "photon", bs)
        assert dict(out.amplitudes) == pytest.approx({("u+",): R2, ("l+",): 1j * R2})

    def test_absorption_rule_preserves_amplitude(self):
        s = JointState.from_amplitudes([photon_register(), atom_register("a")], {("l+", "m+"): 0.6j})
        out = apply_map(s, ("photon", "a"), {("l+", "m+"): {("S+", "g"): 1}})
        assert dict(out.amplitudes) == {("S+", "g"): 0.6j}

    def test_rectangular_embedding(self):
        small = Register("photon", ("l+", "l-"))
        s = JointState.from_amplitudes([small], {("l+",): 0.6, ("l-",): 0.8})
        embed = np.zeros((8, 2))
        embed[2, 0] = embed[3, 1] = 1
        out = apply_map(s, "photon", embed, basis_in=["l+", "l-"], basis_out=CIRCULAR_BASIS)
        assert out.register("photon").basis == CIRCULAR_BASIS
        assert norm(out) == pytest.approx(1, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(BasisError):
            apply_map(photon_input("lower", "x"), "photon", np.eye(4))

    def test_component_outside_map_basis(self):
        with pytest.raises(BasisError):
            apply_map(photon_input("lower", "x"), "photon", np.eye(2), basis_in=["u+", "u-"])

    def test_linearity(self, rng):
        u = random_unitary(rng, 8)
        a, b = random_photon_atom_state(rng), random_photon_atom_state(rng)
        alpha, beta = 0.3 - 0.2j, 1.1j
        lhs = apply_map(alpha * a + beta * b, "photon", u)
        rhs = alpha * apply_map(a, "photon", u) + beta * apply_map(b, "photon", u)
        np.testing.assert_allclose(lhs.to_vector(), rhs.to_vector(), atol=1e-13)

    def test_unitaries_preserve_norm_1000_states(self, rng):
        worst = 0.0
        for _ in range(1000):
            s = random_photon_atom_state(rng)
            reg = "photon" if rng.random() < 0.5 else "a0"
            u = random_unitary(rng, s.register(reg).dim)
            worst = max(worst, abs(norm(apply_map(s, reg, u)) - 1))
        assert worst <= 1e-12


class TestNorm:
    def test_unit(self):
        s = JointState.from_amplitudes(
            [photon_register(), atom_register("a")], {("l+", "m+"): R2, ("l+", "m-"): R2}
        )
        assert norm(s) == pytest.approx(1, abs=1e-15)

    def test_lower_arm_component_of_linear_output(self):
        s = JointState.from_amplitudes(
            [photon_register(), atom_register("a")], {("l+", "m+"): -0.25j, ("l-", "m-"): 0.25j}
        )
        assert norm(s) == pytest.approx(1 / (2 * np.sqrt(2)), abs=1e-15)
        assert norm(normalize(s)) == pytest.approx(1, abs=1e-12)

    def test_normalize_keeps_phase(self):
        s = JointState.from_amplitudes([atom_register("a")], {("m+",): 2j})
        assert normalize(s).amplitude("m+") == pytest.approx(1j)

    def test_zero_state(self):
        s = JointState.from_amplitudes([atom_register("a")], {})
        with pytest.raises(NormalizationError):
            normalize(s)


class TestPartialTrace:
    def test_product_state(self, equal_superposition):
        rho = partial_trace(to_density(tensor(photon_input("upper", "x"), equal_superposition)), ["atom"])
        np.testing.assert_allclose(rho.matrix, to_density(equal_superposition).matrix, atol=1e-15)
        assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1)

    def test_post_selected_sigma_plus(self):
        # Dl component of the sigma+ output is proportional to |l+>|m+>
        s = JointState.from_amplitudes([photon_register(), atom_register("atom")], {("l+", "m+"): 1j / (2 * np.sqrt(2))})
        rho = partial_trace(to_density(normalize(s)), "atom")
        assert rho.element(("m+",), ("m+",)) == pytest.approx(1)
        assert np.count_nonzero(np.abs(rho.matrix) > 1e-15) == 1

    def test_bell_reduced(self, bell):
        rho = partial_trace(to_density(bell), ["atom2"])
        # hand trace of the 4x4 Bell projector over atom1
        expected = np.diag([0.5, 0.5, 0]).astype(complex)
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)
        assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(0.5)

    def test_matches_einsum(self, rng):
        s = random_photon_atom_state(rng, n_atoms=2)
        d = to_density(s)
        full = d.matrix.reshape(8, 3, 3, 8, 3, 3)
        ref = np.einsum("abcade->bcde", full).reshape(9, 9)
        np.testing.assert_allclose(partial_trace(d, ["a0", "a1"]).matrix, ref, atol=1e-14)
        ref1 = np.einsum("abcdbf->acdf", full).reshape(24, 24)
        np.testing.assert_allclose(partial_trace(d, ["photon", "a1"]).matrix, ref1, atol=1e-14)

    def test_sparse_reduction_agrees(self, rng):
        s = random_photon_atom_state(rng, n_atoms=2)
        for keep in (["a0"], ["a1"], ["a0", "a1"], ["photon"]):
            np.testing.assert_allclose(
                reduced_state(s, keep).matrix, partial_trace(to_density(s), keep).matrix, atol=1e-14
            )

    def test_empty_keep(self, bell):
        with pytest.raises(RegisterError):
            partial_trace(to_density(bell), [])

    def test_tensor_then_trace_recovers_factor(self, rng):
        for _ in range(50):
            a = random_photon_atom_state(rng, n_atoms=0)
            z = rng.normal(size=3) + 1j * rng.normal(size=3)
            z /= np.linalg.norm(z)
            b = JointState.from_amplitudes([atom_register("b")], dict(zip([("m+",), ("m-",), ("g",)], z)))
            d = to_density(tensor(a, b))
            np.testing.assert_allclose(partial_trace(d, "b").matrix, np.outer(z, z.conj()), atol=1e-12)
            np.testing.assert_allclose(partial_trace(d, "photon").matrix, to_density(a).matrix, atol=1e-12)

    def test_reduced_states_are_valid(self, rng):
        for _ in range(100):
            s = random_photon_atom_state(rng, n_atoms=2)
            for keep in (["a0"], ["a1"], ["a0", "a1"]):
                assert check_density(partial_trace(to_density(s), keep)) == []


def test_density_restrict_rejects_population():
    d = DensityMatrix([atom_register("a")], np.diag([0.5, 0.0, 0.5]))
    with pytest.raises(BasisError):
        d.restrict({"a": ["m+", "m-"]})
    assert d.restrict({"a": ["m+", "g"]}).dim == 2


def test_pruning_does_not_move_probabilities():
    for name in ("sigma_plus", "linear_x", "bell_linear", "bell_circular", "two_level"):
        sc = canned(name)
        pruned = [o.probability for o in measure(evolve(sc), sc.detector)]
        with pruning(0.0):
            raw = [o.probability for o in measure(evolve(sc), sc.detector)]
        assert np.max(np.abs(np.subtract(pruned, raw))) <= 1e-12
