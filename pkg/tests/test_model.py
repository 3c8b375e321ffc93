import numpy as np
import pytest
from hypothesis import given

from ecochain.model import (
    FIGURE_PARAMS,
    ModelVariant,
    ParameterSet,
    jacobian,
    jacobian_fd,
    total_population,
    validate_params,
    vector_field,
)

from conftest import param_sets, states

FIG1 = FIGURE_PARAMS["fig1"]
FIG4 = FIGURE_PARAMS["fig4"]
ALL_VARIANTS = list(ModelVariant)


def _rel_err(a, b):
    return np.max(np.abs(a - b) / np.maximum(np.abs(a), 1.0))


class TestValidation:
    def test_fig1_valid(self):
        assert validate_params(FIG1, "malthus").ok

    def test_g_exceeds_c(self):
        report = validate_params(FIG1.replace(g=0.5), "malthus")
        assert report.violations == ("g<c",)

    def test_zero_carrying_capacity(self):
        report = validate_params(FIG4.replace(K=0.0), ModelVariant.LOGISTIC)
        assert "K>0" in report.violations

    def test_malthus_ignores_k(self):
        assert validate_params(FIG1, ModelVariant.MALTHUS).ok
        assert not validate_params(FIG1, ModelVariant.LOGISTIC).ok

    def test_every_violation_listed(self):
        p = FIG4.replace(g=0.5, f=0.8, l=1.0, nu=0.1, r=-1.0)
        assert set(validate_params(p, "logistic").violations) == {"g<c", "f<q", "l<b", "nu>=mu", "r>0"}

    def test_mu0_constructor(self):
        p = ParameterSet.from_mu0(mu0=0.1, **{k: v for k, v in FIG4.as_dict().items() if k != "nu"})
        assert p.nu == pytest.approx(0.3)
        assert p.mu0 == pytest.approx(0.1)


class TestVectorField:
    def test_origin_is_fixed(self):
        assert np.all(vector_field("logistic", FIG4, np.zeros(4)) == 0)

    def test_fig4_caption_point_nearly_stationary(self):
        dx = vector_field("logistic", FIG4, [0.0571, 0.7429, 0.1714, 0.4857])
        assert np.all(np.abs(dx) <= 1e-3)

    def test_malthus_hand_evaluation(self):
        # P(gI+fS-tau) = 0.1, S(lV-beta I-qP-mu) = -0.6, I(beta S-cP-nu) = -0.4, V(r-bS) = 0.1
        dx = vector_field("malthus", FIG1, np.ones(4))
        np.testing.assert_allclose(dx, [0.1, -0.6, -0.4, 0.1], atol=1e-15)

    def test_rejects_negative_and_nonfinite(self):
        with pytest.raises(ValueError):
            vector_field("logistic", FIG4, [0.1, -0.1, 0.1, 0.1])
        with pytest.raises(ValueError):
            vector_field("logistic", FIG4, [0.1, np.nan, 0.1, 0.1])

    def test_disease_free_requires_zero_infected(self):
        with pytest.raises(ValueError):
            vector_field("logistic-disease-free", FIG4, [0.1, 0.1, 0.1, 0.1])

    @given(p=param_sets(), x=states())
    def test_faces_invariant(self, p, x):
        for variant in ALL_VARIANTS:
            y = x.copy()
            if variant.disease_free:
                y[2] = 0.0
            for i in range(4):
                z = y.copy()
                z[i] = 0.0
                assert vector_field(variant, p, z)[i] == 0.0

    @given(p=param_sets(), x=states(hi=10.0))
    def test_malthus_is_large_k_limit(self, p, x):
        fm = vector_field("malthus", p, x)
        fl = vector_field("logistic", p.replace(K=1e12), x)
        np.testing.assert_allclose(fl, fm, rtol=1e-9, atol=1e-9 * np.max(np.abs(fm)))

    @given(p=param_sets(), x=states())
    def test_disease_free_is_sum_of_intermediate_equations(self, p, x):
        x[2] = 0.0
        full = vector_field("logistic", p, x)
        reduced = vector_field("logistic-disease-free", p, x)
        assert reduced[1] == pytest.approx(full[1] + full[2], abs=1e-15)
        assert reduced[2] == 0.0
        np.testing.assert_allclose(reduced[[0, 3]], full[[0, 3]], atol=1e-15)


class TestJacobian:
    def test_origin_eigen_diagonal(self):
        J = jacobian("malthus", FIG1, np.zeros(4))
        np.testing.assert_allclose(J, np.diag([-0.4, -0.2, -0.3, 0.5]), atol=0)

    def test_bottom_right_at_carrying_capacity(self):
        x = np.array([0.2, 0.3, 0.1, FIG4.K])
        J = jacobian("logistic", FIG4, x)
        assert J[3, 3] == pytest.approx(-FIG4.b * 0.3 - FIG4.r, abs=1e-15)

    def test_disease_free_is_3x3(self):
        J = jacobian("logistic-disease-free", FIG4, [0.1, 0.5, 0.0, 0.4])
        assert J.shape == (3, 3)
        full = jacobian("logistic", FIG4, [0.1, 0.5, 0.0, 0.4])
        # dropping the I row and column, with the beta/g couplings gone
        assert J[0, 0] == full[0, 0]
        assert J[1, 2] == full[1, 3]
        assert J[2, 1] == full[3, 1]

    @pytest.mark.parametrize("variant", ALL_VARIANTS, ids=lambda v: v.value)
    @given(p=param_sets(), x=states())
    def test_matches_finite_differences(self, variant, p, x):
        if variant.disease_free:
            x[2] = 0.0
        Ja = jacobian(variant, p, x)
        Jf = jacobian_fd(variant, p, x, 1e-6)
        assert _rel_err(Ja, Jf) < 1e-6

    def test_fd_exact_on_linear_region(self):
        x = np.array([0.7, 0.0, 0.0, 1.3])
        Ja = jacobian("malthus", FIG1, x)
        Jf = jacobian_fd("malthus", FIG1, x, 1e-3)
        np.testing.assert_allclose(Jf, Ja, rtol=1e-12, atol=1e-12)

    def test_fd_self_consistency_fig1(self):
        x = np.ones(4)
        assert _rel_err(jacobian("malthus", FIG1, x), jacobian_fd("malthus", FIG1, x, 1e-6)) < 1e-6

    @pytest.mark.parametrize("h", [0.0, -1e-3, 1e-320])
    def test_fd_bad_step(self, h):
        with pytest.raises(ValueError):
            jacobian_fd("malthus", FIG1, np.ones(4), h)


class TestTotalPopulation:
    def test_sum(self):
        assert total_population([1, 2, 3, 4]) == 10
        assert total_population(np.zeros(4)) == 0

    def test_fig4_caption(self):
        assert total_population([0.0571, 0.7429, 0.1714, 0.4857]) == pytest.approx(1.4571)
