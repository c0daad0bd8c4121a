import numpy as np
import pytest

from funcsvm import (
    BasisSpec,
    BaseKernel,
    FunctionalKernel,
    SampledFunction,
    SamplingGrid,
    Transform,
    gram_matrix,
    inner_product,
    kernel_eval,
)
from funcsvm.errors import ConfigurationError, DegenerateFunctionError
from funcsvm.kernels import cross_matrix, kernel_from_dict, kernel_to_dict


def random_functions(n_funcs, grid_len=64, seed=0, interval=(0.0, 1.0)):
    g = SamplingGrid.uniform(*interval, grid_len)
    rng = np.random.default_rng(seed)
    return g, [SampledFunction(g, rng.standard_normal(grid_len)) for _ in range(n_funcs)]


class TestSpecs:
    def test_gaussian_requires_positive_sigma(self):
        with pytest.raises(ConfigurationError):
            BaseKernel.gaussian(0.0)

    def test_polynomial_requires_degree(self):
        with pytest.raises(ConfigurationError):
            BaseKernel.polynomial(0)

    def test_derivative_transform_dimension_floor(self):
        with pytest.raises(ConfigurationError):
            Transform("derivative", order=2, spline_dimension=5)
        Transform("derivative", order=2, spline_dimension=6)


class TestKernelEval:
    def test_gaussian_self_similarity_is_one(self):
        _, (u,) = random_functions(1)
        q = FunctionalKernel(base=BaseKernel.gaussian(3.7))
        assert kernel_eval(q, u, u) == pytest.approx(1.0, abs=1e-12)

    def test_linear_kernel_is_the_inner_product(self):
        _, (u, v) = random_functions(2)
        q = FunctionalKernel()
        assert kernel_eval(q, u, v) == pytest.approx(inner_product(u, v), rel=1e-12)

    def test_full_haar_projection_matches_raw_gaussian(self):
        # Parseval: at full dimension the projected distance equals the raw
        # quadrature distance, so the two kernels agree.
        _, (u, v) = random_functions(2)
        raw = FunctionalKernel(base=BaseKernel.gaussian(1.0))
        projected = FunctionalKernel(
            projection=BasisSpec("haar_wavelet", 64), base=BaseKernel.gaussian(1.0)
        )
        assert kernel_eval(projected, u, v) == pytest.approx(
            kernel_eval(raw, u, v), abs=1e-6
        )

    def test_symmetry(self):
        _, (u, v) = random_functions(2, seed=5)
        for base in (BaseKernel.linear(), BaseKernel.gaussian(0.5),
                     BaseKernel.polynomial(3)):
            q = FunctionalKernel(base=base)
            assert kernel_eval(q, u, v) == pytest.approx(kernel_eval(q, v, u), rel=1e-12)

    def test_degenerate_transform_identifies_the_input(self):
        g = SamplingGrid.uniform(0.0, 1.0, 32)
        good = SampledFunction(g, np.sin(g.abscissae))
        flat = SampledFunction(g, np.full(32, 2.0))
        q = FunctionalKernel(transforms=(Transform("normalize"),))
        with pytest.raises(DegenerateFunctionError, match="function 1"):
            kernel_eval(q, good, flat)


class TestGramMatrix:
    def test_single_function(self):
        _, (u,) = random_functions(1)
        q = FunctionalKernel()
        K = gram_matrix(q, [u])
        assert K.shape == (1, 1)
        assert K[0, 0] == pytest.approx(inner_product(u, u), rel=1e-12)

    def test_gaussian_diagonal_is_one(self):
        _, funcs = random_functions(6)
        K = gram_matrix(FunctionalKernel(base=BaseKernel.gaussian(2.0)), funcs)
        assert np.allclose(np.diag(K), 1.0)

    def test_linear_gram_positive_semidefinite(self):
        _, funcs = random_functions(5, seed=1)
        K = gram_matrix(FunctionalKernel(), funcs)
        eigs = np.linalg.eigvalsh(K)
        assert eigs.min() >= -1e-8 * np.trace(K)

    @pytest.mark.parametrize(
        "base",
        [BaseKernel.linear(), BaseKernel.gaussian(0.7), BaseKernel.polynomial(2)],
    )
    def test_psd_for_random_batches(self, base):
        for seed in range(3):
            _, funcs = random_functions(int(7 + 3 * seed), seed=seed)
            K = gram_matrix(FunctionalKernel(base=base), funcs)
            assert np.allclose(K, K.T, atol=1e-12)
            assert np.linalg.eigvalsh(K).min() >= -1e-8 * np.trace(K)

    def test_matches_pairwise_eval(self):
        _, funcs = random_functions(4, seed=2)
        q = FunctionalKernel(
            transforms=(Transform("center"),),
            projection=BasisSpec("fourier", 9),
            base=BaseKernel.gaussian(0.3),
        )
        K = gram_matrix(q, funcs)
        for i in range(4):
            for j in range(4):
                assert K[i, j] == pytest.approx(
                    kernel_eval(q, funcs[i], funcs[j]), abs=1e-12
                )

    def test_gaussian_bounds(self):
        _, funcs = random_functions(8, seed=3)
        K = gram_matrix(FunctionalKernel(base=BaseKernel.gaussian(5.0)), funcs)
        assert np.all(K > 0.0)
        assert np.all(K <= 1.0)
        off = K[~np.eye(8, dtype=bool)]
        assert np.all(off < 1.0)  # distinct random inputs


class TestProjectionConsistency:
    def test_coefficient_kernel_equals_reconstructed_function_kernel(self):
        from funcsvm import project, reconstruct

        g, funcs = random_functions(3, grid_len=128, seed=4)
        spec = BasisSpec("fourier", 11)
        q_coeff = FunctionalKernel(projection=spec, base=BaseKernel.gaussian(0.8))
        q_raw = FunctionalKernel(base=BaseKernel.gaussian(0.8))
        recon = [reconstruct(project(f, spec), g) for f in funcs]
        for i in range(3):
            for j in range(3):
                a = kernel_eval(q_coeff, funcs[i], funcs[j])
                b = kernel_eval(q_raw, recon[i], recon[j])
                assert a == pytest.approx(b, rel=1e-6)

    def test_bspline_coefficients_carry_the_gram_metric(self):
        from funcsvm import project, reconstruct

        g, funcs = random_functions(2, grid_len=128, seed=6)
        spec = BasisSpec("bspline", 12)
        q_coeff = FunctionalKernel(projection=spec)
        recon = [reconstruct(project(f, spec), g) for f in funcs]
        assert kernel_eval(q_coeff, funcs[0], funcs[1]) == pytest.approx(
            inner_product(recon[0], recon[1]), rel=1e-8
        )


class TestCrossMatrix:
    def test_shapes_and_values(self):
        _, funcs = random_functions(5, seed=7)
        q = FunctionalKernel(base=BaseKernel.gaussian(1.0))
        K = cross_matrix(q, funcs[:2], funcs[2:])
        assert K.shape == (2, 3)
        assert K[1, 2] == pytest.approx(kernel_eval(q, funcs[1], funcs[4]), abs=1e-12)


class TestSerialization:
    @pytest.mark.parametrize(
        "kernel",
        [
            FunctionalKernel(),
            FunctionalKernel(base=BaseKernel.gaussian(0.25)),
            FunctionalKernel(
                transforms=(Transform("center"), Transform("normalize")),
                projection=BasisSpec("haar_wavelet", 16),
                base=BaseKernel.polynomial(4),
            ),
            FunctionalKernel(
                transforms=(Transform("derivative", order=2, spline_dimension=20),),
                base=BaseKernel.gaussian(1.5),
            ),
        ],
    )
    def test_round_trip_is_lossless(self, kernel):
        assert kernel_from_dict(kernel_to_dict(kernel)) == kernel

    def test_round_trip_through_json(self):
        import json

        kernel = FunctionalKernel(
            projection=BasisSpec("fourier", 7), base=BaseKernel.gaussian(2.0)
        )
        doc = json.loads(json.dumps(kernel_to_dict(kernel)))
        assert kernel_from_dict(doc) == kernel
