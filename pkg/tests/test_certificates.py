import numpy as np
import pytest

from spherosync import circulant
from spherosync.certificates import (
    VERDICT_BENIGN,
    VERDICT_INCONCLUSIVE,
    VERDICT_PSD_ONLY,
    CertificateReport,
    benign_landscape_check,
    benign_landscape_check_complex,
    certify_sdp_optimality,
    expander_alpha,
    kuramoto_sync_check,
    rank_one_bound,
    spectrum,
)
from spherosync.core import Laplacian, SignVector, SymmetricCost, laplacian
from spherosync.models import circulant_knn, gaussian_z2, random_regular

from conftest import complete_graph, hermitian_cost, random_signs, symmetric_cost


class TestSpectrum:
    def test_complete_graph(self):
        n = 8
        evs = spectrum(laplacian(complete_graph(n), SignVector.ones(n)))
        np.testing.assert_allclose(evs, [0.0] + [float(n)] * (n - 1), atol=1e-12)

    def test_zero_matrix(self):
        evs = spectrum(Laplacian(entries=np.zeros((5, 5))))
        np.testing.assert_array_equal(evs, np.zeros(5))

    def test_circulant_matches_dft_oracle(self):
        n, k = 16, 3
        L = laplacian(circulant_knn(n, k), SignVector.ones(n))
        dense = np.sort(spectrum(L))
        closed = np.sort(circulant.dft_spectrum(n, k).laplacian_eigenvalues())
        np.testing.assert_allclose(dense, closed, atol=1e-8)


class TestSdpCertificate:
    def test_complete_graph_feasible(self):
        n = 10
        rep = certify_sdp_optimality(complete_graph(n), SignVector.ones(n))
        assert rep.dual_feasible
        assert rep.lambda_2 == pytest.approx(n, abs=1e-9 * n)

    def test_small_noise_feasible(self, rng):
        n = 50
        z = random_signs(rng, n)
        C = gaussian_z2(n, 0.01, z, seed=7)
        rep = certify_sdp_optimality(C, z)
        assert rep.dual_feasible and rep.lambda_2 > 0

    def test_negated_complete_graph_infeasible(self):
        n = 6
        C = SymmetricCost(entries=-complete_graph(n).entries)
        rep = certify_sdp_optimality(C, SignVector.ones(n))
        assert not rep.dual_feasible
        assert rep.verdict == VERDICT_INCONCLUSIVE
        assert rep.lambda_1 < 0


class TestBenignCheck:
    def test_complete_graph_benign_at_two(self):
        n = 12
        rep = benign_landscape_check(complete_graph(n), SignVector.ones(n), r=2)
        assert rep.verdict == VERDICT_BENIGN
        assert rep.condition_number == pytest.approx(1.0, rel=1e-9)

    def test_subcritical_circulant_not_benign(self):
        n, k = 40, 12  # density 0.6
        rep = benign_landscape_check(circulant_knn(n, k), SignVector.ones(n), r=2)
        oracle = circulant.dft_spectrum(n, k).condition_number
        assert oracle > 2
        assert rep.verdict == VERDICT_PSD_ONLY
        assert rep.condition_number == pytest.approx(oracle, abs=1e-8)

    def test_verdict_flips_at_ratio(self):
        # scan integer ranks around the computed ratio: benign iff r > ratio
        n, k = 30, 9
        C = circulant_knn(n, k)
        z = SignVector.ones(n)
        ratio = benign_landscape_check(C, z, r=2).r_required
        for r in range(2, int(np.ceil(ratio)) + 3):
            rep = benign_landscape_check(C, z, r=r)
            assert (rep.verdict == VERDICT_BENIGN) == (r > ratio)

    def test_degree_preconditioner_nonpositive_is_inconclusive(self):
        C = SymmetricCost(entries=np.array([[0.0, -1.0], [-1.0, 0.0]]))
        rep = benign_landscape_check(C, SignVector.ones(2), r=2, preconditioner="degree")
        assert rep.verdict == VERDICT_INCONCLUSIVE
        assert "not positive" in rep.reason

    def test_conjugation_invariance(self, rng):
        # C -> diag(s) C diag(s), z -> s*z leaves the spectrum unchanged.
        for _ in range(5):
            n = 15
            C = symmetric_cost(rng, n)
            z = random_signs(rng, n)
            s = random_signs(rng, n)
            Cs = SymmetricCost(entries=s.signs[:, None] * C.entries * s.signs[None, :])
            zs = SignVector(signs=s.signs * z.signs)
            for pre in ("identity", "degree"):
                a = benign_landscape_check(C, z, r=3, preconditioner=pre)
                b = benign_landscape_check(Cs, zs, r=3, preconditioner=pre)
                assert a.verdict == b.verdict
                for fa, fb in (
                    (a.lambda_1, b.lambda_1),
                    (a.lambda_2, b.lambda_2),
                    (a.lambda_n, b.lambda_n),
                ):
                    assert fb == pytest.approx(fa, rel=1e-10, abs=1e-10)

    def test_json_fields(self):
        rep = benign_landscape_check(complete_graph(5), SignVector.ones(5), r=2)
        d = rep.to_json_dict()
        for key in (
            "lambda_1",
            "lambda_2",
            "lambda_n",
            "condition_number",
            "r_required",
            "verdict",
            "dual_feasible",
            "preconditioner",
        ):
            assert key in d


class TestComplexCheck:
    def test_real_embedding_matches_double_rank(self, rng):
        for _ in range(10):
            n = 12
            C = symmetric_cost(rng, n)
            z = random_signs(rng, n)
            Cc = SymmetricCost(entries=C.entries.astype(complex), is_complex=True)
            zc = SignVector(signs=z.signs.astype(complex), is_complex=True)
            real = benign_landscape_check(C, z, r=4)
            cplx = benign_landscape_check_complex(Cc, zc, r=2)
            assert cplx.verdict == real.verdict
            assert cplx.condition_number == pytest.approx(real.condition_number, rel=1e-10)

    def test_rank_one_complex_benign(self, rng):
        n = 9
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        C = SymmetricCost.from_array(np.outer(phases, phases.conj()))
        z = SignVector(signs=phases, is_complex=True)
        rep = benign_landscape_check_complex(C, z, r=1)
        assert rep.verdict == VERDICT_BENIGN
        assert rep.condition_number == pytest.approx(1.0, rel=1e-9)

    def test_fourier_phase_circulant_ratio_one(self):
        n = 12
        j = np.arange(n)
        z = np.exp(2j * np.pi * j / n)
        C = SymmetricCost.from_array(np.outer(z, z.conj()))
        rep = benign_landscape_check_complex(
            C, SignVector(signs=z, is_complex=True), r=1
        )
        assert rep.condition_number == pytest.approx(1.0, rel=1e-9)
        assert rep.verdict == VERDICT_BENIGN

    def test_gradient_condition_failure(self, rng):
        n = 8
        C = hermitian_cost(rng, n)
        z = SignVector(signs=np.ones(n, dtype=complex), is_complex=True)
        # generic Hermitian C: diag(C z z*) has imaginary parts
        rep = benign_landscape_check_complex(C, z, r=2)
        assert rep.verdict == VERDICT_INCONCLUSIVE
        assert "gradient condition" in rep.reason


class TestRankOneBound:
    def test_exact_reference_gives_unit_bound(self, rng):
        n = 20
        z = random_signs(rng, n)
        d_bar = 7.0
        C = SymmetricCost(entries=(d_bar / n) * np.outer(z.signs, z.signs))
        ref = rank_one_bound(C, z, a="uniform", d_bar=d_bar)
        assert ref.applicable
        assert ref.delta_c == pytest.approx(0.0, abs=1e-12)
        assert ref.bound_on_condition_number == pytest.approx(1.0, abs=1e-10)

    def test_complete_graph_frozen_value(self):
        # C - Cbar = -I at d_bar = n, so delta_c = 2 n / (n-1)^2 exactly.
        n = 100
        ref = rank_one_bound(complete_graph(n), SignVector.ones(n), a="uniform", d_bar=float(n))
        assert ref.delta_c == pytest.approx(200.0 / 9801.0, rel=1e-12)
        assert ref.kappa_d == pytest.approx(100.0 / 99.0, rel=1e-12)
        assert ref.d_min == pytest.approx(99.0)

    def test_theorem_inequality_and_gap_scale_gaussian(self):
        # At n = 300 and half the recovery-threshold noise, the measured
        # ||L_D - Lbar|| sits below 1/3 in nearly all seeds, while the
        # certified delta_c keeps its 2 kappa^2 safety factor (well above
        # the measured value).
        n = 300
        sigma = 0.5 * np.sqrt(n / (2 * np.log(n)))
        z = SignVector.ones(n)
        measured_small = 0
        trials = 20
        for seed in range(trials):
            C = gaussian_z2(n, sigma, z, seed=seed)
            ref = rank_one_bound(C, z, a="uniform", d_bar=float(n))
            assert ref.applicable
            assert ref.measured_deviation <= ref.delta_c + 1e-12
            assert ref.delta_c >= 2 * ref.normalized_gap
            if ref.measured_deviation < 1 / 3:
                measured_small += 1
        assert measured_small >= 0.95 * trials

    def test_nonpositive_degree_flagged(self):
        C = SymmetricCost(entries=np.array([[0.0, -1.0], [-1.0, 0.0]]))
        ref = rank_one_bound(C, SignVector.ones(2), a="uniform", d_bar=1.0)
        assert not ref.applicable
        assert ref.delta_c == np.inf

    def test_general_reference_vector(self, rng):
        n = 30
        a = rng.random(n) + 0.5
        z = random_signs(rng, n)
        C = SymmetricCost(
            entries=np.outer(a * z.signs, a * z.signs) + 0.01 * symmetric_cost(rng, n).entries
        )
        ref = rank_one_bound(C, z, a=a)
        assert ref.applicable and ref.d_bar is None
        assert ref.kappa_d >= 1.0
        assert ref.measured_deviation <= ref.delta_c + 1e-12

    def test_weyl_consequence(self, rng):
        # when delta_c < 1, the L_D condition number obeys (1+d)/(1-d)
        n = 80
        z = SignVector.ones(n)
        C = gaussian_z2(n, 0.3, z, seed=3)
        ref = rank_one_bound(C, z, a="uniform", d_bar=float(n))
        assert ref.delta_c < 1
        rep = benign_landscape_check(C, z, r=2, preconditioner="degree")
        assert rep.condition_number <= ref.bound_on_condition_number + 1e-9


class TestKuramotoCheck:
    def test_complete_graph(self):
        rep = kuramoto_sync_check(complete_graph(20))
        assert rep.verdict == VERDICT_BENIGN
        assert rep.condition_number == pytest.approx(1.0, rel=1e-9)

    def test_supercritical_circulant(self):
        n, k = 120, 42  # density 0.7 > critical
        rep = kuramoto_sync_check(circulant_knn(n, k))
        oracle = circulant.dft_spectrum(n, k).condition_number
        assert oracle < 2
        assert rep.verdict == VERDICT_BENIGN
        assert rep.condition_number == pytest.approx(oracle, abs=1e-8)

    def test_dense_min_degree_graph(self):
        # complete graph minus a perfect matching: min degree n-2 >= 0.75(n-1)
        n = 12
        A = complete_graph(n).entries.copy()
        for i in range(0, n, 2):
            A[i, i + 1] = A[i + 1, i] = 0.0
        rep = kuramoto_sync_check(SymmetricCost(entries=A))
        assert rep.verdict == VERDICT_BENIGN

    def test_negative_row_sum_skips_normalized_branch(self):
        # strongly negative coupling: A 1 not positive, identity branch only
        A = -complete_graph(4).entries
        rep = kuramoto_sync_check(SymmetricCost(entries=A))
        assert rep.preconditioner_kind == "identity"
        assert rep.verdict == VERDICT_INCONCLUSIVE


class TestExpanderAlpha:
    def test_exact_rank_one(self):
        n, d = 10, 4.0
        A = SymmetricCost(entries=(d / n) * np.ones((n, n)))
        assert expander_alpha(A, d) == pytest.approx(0.0, abs=1e-12)

    def test_complete_graph(self):
        n = 25
        assert expander_alpha(complete_graph(n), float(n)) == pytest.approx(1 / n, rel=1e-9)

    def test_random_regular_smoke(self):
        # small version of the acceptance-scale Monte Carlo; alpha needs
        # 2 sqrt(d-1)/d < 1/3, so the degree must be at least ~35
        n, d = 800, 40
        hits = 0
        for seed in range(5):
            A = random_regular(n, d, seed)
            assert (A.entries.sum(axis=1) == d).all()
            if expander_alpha(A, float(d)) < 1 / 3:
                hits += 1
        assert hits >= 4
