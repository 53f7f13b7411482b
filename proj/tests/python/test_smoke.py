import numpy as np
import pytest

import dpptest


def test_distribution_of_two_element_kernel():
    k = np.array([[0.5, 0.3], [0.3, 0.5]])
    p = dpptest.exact_distribution(k)
    assert p == pytest.approx([0.16, 0.34, 0.34, 0.16], abs=1e-12)
    assert dpptest.marginal(k, [0, 1]) == pytest.approx(0.16)
    assert dpptest.atom_probability(k, [1]) == pytest.approx(0.34)


def test_bad_kernel_raises():
    with pytest.raises(dpptest.Error, match="NotSymmetric"):
        dpptest.validate_kernel(np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_projection_clamps_spectrum():
    k = dpptest.project_box(np.array([[1.2, 0.0], [0.0, -0.3]]), 0.1)
    assert np.allclose(k, np.diag([0.9, 0.1]))


def test_sampler_matches_exact_table():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    k = q @ np.diag([0.1, 0.4, 0.6, 0.9]) @ q.T
    k = (k + k.T) / 2
    samples = dpptest.sample_dpp(k, 50000, seed=3)
    assert samples.dtype == np.uint32
    empirical = np.bincount(samples, minlength=16) / len(samples)
    assert dpptest.distances(empirical.tolist(), dpptest.exact_distribution(k).tolist())["l1"] < 0.02
    again = dpptest.sample_dpp(k, 50000, seed=3, threads=2)
    assert np.array_equal(samples, again)


def test_tester_accepts_a_dpp_and_rejects_a_hard_instance():
    n = 3
    k = np.array([[0.5, 0.1, 0.0], [0.1, 0.4, 0.0], [0.0, 0.0, 0.6]])
    options = dict(eps=0.5, zeta=0.25, varsigma=1, diagonal_count=1)
    samples = dpptest.sample_dpp(k, 60000, seed=11)
    report = dpptest.dpp_tester(n, samples, **options)
    assert report.accept
    assert report.z < report.threshold

    far = dpptest.hard_instance(n, 0.6, seed=2)
    assert far["normalizer"] == pytest.approx(sum((1 + r * 0.6) / 8 for r in far["r"]))
    shifted = np.array(dpptest.exact_distribution(0.1 * np.eye(n)))
    shifted[0] -= 0.5
    shifted[-1] += 0.5
    report = dpptest.dpp_tester(n, dpptest.sample_table(shifted.tolist(), 60000, seed=5), **options)
    assert not report.accept


def test_too_few_samples():
    samples = dpptest.sample_dpp(0.5 * np.eye(3), 10, seed=1)
    with pytest.raises(dpptest.Error, match="InsufficientSamples"):
        dpptest.dpp_tester(3, samples, eps=0.5, zeta=0.25, varsigma=1, diagonal_count=1)


def test_statistic_and_sample_size():
    samples = np.array([0, 0, 0, 1], dtype=np.uint32)
    assert dpptest.chi2_l1_statistic(samples, [0.25] * 4, 0.01) == 2.0
    assert dpptest.required_samples(2, 1.0, np.exp(-1.0)) == 4
    assert dpptest.bracketing_params(4, 0.1, 0.05, 0.0, 0.25)["m"] == 1599


def test_hardness_helpers():
    lhs, holds = dpptest.helper_inequality(1.4, 0.7, 0.4)
    assert lhs == pytest.approx(0.1)
    assert holds
    assert dpptest.is_log_submodular(dpptest.exact_distribution(0.3 * np.eye(3)).tolist())
    witnesses = dpptest.witness_set(6, 0.6, seed=4)
    assert all(w & 3 == 0 for w in witnesses)


def test_cli_entry_point(tmp_path):
    code, out, _ = dpptest.run_cli(["hardness", "--n", "5", "--trials", "3", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "hardness.csv").read_text().startswith("# config=")
    code, _, err = dpptest.run_cli(["nope"])
    assert code == 2
