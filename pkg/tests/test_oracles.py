import math

import numpy as np
import pytest

from _helpers import H01, asym_source, dsbs_source, random_joint
from mtrd._seeding import child_rng
from mtrd.feasibility import in_s_in, in_s_out1, in_s_out3
from mtrd.oracles import (
    common_info_channel,
    exhaustive_decoder_check,
    grid_search_weighted_rate,
    sample_nletter_channel,
    validate_single_letter_conditions,
)
from mtrd.probability import ProbTensor, join
from mtrd.regions import minimize_weighted_rate, optimal_decoders
from mtrd.spectral import maximal_correlation


@pytest.fixture(scope="module")
def src():
    return dsbs_source(0.1)


class TestNLetterSampler:
    def test_n1_induced_channel_factorizes(self, src):
        ch, block = sample_nletter_channel(src, 1, (2, 2), child_rng(80))
        assert in_s_in(ch, 1e-9).accepted
        assert abs(block.values.sum() - 1) < 1e-10

    def test_n2_induced_passes_both_screens(self, src):
        for i in range(20):
            ch, _ = sample_nletter_channel(src, 2, (2, 2), child_rng(81, i))
            assert in_s_out1(ch, 1e-7).accepted
            assert in_s_out3(ch, src, 1e-7).accepted

    def test_block_joint_shape(self, src):
        _, block = sample_nletter_channel(src, 2, (3, 2), child_rng(82))
        assert block.values.shape == (4, 4, 3, 2)

    def test_invalid_n(self, src):
        with pytest.raises(ValueError, match="n must be"):
            sample_nletter_channel(src, 4, (2, 2), child_rng(83))


class TestValidation:
    def test_clean_run(self, src):
        rep = validate_single_letter_conditions(src, 2, 30, seed=84, sizes=(2, 2))
        assert rep.ok and rep.failures == 0
        assert rep.worst_out3_defect <= 1e-7

    def test_adversarial_injection_is_caught(self, src, tmp_path):
        bad = common_info_channel(src, lambda u: u, lambda v: v, 2)
        rep = validate_single_letter_conditions(
            src, 1, 5, seed=85, sizes=(4, 4),
            failure_dir=str(tmp_path), inject_adversarial=bad,
        )
        assert rep.failures == 1
        assert len(rep.failure_artifacts) == 1
        assert (tmp_path / rep.failure_artifacts[0].split("/")[-1]).exists()

    def test_trials_validated(self, src):
        with pytest.raises(ValueError, match="trials"):
            validate_single_letter_conditions(src, 1, 0, seed=86)


class TestCommonInfoChannel:
    def test_identity_maps(self, src):
        ch = common_info_channel(src, lambda u: u, lambda v: v, 2)
        assert in_s_out1(ch).accepted
        assert not in_s_out3(ch, src).accepted
        j = join(src.p_uv, ch)
        p12 = j.values.sum(axis=(0, 1))
        assert abs(maximal_correlation(p12) - 1.0) < 1e-9

    def test_constant_maps_still_correlated(self, src):
        ch = common_info_channel(src, lambda u: 0, lambda v: 0, 2)
        j = join(src.p_uv, ch)
        p12 = j.values.sum(axis=(0, 1))
        assert abs(maximal_correlation(p12) - 1.0) < 1e-9

    def test_degenerate_shared_part(self, src):
        ch = common_info_channel(src, lambda u: 0, lambda v: 0, 1)
        j = join(src.p_uv, ch)
        p12 = j.values.sum(axis=(0, 1))
        assert maximal_correlation(p12) < 1e-9
        assert in_s_out3(ch, src).accepted

    def test_array_maps_accepted(self, src):
        ch = common_info_channel(src, [0, 1], [0, 0], 2)
        assert in_s_out1(ch).accepted

    def test_any_nondegenerate_shared_size_rejected(self, src):
        for s_size in (2, 3):
            ch = common_info_channel(src, lambda u: u, lambda v: v, s_size)
            assert in_s_out1(ch).accepted
            assert not in_s_out3(ch, src).accepted


class TestGridSearch:
    def test_loose_distortion(self, src):
        val = grid_search_weighted_rate(src, (0.5, 0.5), (2, 2), (1.0, 1.0), 0.25)
        assert val < 1e-12

    def test_lossless_corner(self, src):
        val = grid_search_weighted_rate(src, (0.0, 0.0), (2, 2), (1.0, 1.0), 0.25)
        assert abs(val - (1 + H01)) < 1e-9

    def test_optimizer_dominates_grid_with_injection(self, src):
        grid_val, channels = grid_search_weighted_rate(
            src, (0.05, 0.05), (2, 2), (1.0, 1.0), 0.25, return_channels=True
        )
        res = minimize_weighted_rate(
            "in", src, (0.05, 0.05), (2, 2), (1.0, 1.0), budget=4, seed=87,
            extra_channels=channels,
        )
        assert res.value <= grid_val + 1e-9

    def test_infeasible_grid_reported(self, src):
        # step-0.5 grid cannot reach distortion 0.01 on both coordinates
        val = grid_search_weighted_rate(src, (0.01, 0.01), (1, 1), (1.0, 1.0), 0.5)
        assert math.isinf(val)

    def test_bad_step_rejected(self, src):
        with pytest.raises(ValueError, match="grid step"):
            grid_search_weighted_rate(src, (0, 0), (2, 2), (1, 1), 0.3)


class TestExhaustiveDecoderCheck:
    def test_identity_channel(self, src):
        from _helpers import det_channel

        j = join(src.p_uv, det_channel(2, 2, lambda u: u, lambda v: v, 2, 2))
        rep = exhaustive_decoder_check(j, src)
        assert rep["matches"]
        assert rep["ed1"] == 0.0 and rep["ed2"] == 0.0

    def test_random_joints_match(self, src):
        rng = np.random.default_rng(88)
        for _ in range(10):
            t = random_joint(rng, (2, 2, 2, 2), ("U", "V", "X1", "X2"))
            assert exhaustive_decoder_check(t, src)["matches"]

    def test_all_uniform_ties_break_low(self, src):
        t = ProbTensor(("U", "V", "X1", "X2"), np.full((2, 2, 2, 2), 1 / 16))
        dec, _, _ = optimal_decoders(t, src)
        assert not dec.u_hat.any() and not dec.v_hat.any()
        assert exhaustive_decoder_check(t, src)["matches"]

    def test_cap_enforced(self, src):
        t = random_joint(np.random.default_rng(89), (2, 2, 3, 2), ("U", "V", "X1", "X2"))
        with pytest.raises(ValueError, match="capped"):
            exhaustive_decoder_check(t, src)


class TestAsymmetricSource:
    def test_n2_screens_on_3x3(self):
        src3 = asym_source()
        for i in range(10):
            ch, _ = sample_nletter_channel(src3, 2, (3, 3), child_rng(90, i))
            assert in_s_out1(ch, 1e-7).accepted
            assert in_s_out3(ch, src3, 1e-7).accepted
