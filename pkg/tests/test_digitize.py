import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dnaotp import digitize, seq


def purine_count_oracle(block_str):
    """Direct, independent 5PPD oracle: literally count A and G."""
    return sum(1 for c in block_str if c in "AG") % 2


class TestPpd:
    def test_all_1024_blocks_against_oracle(self):
        for combo in itertools.product("ACGT", repeat=5):
            block = "".join(combo)
            assert digitize.ppd5(block) == purine_count_oracle(block)

    def test_rejects_n(self):
        with pytest.raises(ValueError):
            digitize.ppd5("ACGTN")

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            digitize.ppd(seq.encode("ACG"), 5)

    def test_digitize_payload_matches_blockwise_ppd(self):
        rng = np.random.default_rng(7)
        payload = rng.integers(0, 4, 70).astype(np.uint8)
        bits = digitize.digitize_payload(payload)
        expected = [digitize.ppd(payload[5 * i:5 * i + 5]) for i in range(14)]
        assert bits.tolist() == expected

    def test_digitize_matrix_matches_rowwise(self):
        rng = np.random.default_rng(8)
        mat = rng.integers(0, 4, (50, 35)).astype(np.uint8)
        grid = digitize.digitize_matrix(mat)
        assert grid.shape == (50, 7)
        for i in range(50):
            assert grid[i].tolist() == digitize.digitize_payload(mat[i]).tolist()


class TestMaskLayout:
    def test_columnwise_placement(self):
        # bit j of key k must land at mask position j*K + k
        grid = np.array([[0, 1, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1]],
                        dtype=np.uint8)  # K=4 keys, 3 bits/key
        mask = digitize.build_mask(grid)
        K = 4
        for k in range(4):
            for j in range(3):
                assert mask.bits[j * K + k] == grid[k, j]

    def test_grid_roundtrip(self):
        rng = np.random.default_rng(9)
        grid = rng.integers(0, 2, (123, 14)).astype(np.uint8)
        mask = digitize.build_mask(grid)
        assert np.array_equal(digitize.mask_to_grid(mask), grid)

    def test_paper_scale_mask_length(self):
        K = 22_603_540
        assert K * 14 == 316_449_560

    @given(st.integers(1, 40), st.integers(1, 16))
    def test_roundtrip_property(self, n_keys, bpk):
        rng = np.random.default_rng(n_keys * 31 + bpk)
        grid = rng.integers(0, 2, (n_keys, bpk)).astype(np.uint8)
        assert np.array_equal(digitize.mask_to_grid(digitize.build_mask(grid)),
                              grid)


class TestMaskFile:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        grid = rng.integers(0, 2, (100, 14)).astype(np.uint8)
        mask = digitize.build_mask(grid, provenance="unit-test")
        mask.consumed = 37
        path = tmp_path / "m.bin"
        digitize.write_mask(path, mask)
        back = digitize.read_mask(path)
        assert np.array_equal(back.bits, mask.bits)
        assert back.n_keys == 100 and back.bits_per_key == 14
        assert back.layout == digitize.LAYOUT_COLWISE
        assert back.provenance == "unit-test"
        assert back.consumed == 37
        assert back.digest() == mask.digest()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTAMASK\n{}\n")
        with pytest.raises(digitize.FormatError):
            digitize.read_mask(path)


class TestChannelEstimate:
    def test_binomial_ci_matches_direct_beta_quantiles(self):
        from scipy import stats as sps
        for k, n in [(0, 100), (1, 100), (5, 1000), (999, 1000), (1000, 1000)]:
            lo, hi = digitize.binomial_ci(k, n)
            exp_lo = 0.0 if k == 0 else sps.beta.ppf(0.025, k, n - k + 1)
            exp_hi = 1.0 if k == n else sps.beta.ppf(0.975, k + 1, n - k)
            assert lo == pytest.approx(exp_lo)
            assert hi == pytest.approx(exp_hi)

    def test_ci_contains_true_rate_calibration(self):
        # frequentist check: 95% CI contains p for ~95% of draws
        rng = np.random.default_rng(11)
        p = 2e-3
        n = 20000
        hits = 0
        trials = 200
        for _ in range(trials):
            k = rng.binomial(n, p)
            lo, hi = digitize.binomial_ci(k, n)
            hits += lo <= p <= hi
        assert hits / trials >= 0.90

    def test_estimate_error_rate_counts(self):
        a = np.array([0, 1, 0, 1, 1, 0, 0, 0], dtype=np.uint8)
        b = np.array([0, 1, 1, 1, 1, 0, 1, 0], dtype=np.uint8)
        est = digitize.estimate_error_rate(a, b)
        assert est.mismatches == 2
        assert est.p_est == pytest.approx(0.25)
        assert est.ci_low <= 0.25 <= est.ci_high

    def test_zero_mismatch_rule_of_three(self):
        a = np.zeros(3000, dtype=np.uint8)
        est = digitize.estimate_error_rate(a, a)
        assert est.p_est == 0.0
        assert est.ci_high >= 3.0 / 3000

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            digitize.estimate_error_rate(np.zeros(4, dtype=np.uint8),
                                         np.zeros(5, dtype=np.uint8))
