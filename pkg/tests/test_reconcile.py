import fractions
import math

import numpy as np
import pytest

from dnaotp.reconcile import (BchCode, DecodeFailure, MaskExhausted, MaskReuse,
                              NoFeasibleCode, binomial_tail_gt, bits_to_bytes,
                              bytes_to_bits, correct_mask, otp_open, otp_seal,
                              parity_for_mask, read_ciphertext, select_params,
                              write_ciphertext)
from dnaotp.reconcile.gf import GF2m, cyclotomic_coset, minimal_polynomial
from dnaotp.digitize import build_mask


class TestGF:
    def test_field_axioms_gf16(self):
        gf = GF2m(4)
        n = 15
        for a in range(1, n + 1):
            assert gf.mul(a, gf.inv(a)) == 1
        # associativity / distributivity spot checks over the whole field
        for a in range(16):
            for b in range(16):
                assert gf.mul(a, b) == gf.mul(b, a)
                for c in (3, 7):
                    assert gf.mul(a, b ^ c) == gf.mul(a, b) ^ gf.mul(a, c)

    def test_alpha_has_full_order(self):
        for m in (4, 5, 8):
            gf = GF2m(m)
            n = (1 << m) - 1
            seen = {gf.pow_alpha(e) for e in range(n)}
            assert len(seen) == n  # alpha is primitive

    def test_cyclotomic_cosets_partition(self):
        n = 15
        covered = set()
        for i in range(n):
            covered |= set(cyclotomic_coset(i, n))
        assert covered == set(range(n))

    def test_minimal_polynomial_annihilates_roots(self):
        gf = GF2m(4)
        coset = cyclotomic_coset(1, 15)
        poly = minimal_polynomial(coset, gf)
        # evaluate at alpha^j for each j in the coset; must be 0
        for j in coset:
            x = gf.pow_alpha(j)
            acc = 0
            for c in reversed(list(poly)):
                acc = gf.mul(acc, x) ^ int(c)
            assert acc == 0


class TestBch:
    def test_15_7_2_parameters(self):
        code = BchCode(m=4, t=2)
        assert (code.n, code.k, code.t) == (15, 7, 2)

    def test_exhaustive_15_7_2(self):
        """All 128 messages x all 0/1/2-error patterns decode exactly."""
        code = BchCode(m=4, t=2)
        patterns = [np.zeros(15, dtype=np.uint8)]
        for i in range(15):
            e = np.zeros(15, dtype=np.uint8)
            e[i] = 1
            patterns.append(e)
            for j in range(i + 1, 15):
                e2 = e.copy()
                e2[j] = 1
                patterns.append(e2)
        assert len(patterns) == 1 + 15 + 105
        for msg_int in range(128):
            msg = np.array([(msg_int >> b) & 1 for b in range(7)],
                           dtype=np.uint8)
            word = code.encode(msg)
            for e in patterns:
                decoded, ncorr = code.decode(word ^ e)
                assert np.array_equal(decoded, msg)
                assert ncorr == int(e.sum())

    def test_systematic_encoding(self):
        code = BchCode(m=5, t=3)
        rng = np.random.default_rng(0)
        msg = rng.integers(0, 2, code.k).astype(np.uint8)
        word = code.encode(msg)
        assert np.array_equal(word[:code.k], msg)

    def test_linearity(self):
        code = BchCode(m=5, t=3)
        rng = np.random.default_rng(1)
        a = rng.integers(0, 2, code.k).astype(np.uint8)
        b = rng.integers(0, 2, code.k).astype(np.uint8)
        assert np.array_equal(code.encode(a) ^ code.encode(b),
                              code.encode(a ^ b))

    def test_random_correction_at_capacity(self):
        rng = np.random.default_rng(2)
        for m, t in [(6, 5), (8, 10), (10, 20)]:
            code = BchCode(m=m, t=t)
            for _ in range(20):
                msg = rng.integers(0, 2, code.k).astype(np.uint8)
                word = code.encode(msg)
                pos = rng.choice(code.n, size=t, replace=False)
                bad = word.copy()
                bad[pos] ^= 1
                decoded, ncorr = code.decode(bad)
                assert np.array_equal(decoded, msg)
                assert ncorr == t

    def test_beyond_capacity_never_silently_wrong_codeword(self):
        """t+1 errors either fail or decode to a wrong message -- but when
        they decode, the result must still be a valid codeword (bounded-
        distance decoding invariant)."""
        code = BchCode(m=5, t=2)
        rng = np.random.default_rng(3)
        for _ in range(50):
            msg = rng.integers(0, 2, code.k).astype(np.uint8)
            word = code.encode(msg)
            pos = rng.choice(code.n, size=3, replace=False)
            bad = word.copy()
            bad[pos] ^= 1
            try:
                decoded, _ = code.decode(bad)
            except DecodeFailure:
                continue
            reenc = code.encode(decoded)
            assert int((reenc != bad).sum()) <= code.t


def binomial_tail_fraction(n, t, p_frac):
    """Independent oracle: P[Bin(n,p) > t] with exact rational arithmetic."""
    q = 1 - p_frac
    # sum the head up to t, subtract from 1; term recurrence keeps it exact
    term = q ** n
    head = term
    for i in range(1, t + 1):
        term = term * p_frac * (n - i + 1) / (q * i)
        head += term
    return 1 - head


class TestParams:
    def test_tail_matches_fraction_oracle(self):
        p = fractions.Fraction(1, 20000)
        for n, t in [(255, 3), (1023, 8), (8191, 29)]:
            ours = float(binomial_tail_gt(n, t, float(p)))
            exact = float(binomial_tail_fraction(n, t, p))
            assert ours == pytest.approx(exact, rel=1e-9)

    def test_select_params_meets_target(self):
        sel = select_params(1e-4, 100_000, dfr_target=2.0 ** -64,
                            safety="none")
        assert sel.total_dfr_bound <= 2.0 ** -64
        assert sel.block_count * sel.code.k >= 100_000

    def test_select_params_paper_regime(self):
        sel = select_params(5e-5, 316_449_560, safety="none",
                            m_range=(13, 13))
        assert sel.code.n == 8191
        assert 27 <= sel.code.t <= 33
        assert 0.04 <= sel.overhead <= 0.06

    def test_safety_margin_increases_t(self):
        loose = select_params(1e-4, 10_000, safety="none", m_range=(10, 10))
        tight = select_params(1e-4, 10_000, sample_bits=10_000, mismatches=1,
                              m_range=(10, 10))
        assert tight.p_safe > loose.p_safe
        assert tight.code.t >= loose.code.t

    def test_total_bits_cap(self):
        sel = select_params(1e-3, 1000, safety="none")
        with pytest.raises(NoFeasibleCode):
            select_params(1e-3, 1000, safety="none",
                          total_bits_max=sel.total_bits // 2,
                          m_range=(sel.code.m, sel.code.m))

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            select_params(0.6, 1000)
        with pytest.raises(ValueError):
            select_params(1e-4, 0)


class TestOtp:
    def _mask(self, n_bits, seed=0):
        rng = np.random.default_rng(seed)
        grid = rng.integers(0, 2, (n_bits // 4, 4)).astype(np.uint8)
        return build_mask(grid, provenance="test-pad")

    def test_seal_open_roundtrip_clean(self):
        code = BchCode(m=6, t=3)
        mask_a = self._mask(4000, seed=1)
        mask_b = self._mask(4000, seed=1)
        rng = np.random.default_rng(4)
        pt = rng.integers(0, 2, 300).astype(np.uint8)
        ct = otp_seal(pt, mask_a, code)
        out = otp_open(ct, mask_b)
        assert np.array_equal(out, pt)

    def test_open_corrects_mask_mismatches(self):
        code = BchCode(m=6, t=3)
        mask_a = self._mask(4000, seed=2)
        mask_b = self._mask(4000, seed=2)
        # desynchronize a few mask bits (fewer than t per block)
        mask_b.bits[5] ^= 1
        mask_b.bits[70] ^= 1
        rng = np.random.default_rng(5)
        pt = rng.integers(0, 2, 200).astype(np.uint8)
        ct = otp_seal(pt, mask_a, code)
        assert np.array_equal(otp_open(ct, mask_b), pt)

    def test_seal_consumes_and_zeroes(self):
        code = BchCode(m=4, t=2)
        mask = self._mask(400, seed=3)
        pt = np.ones(7, dtype=np.uint8)
        ct = otp_seal(pt, mask, code)
        used = ct.block_count * ct.n
        assert mask.consumed == used
        assert not mask.bits[:used].any()

    def test_reuse_detected(self):
        code = BchCode(m=4, t=2)
        mask_a = self._mask(400, seed=6)
        mask_b = self._mask(400, seed=6)
        ct1 = otp_seal(np.ones(7, dtype=np.uint8), mask_a, code)
        otp_open(ct1, mask_b)
        with pytest.raises(MaskReuse):
            otp_open(ct1, mask_b)

    def test_exhaustion(self):
        code = BchCode(m=6, t=3)
        mask = self._mask(40, seed=7)
        with pytest.raises(MaskExhausted):
            otp_seal(np.ones(64, dtype=np.uint8), mask, code)

    def test_ciphertext_file_roundtrip(self, tmp_path):
        code = BchCode(m=4, t=2)
        mask = self._mask(400, seed=8)
        pt = np.array([1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
        ct = otp_seal(pt, mask, code)
        path = tmp_path / "ct.bin"
        write_ciphertext(path, ct)
        back = read_ciphertext(path)
        assert np.array_equal(back.body, ct.body)
        assert back.mask_offset == ct.mask_offset
        assert back.plaintext_bit_length == ct.plaintext_bit_length

    def test_bytes_bits_roundtrip(self):
        data = bytes(range(256))
        assert bits_to_bytes(bytes_to_bits(data)) == data


class TestSync:
    def test_parity_exchange_corrects_mask(self):
        sel = select_params(2e-3, 5000, dfr_target=2.0 ** -40, safety="none")
        rng = np.random.default_rng(9)
        bits_b = rng.integers(0, 2, 5000).astype(np.uint8)
        bits_a = bits_b.copy()
        flips = rng.choice(5000, size=8, replace=False)
        bits_a[flips] ^= 1
        parity = parity_for_mask(bits_b, sel)
        corrected, n_corr = correct_mask(bits_a, parity, sel)
        assert np.array_equal(corrected, bits_b)
        assert n_corr == 8

    def test_identical_masks_need_no_corrections(self):
        sel = select_params(1e-3, 2000, dfr_target=2.0 ** -40, safety="none")
        rng = np.random.default_rng(10)
        bits = rng.integers(0, 2, 2000).astype(np.uint8)
        parity = parity_for_mask(bits, sel)
        corrected, n_corr = correct_mask(bits.copy(), parity, sel)
        assert np.array_equal(corrected, bits)
        assert n_corr == 0
