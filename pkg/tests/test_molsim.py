import numpy as np
import pytest

from dnaotp import seq
from dnaotp.molsim import (KeySet, PadInventory, SynthesisBias,
                           assemble_keys, attack_copy_replace, attack_steal,
                           bottleneck, denature_split, load_pad, pcr_amplify,
                           save_pad, synthesize_pool, umi_tag)
from dnaotp.molsim.pad import DIRECT, REVCOMP
from dnaotp.molsim.sequencing import SeqErrorModel, simulate_reads
from dnaotp.template import DEFAULT_TEMPLATE

TPL = DEFAULT_TEMPLATE
L_HALF = TPL.blocks_per_strand * TPL.block_len  # 70


def _keys(n, seed=0):
    rng = np.random.default_rng(seed)
    return KeySet(rng.integers(0, 4, (n, 2 * L_HALF)).astype(np.uint8))


class TestBias:
    def test_uniform_frequencies(self):
        bias = SynthesisBias.uniform(L_HALF)
        rng = np.random.default_rng(0)
        mat = bias.sample(20000, rng)
        freq = np.bincount(mat.ravel(), minlength=4) / mat.size
        assert np.allclose(freq, 0.25, atol=0.005)

    def test_drift_positional_profile(self):
        start = [0.40, 0.20, 0.20, 0.20]
        slope = [-0.002, 0.001, 0.0005, 0.0005]
        bias = SynthesisBias.with_drift(L_HALF, start, slope)
        rng = np.random.default_rng(1)
        mat = bias.sample(50000, rng)
        for pos in (0, 35, 69):
            freq_a = np.mean(mat[:, pos] == 0)
            expect = start[0] + slope[0] * pos
            total = sum(s + m * pos for s, m in zip(start, slope))
            assert freq_a == pytest.approx(expect / total, abs=0.01)

    def test_nanopore_homopolymer_correlation(self):
        bias = SynthesisBias.nanopore_like(L_HALF)
        rng = np.random.default_rng(2)
        mat = bias.sample(50000, rng)
        same = np.mean(mat[:, 1:] == mat[:, :-1])
        # independent draws give sum(p^2) ~ 0.2505; the +0.02
        # homopolymer boost must be visible
        assert same > 0.26

    def test_deterministic_given_seed(self):
        bias = SynthesisBias.nanopore_like(L_HALF)
        a = bias.sample(100, np.random.default_rng(3))
        b = bias.sample(100, np.random.default_rng(3))
        assert np.array_equal(a, b)


class TestPoolAssembly:
    def test_synthesize_shape(self):
        pool = synthesize_pool(TPL, SynthesisBias.uniform(L_HALF), 50, seed=4)
        assert pool.content.shape == (50, L_HALF)

    def test_bias_length_mismatch(self):
        with pytest.raises(ValueError):
            synthesize_pool(TPL, SynthesisBias.uniform(10), 5, seed=5)

    def test_assemble_pairs_halves(self):
        ip = synthesize_pool(TPL, SynthesisBias.uniform(L_HALF), 40, seed=6)
        pp = synthesize_pool(TPL, SynthesisBias.uniform(L_HALF), 40, seed=7)
        ks = assemble_keys(ip, pp, 30, seed=8)
        assert ks.content.shape == (30, 2 * L_HALF)
        # each half-key must come from the corresponding pool, unduplicated
        idx_rows = {row.tobytes() for row in ks.content[:, :L_HALF]}
        pool_rows = {row.tobytes() for row in ip.content}
        assert len(idx_rows) == 30 and idx_rows <= pool_rows

    def test_assemble_overdraw_rejected(self):
        ip = synthesize_pool(TPL, SynthesisBias.uniform(L_HALF), 10, seed=9)
        with pytest.raises(ValueError):
            assemble_keys(ip, ip, 11, seed=10)


class TestPad:
    def test_two_copies_per_key(self):
        ks = _keys(25)
        pad = ks.to_pad("master")
        assert pad.n_rows == 50
        assert pad.total_molecules == 50
        assert pad.diversity == 25
        assert pad.strand.tolist() == [DIRECT, REVCOMP] * 25
        assert np.all(pad.count == 1)

    def test_full_sequences_revcomp_consistent(self):
        ks = _keys(3, seed=11)
        pad = ks.to_pad("master")
        mats = pad.full_sequences(TPL)
        direct = mats[pad.strand == DIRECT]
        rc = mats[pad.strand == REVCOMP]
        assert np.array_equal(seq.revcomp_matrix(rc), direct)

    def test_save_load_roundtrip(self, tmp_path):
        pad = umi_tag(_keys(10, seed=12).to_pad("Alice"), umi_len=5, seed=13)
        path = tmp_path / "pad.npz"
        save_pad(pad, path)
        back = load_pad(path)
        assert back.owner == pad.owner
        assert np.array_equal(back.key_id, pad.key_id)
        assert np.array_equal(back.umi_f, pad.umi_f)
        assert back.umi_len == 5
        assert np.array_equal(back.content, pad.content)

    def test_bottleneck_uniform(self):
        pad = _keys(100, seed=14).to_pad("m")
        sub = bottleneck(pad, target_diversity=40, seed=15)
        assert sub.diversity == 40
        assert sub.total_molecules == 80  # both copies of each chosen key

    def test_bottleneck_poisson_survival(self):
        pad = _keys(20000, seed=16).to_pad("m")
        lam = 0.8
        sub = bottleneck(pad, lam=lam, seed=17, mode="poisson")
        frac = sub.n_rows / pad.n_rows
        assert frac == pytest.approx(1 - np.exp(-lam), abs=0.01)


class TestSplit:
    def test_conservation(self):
        pad = _keys(500, seed=18).to_pad("m")
        a, b = denature_split(pad, seed=19)
        assert a.total_molecules + b.total_molecules == pad.total_molecules
        assert a.owner == "Alice" and b.owner == "Bob"

    def test_partition_law(self):
        """2-copy keys land (2,0)/(1,1)/(0,2) with probability 1/4, 1/2,
        1/4 -- checked at 5 sigma here; the acceptance test pins 4 sigma
        at N = 1e5."""
        n = 20000
        pad = _keys(n, seed=20).to_pad("m")
        a, _ = denature_split(pad, seed=21)
        copies = np.zeros(n, dtype=np.int64)
        np.add.at(copies, a.key_id, a.count)
        counts = np.bincount(copies, minlength=3)
        for k, p in ((0, 0.25), (1, 0.5), (2, 0.25)):
            sigma = np.sqrt(n * p * (1 - p))
            assert abs(counts[k] - n * p) < 5 * sigma


class TestUmiTag:
    def test_one_tag_per_molecule(self):
        pad = _keys(50, seed=22).to_pad("m")
        pad.count[:] = 3  # pretend each row has 3 physical copies
        tagged = umi_tag(pad, umi_len=5, seed=23)
        assert tagged.n_rows == 300
        assert np.all(tagged.count == 1)
        assert tagged.tagged
        assert tagged.umi_f.min() >= 0 and tagged.umi_f.max() < 4 ** 5

    def test_double_tagging_rejected(self):
        tagged = umi_tag(_keys(5, seed=24).to_pad("m"), seed=25)
        with pytest.raises(ValueError):
            umi_tag(tagged, seed=26)

    def test_mis_tag_rate_spawns_extra_lineages(self):
        pad = _keys(5000, seed=27).to_pad("m")
        tagged = umi_tag(pad, mis_tag_rate=0.1, seed=28)
        extra = tagged.n_rows - pad.total_molecules
        assert extra == pytest.approx(0.1 * pad.total_molecules, rel=0.15)


class TestPcr:
    def test_perfect_doubling(self):
        pad = _keys(20, seed=29).to_pad("m")
        out = pcr_amplify(pad, cycles=3, efficiency=1.0, err_rate=0.0)
        assert out.total_molecules == pad.total_molecules * 8
        assert pad.total_molecules == 40  # input untouched

    def test_expected_growth(self):
        pad = _keys(2000, seed=30).to_pad("m")
        out = pcr_amplify(pad, cycles=4, efficiency=0.8, err_rate=0.0, seed=31)
        expect = pad.total_molecules * 1.8 ** 4
        assert out.total_molecules == pytest.approx(expect, rel=0.02)

    def test_errors_spawn_variants(self):
        pad = _keys(200, seed=32).to_pad("m")
        out = pcr_amplify(pad, cycles=8, efficiency=1.0, err_rate=1e-3,
                          seed=33)
        assert out.variants.shape[0] > 0
        mut = np.flatnonzero(out.variant >= 0)
        pristine = out.content[out.key_id[mut]]
        changed = out.variants[out.variant[mut]] != pristine
        # variants differ from the pristine sequence except for the rare
        # variant-of-a-variant whose second hit reverts the first
        assert changed.any(axis=1).mean() > 0.999
        assert np.all(out.lineage[mut] >= 1)

    def test_invalid_args(self):
        pad = _keys(2, seed=34).to_pad("m")
        with pytest.raises(ValueError):
            pcr_amplify(pad, cycles=-1)
        with pytest.raises(ValueError):
            pcr_amplify(pad, cycles=1, efficiency=1.5)


class TestSequencing:
    def test_phred_promise(self):
        """Observed substitution rate at each emitted Q must match
        10^(-Q/10) -- the Phred promise holds by construction."""
        model = SeqErrorModel(sub_rate=0.02, ins_rate=0.0, del_rate=0.0)
        rng = np.random.default_rng(35)
        mat = rng.integers(0, 4, (4000, 100)).astype(np.uint8)
        out_b, out_q, lengths = simulate_reads(mat, model, rng)
        assert np.all(lengths == 100)
        bases = out_b.reshape(4000, 100)
        quals = out_q.reshape(4000, 100)
        wrong = bases != mat
        # pool Q values with enough mass for a tight check
        for q in np.unique(quals):
            sel = quals == q
            if sel.sum() < 50000:
                continue
            assert wrong[sel].mean() == pytest.approx(10 ** (-q / 10.0),
                                                      rel=0.2)
        assert wrong.mean() == pytest.approx(0.02, rel=0.1)

    def test_indel_length_shift(self):
        model = SeqErrorModel(sub_rate=0.0, ins_rate=0.0, del_rate=0.05)
        rng = np.random.default_rng(36)
        mat = rng.integers(0, 4, (2000, 200)).astype(np.uint8)
        _, _, lengths = simulate_reads(mat, model, rng)
        assert lengths.mean() == pytest.approx(200 * 0.95, rel=0.01)

    def test_insertions_lengthen(self):
        model = SeqErrorModel(sub_rate=0.0, ins_rate=0.05, del_rate=0.0)
        rng = np.random.default_rng(37)
        mat = rng.integers(0, 4, (2000, 200)).astype(np.uint8)
        _, _, lengths = simulate_reads(mat, model, rng)
        assert lengths.mean() == pytest.approx(200 * 1.05, rel=0.01)

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            SeqErrorModel(sub_rate=1.2)


class TestAttacks:
    def test_steal_conserves_molecules(self):
        pad = umi_tag(_keys(2000, seed=38).to_pad("Bob"), seed=39)
        eve, bob = attack_steal(pad, 0.3, seed=40)
        assert eve.total_molecules + bob.total_molecules == pad.total_molecules
        assert eve.total_molecules == pytest.approx(
            0.3 * pad.total_molecules, rel=0.1)
        assert eve.owner == "Eve"

    def test_steal_extremes(self):
        pad = _keys(100, seed=41).to_pad("Bob")
        eve, bob = attack_steal(pad, 0.0, seed=42)
        assert eve.total_molecules == 0
        assert bob.total_molecules == pad.total_molecules
        eve, bob = attack_steal(pad, 1.0, seed=43)
        assert bob.total_molecules == 0

    def test_copy_replace_default_return(self):
        pad = _keys(1000, seed=44).to_pad("Bob")
        eve, bob = attack_copy_replace(pad, cycles=2, efficiency=1.0,
                                       err_rate=0.0, seed=45)
        assert bob.total_molecules == pad.total_molecules
        amplified_total = pad.total_molecules * 4
        assert eve.total_molecules == amplified_total - pad.total_molecules

    def test_copy_replace_return_fraction(self):
        pad = _keys(1000, seed=46).to_pad("Bob")
        eve, bob = attack_copy_replace(pad, cycles=1, efficiency=1.0,
                                       err_rate=0.0, return_fraction=0.5,
                                       seed=47)
        total = pad.total_molecules * 2
        assert bob.total_molecules == total // 2
        assert eve.total_molecules == total - total // 2

    def test_copy_replace_arg_conflict(self):
        pad = _keys(10, seed=48).to_pad("Bob")
        with pytest.raises(ValueError):
            attack_copy_replace(pad, cycles=1, return_count=5,
                                return_fraction=0.5)
