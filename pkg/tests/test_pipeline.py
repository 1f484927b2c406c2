import numpy as np
import pytest

from dnaotp import seq
from dnaotp.pipeline.align import AlignedReads, _banded_nw, _extract
from dnaotp.pipeline.cluster import cluster_iterative, rank_blocks
from dnaotp.pipeline.consensus import (DISSENT_PENALTY, ConsensusKeys,
                                       call_clusters, consensus_call,
                                       filter_consensus)
from dnaotp.pipeline.diversity import estimate_diversity
from dnaotp.pipeline.fastq import Read, ReadSet, read_fastq, write_fastq
from dnaotp.pipeline.filters import barcode_prefilter, filter_reads
from dnaotp.pipeline.table import read_consensus_table, write_consensus_table
from dnaotp.template import DEFAULT_TEMPLATE

MATCH, MISMATCH, GAP = 1, -1, -2


def full_nw_score(ref, read):
    """Unbanded global NW oracle with the same scoring; N in the
    reference (code 4) matches any read base."""
    R, L = ref.size, read.size
    score = np.full((R + 1, L + 1), -10 ** 9, dtype=np.int64)
    score[0, :] = GAP * np.arange(L + 1)
    score[1:, 0] = -10 ** 9  # leading ref-gaps not allowed by the banded DP
    for i in range(1, R + 1):
        for j in range(L + 1):
            best = -10 ** 9
            if j > 0:
                sub = MATCH if (ref[i - 1] == 4 or ref[i - 1] == read[j - 1]) \
                    else MISMATCH
                best = max(best, score[i - 1, j - 1] + sub)
            best = max(best, score[i - 1, j] + GAP)
            if j > 0:
                best = max(best, score[i, j - 1] + GAP)
            score[i, j] = best
    return score[R, L]


class TestBandedNw:
    @pytest.mark.parametrize("seed", range(10))
    def test_score_matches_full_nw(self, seed):
        rng = np.random.default_rng(seed)
        ref = rng.integers(0, 4, 60).astype(np.uint8)
        ref[rng.choice(60, 12, replace=False)] = 4  # wildcard stretch
        # derive a read by light mutation of the reference
        read = ref.copy()
        read[read == 4] = rng.integers(0, 4, int((read == 4).sum()))
        subs = rng.random(60) < 0.05
        read[subs] = (read[subs] + rng.integers(1, 4, int(subs.sum()))) % 4
        dels = rng.random(60) < 0.03
        read = np.ascontiguousarray(read[~dels], dtype=np.uint8)
        got, _ = _banded_nw(ref, read, 12)
        assert got == full_nw_score(ref, read)

    def test_perfect_read_scores_full_match(self):
        rng = np.random.default_rng(99)
        ref = rng.integers(0, 4, 40).astype(np.uint8)
        score, ops = _banded_nw(ref, ref.copy(), 8)
        assert score == 40
        assert np.all(ops == 0)


def _ops(forward):
    """Forward op list -> reversed int8 array as _banded_nw returns."""
    return np.array(forward[::-1], dtype=np.int8)


class TestExtractionRules:
    def test_clean_alignment_passthrough(self):
        ref = seq.encode("ACGT")
        read = seq.encode("ACGT")
        quals = np.array([20, 21, 22, 23], dtype=np.int16)
        b, q = _extract(ref, read, quals, _ops([0, 0, 0, 0]))
        assert np.array_equal(b, read)
        assert np.array_equal(q, quals)

    def test_insertion_keeps_first_base_and_min_q(self):
        # read ACXGT vs ref ACGT: the run {X, G} spans ref position 2;
        # the first base of the run (X) is kept with the run's min Q
        ref = seq.encode("ACGT")
        read = seq.encode("ACAGT")  # X = A inserted
        quals = np.array([20, 21, 5, 22, 23], dtype=np.int16)
        b, q = _extract(ref, read, quals, _ops([0, 0, 2, 0, 0]))
        assert seq.decode(b) == "ACAT"
        assert q.tolist() == [20, 21, 5, 23]  # min(5, 22) at the run

    def test_deletion_gives_n_with_min_neighbor_q(self):
        # read ACT vs ref ACGT: ref G deleted -> N, Q = min(neighbours)
        ref = seq.encode("ACGT")
        read = seq.encode("ACT")
        quals = np.array([20, 9, 23], dtype=np.int16)
        b, q = _extract(ref, read, quals, _ops([0, 0, 1, 0]))
        assert seq.decode(b) == "ACNT"
        assert q.tolist() == [20, 9, 9, 23]  # min(9, 23) fills the gap

    def test_leading_deletion_uses_right_neighbor(self):
        ref = seq.encode("ACG")
        read = seq.encode("CG")
        quals = np.array([15, 16], dtype=np.int16)
        b, q = _extract(ref, read, quals, _ops([1, 0, 0]))
        assert seq.decode(b) == "NCG"
        assert q.tolist() == [15, 15, 16]


# ---------------------------------------------------------------------------
# clustering vs a scalar brute-force oracle

def oracle_cluster(blocks, quals, sextet=6):
    """Plain-python reimplementation of the iterative identifier
    clustering; returns the partition as a set of frozensets."""
    n, nb, bl = blocks.shape
    med = np.median(quals, axis=2)
    m_q = med.mean(axis=0)
    rank = np.argsort(-m_q, kind="stable")
    chunks = [rank[k:k + sextet] for k in range(0, nb, sextet)]

    def chunk_key(read, blks):
        return tuple(int(blocks[read, b, p]) for b in blks for p in range(bl))

    groups = {}
    for r in range(n):
        groups.setdefault(chunk_key(r, chunks[0]), []).append(r)
    clusters = list(groups.values())
    for ch in chunks[1:]:
        merged = {}
        for members in clusters:
            if len(members) == 1:
                ident = chunk_key(members[0], ch)
            else:
                ident = []
                width = len(ch) * bl
                for w in range(width):
                    b, p = ch[w // bl], w % bl
                    counts = [0, 0, 0, 0]
                    for r in members:
                        v = blocks[r, b, p]
                        if v < 4:
                            counts[v] += 1
                    if sum(counts) == 0:
                        ident.append(4)
                    else:
                        ident.append(int(np.argmax(counts)))
                ident = tuple(ident)
            merged.setdefault(tuple(ident), []).append(members)
        clusters = [sum(groups_, []) for groups_ in merged.values()]
    return {frozenset(c) for c in clusters}


def _synthetic_aligned(n_keys, depth, err_rate, seed):
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, 4, (n_keys, 28, 5)).astype(np.uint8)
    rows = np.repeat(np.arange(n_keys), depth)
    blocks = truth[rows].copy()
    noise = rng.random(blocks.shape) < err_rate
    blocks[noise] = rng.integers(0, 5, int(noise.sum()))  # subs and Ns
    quals = rng.integers(5, 40, blocks.shape).astype(np.int16)
    n = rows.size
    return AlignedReads([f"r{i}" for i in range(n)], blocks, quals,
                        np.full(n, -1, np.int32), np.full(n, -1, np.int32),
                        np.full(n, 100, np.int32), np.zeros(n, np.uint8))


class TestClustering:
    @pytest.mark.parametrize("seed,err", [(0, 0.0), (1, 0.01), (2, 0.05)])
    def test_matches_bruteforce_oracle(self, seed, err):
        al = _synthetic_aligned(n_keys=25, depth=6, err_rate=err, seed=seed)
        assert len(al) <= 200
        res = cluster_iterative(al)
        got = {frozenset(np.flatnonzero(res.labels == c).tolist())
               for c in range(res.n_clusters)}
        assert got == oracle_cluster(al.blocks, al.quals)

    def test_zero_error_recovers_keys(self):
        al = _synthetic_aligned(n_keys=40, depth=4, err_rate=0.0, seed=3)
        res = cluster_iterative(al)
        assert res.n_clusters == 40
        # all reads of one key share a label
        for k in range(40):
            labels = res.labels[k * 4:(k + 1) * 4]
            assert len(set(labels.tolist())) == 1

    def test_rank_blocks_orders_by_quality(self):
        al = _synthetic_aligned(n_keys=10, depth=4, err_rate=0.0, seed=4)
        al.quals[:, 7, :] = 40   # make block 7 clearly the best
        al.quals[:, 3, :] = 1    # and block 3 the worst
        rank = rank_blocks(al)
        assert rank[0] == 7 and rank[-1] == 3


class TestConsensusFormula:
    def test_independent_recomputation(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            k = int(rng.integers(1, 8))
            bases = rng.integers(0, 5, (k, 2, 5)).astype(np.uint8)
            quals = rng.integers(1, 41, (k, 2, 5)).astype(np.int16)
            got_b, got_q = consensus_call(bases, quals)
            for pos in range(10):
                col_b = bases.reshape(k, 10)[:, pos]
                col_q = quals.reshape(k, 10)[:, pos]
                weight = [0] * 4
                nread = [0] * 4
                for b, q in zip(col_b, col_q):
                    if b < 4:
                        weight[b] += int(q)
                        nread[b] += 1
                if sum(nread) == 0:
                    exp_b, exp_q = 4, 0
                else:
                    exp_b = int(np.argmax(weight))
                    w_win = weight[exp_b]
                    dissent_w = sum(weight) - w_win
                    n_dis = sum(nread) - nread[exp_b]
                    exp_q = max(0, w_win - dissent_w
                                - round(DISSENT_PENALTY * n_dis))
                assert got_b.reshape(10)[pos] == exp_b
                assert got_q.reshape(10)[pos] == exp_q

    def test_call_clusters_sizes_and_umi(self):
        al = _synthetic_aligned(n_keys=6, depth=5, err_rate=0.0, seed=6)
        al.umi_f[:] = np.arange(30)
        al.umi_r[:] = np.arange(30)
        res = cluster_iterative(al)
        keys = call_clusters(al, res)
        assert sorted(keys.cluster_size.tolist()) == [5] * 6
        assert np.all(keys.umi_multiplicity == 5)


class TestReadFilters:
    def _readset(self):
        reads = [
            Read("good", np.zeros(100, np.uint8),
                 np.full(100, 20, np.int16)),
            Read("lowq", np.zeros(100, np.uint8),
                 np.full(100, 5, np.int16)),
            Read("short", np.zeros(50, np.uint8),
                 np.full(50, 20, np.int16)),
            Read("long", np.zeros(200, np.uint8),
                 np.full(200, 20, np.int16)),
        ]
        return ReadSet.from_reads(reads)

    def test_median_q_and_length_window(self):
        kept = filter_reads(self._readset(), min_median_q=10.0,
                            len_window=(0.85, 1.15), template_length=100)
        assert kept.ids == ["good"]

    def test_absolute_window(self):
        kept = filter_reads(self._readset(), min_median_q=0.0,
                            len_window=(40, 250))
        assert len(kept) == 4

    def test_barcode_prefilter(self):
        flank = DEFAULT_TEMPLATE.fixed_flanks
        rng = np.random.default_rng(7)
        core = rng.integers(0, 4, 60).astype(np.uint8)
        good = np.concatenate([seq.encode(flank[0]), core,
                               seq.encode(flank[1])])
        bad = rng.integers(0, 4, good.size).astype(np.uint8)
        rs = ReadSet.from_reads([
            Read("good", good, np.full(good.size, 20, np.int16)),
            Read("bad", bad, np.full(bad.size, 20, np.int16))])
        kept = barcode_prefilter(rs, flank[0], flank[1])
        assert kept.ids == ["good"]


class TestConsensusFilters:
    def _keys(self, n=10, q=35):
        rng = np.random.default_rng(8)
        bases = rng.integers(0, 4, (n, 28, 5)).astype(np.uint8)
        quals = np.full((n, 28, 5), q, dtype=np.int16)
        return ConsensusKeys(bases, quals, np.full(n, 5, np.int64),
                             np.full(n, 2, np.int64))

    def test_cluster_size_filter(self):
        keys = self._keys()
        keys.cluster_size[3] = 1
        kept, removed = filter_consensus(keys, DEFAULT_TEMPLATE,
                                         min_payload_q=30, median_ratio=0.0)
        assert removed["cluster_size"] == 1
        assert len(kept) == 9

    def test_q_gate_covers_payload_and_error_blocks(self):
        keys = self._keys()
        keys.quals[2, 20, 1] = 10   # payload block below threshold
        keys.quals[5, 3, 0] = 10    # error-estimation block below threshold
        keys.quals[7, 10, 0] = 10   # index block: NOT part of the Q gate
        kept, removed = filter_consensus(keys, DEFAULT_TEMPLATE,
                                         min_payload_q=30, median_ratio=0.0)
        assert removed["payload_min_q"] == 2
        assert len(kept) == 8

    def test_median_ratio_filter(self):
        keys = self._keys()
        keys.quals[4, 25, :] = [1, 35, 35, 35, 35]  # min/median = 1/35
        kept, removed = filter_consensus(keys, DEFAULT_TEMPLATE,
                                         min_payload_q=0, median_ratio=0.5)
        assert removed["block_median_ratio"] == 1
        assert len(kept) == 9

    def test_index_collision_drops_both(self):
        keys = self._keys()
        keys.bases[6, 8:14] = keys.bases[1, 8:14]  # duplicate index
        kept, removed = filter_consensus(keys, DEFAULT_TEMPLATE,
                                         min_payload_q=0, median_ratio=0.0)
        assert removed["index_collision"] == 2
        assert len(kept) == 8


class TestDiversity:
    def test_ztp_recovers_truth(self):
        rng = np.random.default_rng(9)
        n_true = 50000
        lam = 2.5
        sizes = rng.poisson(lam, n_true)
        sizes = sizes[sizes > 0]
        est = estimate_diversity(sizes)
        assert est.lam == pytest.approx(lam, rel=0.02)
        assert est.diversity == pytest.approx(n_true, rel=0.02)
        assert not est.degenerate

    def test_all_singletons_degenerate(self):
        est = estimate_diversity(np.ones(100))
        assert est.degenerate
        assert est.diversity == 100.0

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            estimate_diversity(np.array([2, 0, 3]))


class TestIo:
    def test_fastq_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        reads = [Read(f"read{i} key={i}",
                      rng.integers(0, 5, 30 + i).astype(np.uint8),
                      rng.integers(1, 50, 30 + i).astype(np.int16))
                 for i in range(5)]
        rs = ReadSet.from_reads(reads)
        path = tmp_path / "x.fastq"
        write_fastq(rs, path)
        back = read_fastq(path)
        assert back.ids == rs.ids
        for i in range(5):
            assert np.array_equal(back[i].bases, rs[i].bases)
            assert np.array_equal(back[i].quals, rs[i].quals)

    def test_consensus_table_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        n = 7
        bases = rng.integers(0, 4, (n, 28, 5)).astype(np.uint8)
        bases[0, 2, 3] = 4  # an N must survive the roundtrip
        quals = rng.integers(0, 60, (n, 28, 5)).astype(np.int16)
        keys = ConsensusKeys(bases, quals,
                             rng.integers(1, 9, n).astype(np.int64),
                             rng.integers(0, 4, n).astype(np.int64))
        path = tmp_path / "keys.tsv"
        write_consensus_table(keys, DEFAULT_TEMPLATE, path)
        back = read_consensus_table(path, DEFAULT_TEMPLATE)
        # the table serializes the index/payload/error-est regions; the
        # unused spare block is not part of the format and reads back as N
        for rng_ in (DEFAULT_TEMPLATE.index_block_range,
                     DEFAULT_TEMPLATE.payload_block_range,
                     DEFAULT_TEMPLATE.error_est_block_range):
            assert np.array_equal(back.block_view(DEFAULT_TEMPLATE, rng_),
                                  keys.block_view(DEFAULT_TEMPLATE, rng_))
        assert np.all(back.bases[:, 7] == 4)
        assert np.array_equal(back.quals, keys.quals)
        assert np.array_equal(back.cluster_size, keys.cluster_size)
        assert np.array_equal(back.umi_multiplicity, keys.umi_multiplicity)

    def test_table_bad_magic(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("#something-else\n")
        with pytest.raises(ValueError):
            read_consensus_table(path, DEFAULT_TEMPLATE)
