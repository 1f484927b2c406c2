"""End-to-end orchestration: simulate, recover, exchange, reconcile.

Wires the module chain together: molecular simulation produces two pad
aliquots (optionally attacked in transit), each party independently
sequences and recovers a consensus key table, the public protocol sifts
and orders the shared keys, payloads digitize into binary masks, the
sacrificial error-estimation blocks calibrate the channel, and BCH
parity exchange makes the two masks identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import digitize, protocol, seq, sentinel
from .config import RunConfig
from .molsim import (SeqErrorModel, SynthesisBias, assemble_keys,
                     attack_copy_replace, attack_steal, denature_split,
                     pcr_amplify, sequence_pad, synthesize_pool, umi_tag)
from .pipeline import (Read, ReadSet, call_clusters, cluster_iterative,
                       estimate_diversity, filter_consensus, filter_reads,
                       orient_and_align)
from .reconcile import (correct_mask, otp_open, otp_seal, parity_for_mask,
                        select_params)
from .template import KeyTemplate


def build_template(cfg: RunConfig) -> KeyTemplate:
    t = cfg.template
    if (t.blocks_per_strand, t.block_len) != (14, 5):
        raise ValueError("non-default template geometries need explicit "
                         "spacer/flank sequences")
    return KeyTemplate()


def build_bias(cfg: RunConfig, template: KeyTemplate) -> SynthesisBias:
    L = template.blocks_per_strand * template.block_len
    b = cfg.bias
    if b.kind == "uniform":
        return SynthesisBias.uniform(L)
    if b.kind == "drift":
        return SynthesisBias.with_drift(L, b.drift_start, b.drift_slope)
    return SynthesisBias.nanopore_like(L, corr_order=b.corr_order)


@dataclass
class SimResult:
    template: KeyTemplate
    keys: object                 # ground-truth KeySet
    alice_pad: object
    bob_pad: object
    eve_pad: object              # None without an attack


def simulate(cfg: RunConfig) -> SimResult:
    """Synthesize, assemble, amplify, split and (optionally) attack."""
    template = build_template(cfg)
    bias = build_bias(cfg, template)
    pool_a = synthesize_pool(template, bias, cfg.synthesis.pool_size,
                             seed=cfg.seeds.pool_a)
    pool_b = synthesize_pool(template, bias, cfg.synthesis.pool_size,
                             seed=cfg.seeds.pool_b)
    keys = assemble_keys(pool_a, pool_b, cfg.synthesis.diversity,
                         seed=cfg.seeds.assemble)
    pad = keys.to_pad("Alice", cfg.seeds.assemble)
    if cfg.amplify.cycles > 0:
        pad = pcr_amplify(pad, cfg.amplify.cycles, cfg.amplify.efficiency,
                          cfg.amplify.err_rate, seed=cfg.seeds.amplify)
    alice_pad, transit = denature_split(pad, seed=cfg.seeds.split)
    eve_pad = None
    atk = cfg.attack
    if atk.scenario == "steal":
        eve_pad, transit = attack_steal(transit, atk.fraction,
                                        seed=cfg.seeds.attack)
    elif atk.scenario == "copy_replace":
        eve_pad, transit = attack_copy_replace(
            transit, atk.cycles, atk.efficiency, atk.err_rate,
            return_fraction=atk.return_fraction, seed=cfg.seeds.attack)
    transit.owner = "Bob"
    return SimResult(template, keys, alice_pad, transit, eve_pad)


def records_to_readset(records) -> ReadSet:
    return ReadSet.from_reads(
        Read(rid, seq.encode(bases), seq.ascii_to_quals(quals))
        for rid, bases, quals in records)


def sequence_party(pad, template, cfg: RunConfig, umi_seed: int,
                   seq_seed: int, depth: float = None, path=None):
    """Tag a pad with UMIs and sequence it."""
    if cfg.umi.length > 0:
        pad = umi_tag(pad, cfg.umi.length, cfg.umi.mis_tag_rate,
                      seed=umi_seed)
    s = cfg.sequencing
    model = SeqErrorModel(s.sub_rate, s.ins_rate, s.del_rate,
                          depth if depth is not None else s.depth, s.q_sigma)
    return sequence_pad(pad, template, model, seed=seq_seed, path=path)


def run_pipeline(reads: ReadSet, template, cfg: RunConfig):
    """Reads -> filtered consensus key table, with per-stage statistics."""
    p = cfg.pipeline
    stats = {"reads_in": len(reads)}
    reads = filter_reads(reads, p.min_median_q,
                         (p.len_window_lo, p.len_window_hi),
                         template_length=template.total_length
                         + 2 * cfg.umi.length)
    stats["reads_after_filter"] = len(reads)
    aligned = orient_and_align(reads, template, umi_len=cfg.umi.length,
                               band=p.band, min_score_frac=p.min_score_frac)
    stats["reads_aligned"] = len(aligned)
    clusters = cluster_iterative(aligned)
    stats["clusters"] = clusters.n_clusters
    keys = call_clusters(aligned, clusters)
    dv = estimate_diversity(keys.cluster_size)
    stats["diversity_estimate"] = dv.diversity
    keys, removed = filter_consensus(keys, template, p.min_payload_q,
                                     p.median_ratio, p.min_cluster_size)
    stats["removed"] = removed
    # protocol hygiene: no wildcard bases may enter announcements or masks
    clean = ~np.any(keys.bases > seq.T, axis=(1, 2))
    stats["removed"]["wildcard"] = int(np.sum(~clean))
    keys = keys.select(clean)
    stats["keys_kept"] = len(keys)
    return keys, stats


@dataclass
class ExchangeResult:
    auth_alice: protocol.AuthResult      # Alice authenticating Bob
    auth_bob: protocol.AuthResult
    ordering: protocol.Message
    shared_indices: list
    mask_alice: digitize.BinaryMask
    mask_bob: digitize.BinaryMask
    channel: digitize.ChannelEstimate
    announce_alice: protocol.Message
    announce_bob: protocol.Message
    errseq_bob: protocol.Message


def exchange(alice_keys, bob_keys, template, cfg: RunConfig) -> ExchangeResult:
    """Public-channel authenticate + sift + order + digitize."""
    pad_id = cfg.pad_id
    idx_a = protocol.indices_of(alice_keys, template)
    idx_b = protocol.indices_of(bob_keys, template)
    ann_a = protocol.IndexAnnouncement("Alice", pad_id, idx_a)
    ann_b = protocol.IndexAnnouncement("Bob", pad_id, idx_b)
    auth_a = protocol.authenticate(idx_a, ann_b, cfg.protocol.tau)
    auth_b = protocol.authenticate(idx_b, ann_a, cfg.protocol.tau)
    if not (auth_a.accept and auth_b.accept):
        raise protocol.ProtocolError(
            f"authentication failed (overlap {auth_a.overlap_fraction:.3f} "
            f"/ {auth_b.overlap_fraction:.3f} vs tau {cfg.protocol.tau})")
    ordering = protocol.sift(idx_a, ann_b, "Alice", pad_id,
                             seed=cfg.seeds.sift)

    def masks_for(keys, idx):
        payload = keys.block_view(template, template.payload_block_range)
        errblk = keys.block_view(template, template.error_est_block_range)
        pay_o = protocol.apply_ordering(idx, payload, ordering)
        err_o = protocol.apply_ordering(idx, errblk, ordering)
        mask = digitize.build_mask(digitize.digitize_matrix(pay_o),
                                   provenance=pad_id)
        errbits = digitize.digitize_matrix(err_o)
        return mask, err_o, errbits

    mask_a, err_a_seqs, errbits_a = masks_for(alice_keys, idx_a)
    mask_b, err_b_seqs, errbits_b = masks_for(bob_keys, idx_b)
    # Bob publishes his sacrificial error-estimation sequences in O_r order
    errseq_b = protocol.Message("errseq", "Bob", pad_id,
                                [seq.decode(r) for r in err_b_seqs])
    channel = digitize.estimate_error_rate(errbits_a.ravel(),
                                           errbits_b.ravel())
    return ExchangeResult(auth_a, auth_b, ordering, list(ordering.seqs),
                          mask_a, mask_b, channel, ann_a, ann_b, errseq_b)


def reconcile_masks(ex: ExchangeResult, cfg: RunConfig):
    """Bob sends BCH parity; Alice corrects her mask to equal Bob's."""
    r = cfg.reconcile
    ch = ex.channel
    sel = select_params(ch.p_est, ex.mask_bob.n_bits,
                        dfr_target=2.0 ** -r.dfr_exponent,
                        sample_bits=ch.sample_bits,
                        mismatches=ch.mismatches,
                        m_range=(r.m_min, r.m_max), safety=r.safety)
    parity = parity_for_mask(ex.mask_bob.bits, sel)
    corrected, n_corr = correct_mask(ex.mask_alice.bits, parity, sel)
    mask = digitize.BinaryMask(corrected, ex.mask_alice.n_keys,
                               ex.mask_alice.bits_per_key,
                               provenance=ex.mask_alice.provenance)
    return mask, sel, parity, n_corr


def run_e2e(cfg: RunConfig, message_bits: np.ndarray = None) -> dict:
    """Full Alice/Bob(/Eve) run; returns artifacts and a summary dict."""
    sim = simulate(cfg)
    template = sim.template
    reads_a = records_to_readset(sequence_party(
        sim.alice_pad, template, cfg, cfg.seeds.umi_alice, cfg.seeds.seq_alice))
    reads_b = records_to_readset(sequence_party(
        sim.bob_pad, template, cfg, cfg.seeds.umi_bob, cfg.seeds.seq_bob))
    keys_a, stats_a = run_pipeline(reads_a, template, cfg)
    keys_b, stats_b = run_pipeline(reads_b, template, cfg)
    ex = exchange(keys_a, keys_b, template, cfg)
    mask_a_rec, sel, parity, n_corr = reconcile_masks(ex, cfg)

    true_mism = int(np.sum(ex.mask_alice.bits != ex.mask_bob.bits))
    summary = {
        "pad_id": cfg.pad_id,
        "diversity": cfg.synthesis.diversity,
        "alice": stats_a,
        "bob": stats_b,
        "auth": {
            "alice_accepts_bob": ex.auth_alice.accept,
            "bob_accepts_alice": ex.auth_bob.accept,
            "overlap": ex.auth_alice.overlap,
            "expected_random_overlap": ex.auth_alice.expected_random_overlap,
        },
        "shared_keys": len(ex.shared_indices),
        "mask_bits": ex.mask_bob.n_bits,
        "channel": {
            "p_est": ex.channel.p_est,
            "ci": [ex.channel.ci_low, ex.channel.ci_high],
            "sample_bits": ex.channel.sample_bits,
            "true_mismatch_rate": true_mism / max(ex.mask_bob.n_bits, 1),
        },
        "code": {
            "m": sel.code.m, "t": sel.code.t, "n": sel.code.n,
            "k": sel.code.k, "blocks": sel.block_count,
            "overhead": sel.overhead,
            "dfr_bound": sel.total_dfr_bound,
        },
        "corrections": n_corr,
        "masks_identical": bool(np.array_equal(mask_a_rec.bits,
                                               ex.mask_bob.bits)),
    }
    artifacts = {
        "sim": sim, "keys_alice": keys_a, "keys_bob": keys_b,
        "exchange": ex, "mask_reconciled": mask_a_rec, "selection": sel,
        "parity": parity,
    }
    if message_bits is not None:
        message_bits = np.asarray(message_bits, dtype=np.uint8)
        seal_sel = select_params(
            ex.channel.p_est, int(message_bits.size),
            dfr_target=2.0 ** -cfg.reconcile.dfr_exponent,
            sample_bits=ex.channel.sample_bits,
            mismatches=ex.channel.mismatches,
            m_range=(cfg.reconcile.m_min, cfg.reconcile.m_max),
            safety=cfg.reconcile.safety,
            total_bits_max=ex.mask_bob.n_bits)
        mask_seal = digitize.BinaryMask(ex.mask_bob.bits.copy(),
                                        ex.mask_bob.n_keys,
                                        ex.mask_bob.bits_per_key)
        ct = otp_seal(message_bits, mask_seal, seal_sel.code)
        mask_open = digitize.BinaryMask(mask_a_rec.bits.copy(),
                                        mask_a_rec.n_keys,
                                        mask_a_rec.bits_per_key)
        recovered = otp_open(ct, mask_open)
        summary["message_roundtrip"] = bool(
            np.array_equal(recovered, np.asarray(message_bits,
                                                 dtype=np.uint8)))
    if sim.eve_pad is not None and sim.eve_pad.n_rows > 0:
        reads_e = records_to_readset(sequence_party(
            sim.eve_pad, template, cfg, cfg.seeds.umi_eve,
            cfg.seeds.seq_eve, depth=cfg.attack.eve_depth))
        keys_e, stats_e = run_pipeline(reads_e, template, cfg)
        idx_e = protocol.indices_of(keys_e, template)
        venn = sentinel.tripartite_check(
            protocol.indices_of(keys_a, template),
            protocol.indices_of(keys_b, template), idx_e)
        summary["eve"] = stats_e
        summary["venn"] = {"A&B": venn.ab, "A&E": venn.ae,
                           "B&E": venn.be, "A&B&E": venn.abe}
        shared = set(ex.shared_indices)
        summary["eve_captured_fraction"] = (
            len(shared.intersection(idx_e)) / len(shared) if shared else 0.0)
        artifacts["keys_eve"] = keys_e
    return summary, artifacts
