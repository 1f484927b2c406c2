"""Command-line interface: the full Alice/Bob/Eve workflow as subcommands.

Exit codes: 0 success, 2 usage, 3 config/schema error, 4 file-format
error, 5 protocol desynchronization/authentication failure, 6 decode
failure, 7 no feasible code, 1 anything else.
"""

from __future__ import annotations

import dataclasses
import importlib.resources
import json
import os
import sys

import click
import numpy as np

from . import digitize, protocol, seq, sentinel
from .config import ConfigError, RunConfig, config_from_dict, load_config
from .digitize import FormatError
from .entropy import assess
from .molsim import save_pad
from .pipeline import read_consensus_table, read_fastq, write_consensus_table
from .protocol import ProtocolError
from .reconcile import (DecodeFailure, NoFeasibleCode, bits_to_bytes,
                        bytes_to_bits, otp_open, otp_seal, read_ciphertext,
                        select_params, write_ciphertext)
from . import workflow

EXIT_CONFIG, EXIT_FORMAT, EXIT_PROTOCOL, EXIT_DECODE, EXIT_NOCODE = 3, 4, 5, 6, 7

_ERROR_CODES = (
    (ConfigError, EXIT_CONFIG),
    (FormatError, EXIT_FORMAT),
    (ProtocolError, EXIT_PROTOCOL),
    (DecodeFailure, EXIT_DECODE),
    (NoFeasibleCode, EXIT_NOCODE),
)


def _fail(exc: Exception) -> "SystemExit":
    for cls, code in _ERROR_CODES:
        if isinstance(exc, cls):
            click.echo(f"error: {exc}", err=True)
            return SystemExit(code)
    click.echo(f"error: {exc}", err=True)
    return SystemExit(1)


def _load_cfg(config_path, seed=None) -> RunConfig:
    cfg = load_config(config_path) if config_path else config_from_dict({})
    if seed is not None:
        seeds = cfg.seeds
        for f in dataclasses.fields(seeds):
            setattr(seeds, f.name, getattr(seeds, f.name) + seed)
    return cfg


def _emit(data: dict, as_json: bool, text: str = None) -> None:
    if as_json:
        click.echo(json.dumps(data, indent=2, sort_keys=True, default=str))
    else:
        click.echo(text if text is not None
                   else json.dumps(data, indent=2, sort_keys=True, default=str))


@click.group()
def main():
    """DNA-synchronized one-time-pad toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="offset added to all seeds")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def simulate(config_path, seed, out_dir, as_json):
    """Simulate pads and sequencing reads for all parties."""
    try:
        cfg = _load_cfg(config_path, seed)
        os.makedirs(out_dir, exist_ok=True)
        sim = workflow.simulate(cfg)
        info = {"pad_id": cfg.pad_id, "diversity": cfg.synthesis.diversity}
        parties = [("alice", sim.alice_pad, cfg.seeds.umi_alice,
                    cfg.seeds.seq_alice, None),
                   ("bob", sim.bob_pad, cfg.seeds.umi_bob,
                    cfg.seeds.seq_bob, None)]
        if sim.eve_pad is not None and sim.eve_pad.n_rows > 0:
            parties.append(("eve", sim.eve_pad, cfg.seeds.umi_eve,
                            cfg.seeds.seq_eve, cfg.attack.eve_depth))
        for name, pad, umi_seed, seq_seed, depth in parties:
            save_pad(pad, os.path.join(out_dir, f"{name}.pad.npz"),
                     sim.template.content_hash())
            n = workflow.sequence_party(
                pad, sim.template, cfg, umi_seed, seq_seed, depth=depth,
                path=os.path.join(out_dir, f"{name}.fastq"))
            info[f"{name}_molecules"] = pad.total_molecules
            info[f"{name}_reads"] = n
        with open(os.path.join(out_dir, "sim.json"), "w") as fh:
            json.dump(info, fh, indent=2, sort_keys=True)
        _emit(info, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--reads", "reads_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def pipeline(config_path, reads_path, out_path, as_json):
    """Reads (FASTQ) -> filtered consensus key table (TSV)."""
    try:
        cfg = _load_cfg(config_path)
        template = workflow.build_template(cfg)
        reads = read_fastq(reads_path)
        keys, stats = workflow.run_pipeline(reads, template, cfg)
        write_consensus_table(keys, template, out_path)
        _emit(stats, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--table", "table_path", required=True,
              type=click.Path(exists=True))
@click.option("--remote", "remote_path", type=click.Path(exists=True),
              help="remote index announcement to sift against")
@click.option("--party", default="Alice")
@click.option("--seed", type=int, default=None)
@click.option("--announce-out", type=click.Path(),
              help="write the local index announcement here")
@click.option("--ordering-out", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def sift(config_path, table_path, remote_path, party, seed, announce_out,
         ordering_out, as_json):
    """Authenticate a remote announcement and emit the ordering O_r."""
    try:
        cfg = _load_cfg(config_path, seed)
        template = workflow.build_template(cfg)
        keys = read_consensus_table(table_path, template)
        idx = protocol.indices_of(keys, template)
        out = {"party": party, "indices": len(idx)}
        if announce_out:
            protocol.IndexAnnouncement(party, cfg.pad_id, idx).write(
                announce_out)
            out["announcement"] = announce_out
        if remote_path:
            remote = protocol.Message.read(remote_path)
            auth = protocol.authenticate(idx, remote, cfg.protocol.tau)
            out["auth"] = dataclasses.asdict(auth)
            if not auth.accept:
                raise ProtocolError(
                    f"authentication rejected: overlap fraction "
                    f"{auth.overlap_fraction:.4f} < tau {auth.threshold}")
            ordering = protocol.sift(idx, remote, party, cfg.pad_id,
                                     seed=cfg.seeds.sift)
            out["shared"] = len(ordering.seqs)
            if ordering_out:
                ordering.write(ordering_out)
                out["ordering"] = ordering_out
        _emit(out, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--table", "table_path", required=True,
              type=click.Path(exists=True))
@click.option("--ordering", "ordering_path", required=True,
              type=click.Path(exists=True))
@click.option("--party", default="Alice")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--errseq-out", type=click.Path(),
              help="write error-estimation sequences (public) here")
@click.option("--remote-errseq", type=click.Path(exists=True),
              help="estimate the channel against this remote errseq message")
@click.option("--json", "as_json", is_flag=True)
def mask(config_path, table_path, ordering_path, party, out_path,
         errseq_out, remote_errseq, as_json):
    """Ordered payloads -> binary mask file (column-wise 5PPD)."""
    try:
        cfg = _load_cfg(config_path)
        template = workflow.build_template(cfg)
        keys = read_consensus_table(table_path, template)
        idx = protocol.indices_of(keys, template)
        ordering = protocol.Message.read(ordering_path)
        payload = protocol.apply_ordering(
            idx, keys.block_view(template, template.payload_block_range),
            ordering)
        errblk = protocol.apply_ordering(
            idx, keys.block_view(template, template.error_est_block_range),
            ordering)
        bmask = digitize.build_mask(digitize.digitize_matrix(payload),
                                    provenance=cfg.pad_id)
        digitize.write_mask(out_path, bmask)
        out = {"mask": out_path, "n_keys": bmask.n_keys,
               "bits": bmask.n_bits, "digest": bmask.digest()}
        if errseq_out:
            protocol.Message("errseq", party, cfg.pad_id,
                             [seq.decode(r) for r in errblk]).write(errseq_out)
            out["errseq"] = errseq_out
        if remote_errseq:
            remote = protocol.Message.read(remote_errseq)
            if remote.msg_type != "errseq":
                raise ProtocolError("remote file is not an errseq message")
            remote_bits = digitize.digitize_matrix(
                np.array([seq.encode(s) for s in remote.seqs]))
            local_bits = digitize.digitize_matrix(errblk)
            est = digitize.estimate_error_rate(local_bits.ravel(),
                                               remote_bits.ravel())
            out["channel"] = dataclasses.asdict(est)
        _emit(out, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--mask", "mask_path", required=True,
              type=click.Path(exists=True))
@click.option("--symbol-bits", type=click.Choice(["1", "8"]), default="1")
@click.option("--json", "as_json", is_flag=True)
def entropy(mask_path, symbol_bits, as_json):
    """Min-entropy assessment of a mask (ten-estimator battery)."""
    try:
        bmask = digitize.read_mask(mask_path)
        report = assess(bmask.bits, symbol_bits=int(symbol_bits))
        data = {"estimates": report.estimates,
                "min_entropy": report.min_entropy,
                "sample_length": report.sample_length,
                "sub_standard_length": report.sub_standard_length,
                "symbol_bits": report.symbol_bits}
        _emit(data, as_json, text=str(report))
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--p-est", type=float, required=True)
@click.option("--bits", type=int, required=True,
              help="plaintext length in bits")
@click.option("--sample-bits", type=int, default=None)
@click.option("--mismatches", type=int, default=None)
@click.option("--dfr-exponent", type=int, default=128)
@click.option("--safety", type=click.Choice(["auto", "none"]), default="auto")
@click.option("--json", "as_json", is_flag=True)
def params(p_est, bits, sample_bits, mismatches, dfr_exponent, safety,
           as_json):
    """Select BCH parameters for a channel and payload size."""
    try:
        sel = select_params(p_est, bits, dfr_target=2.0 ** -dfr_exponent,
                            sample_bits=sample_bits, mismatches=mismatches,
                            safety=safety)
        data = {"m": sel.code.m, "t": sel.code.t, "n": sel.code.n,
                "k": sel.code.k, "blocks": sel.block_count,
                "p_safe": sel.p_safe, "overhead": sel.overhead,
                "total_bits": sel.total_bits,
                "dfr_bound": sel.total_dfr_bound}
        _emit(data, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--mask", "mask_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--p-est", type=float, default=0.0)
@click.option("--sample-bits", type=int, default=None)
@click.option("--mismatches", type=int, default=None)
@click.option("--safety", type=click.Choice(["auto", "none"]), default="auto")
@click.option("--json", "as_json", is_flag=True)
def seal(in_path, mask_path, out_path, p_est, sample_bits, mismatches,
         safety, as_json):
    """OTP-seal a file; consumed mask bits are destroyed on disk."""
    try:
        with open(in_path, "rb") as fh:
            pt = bytes_to_bits(fh.read())
        bmask = digitize.read_mask(mask_path)
        sel = select_params(p_est, int(pt.size),
                            sample_bits=sample_bits, mismatches=mismatches,
                            safety=safety, total_bits_max=bmask.remaining)
        ct = otp_seal(pt, bmask, sel.code)
        write_ciphertext(out_path, ct)
        digitize.write_mask(mask_path, bmask)   # persist consumption
        _emit({"ciphertext": out_path, "blocks": ct.block_count,
               "m": ct.m, "t": ct.t, "mask_offset": ct.mask_offset,
               "mask_remaining": bmask.remaining}, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command(name="open")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--mask", "mask_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def open_cmd(in_path, mask_path, out_path, as_json):
    """Open a ciphertext; on decode failure no plaintext is written."""
    try:
        ct = read_ciphertext(in_path)
        bmask = digitize.read_mask(mask_path)
        bits = otp_open(ct, bmask)
        with open(out_path, "wb") as fh:
            fh.write(bits_to_bytes(bits))
        digitize.write_mask(mask_path, bmask)
        _emit({"plaintext": out_path, "bits": int(bits.size)}, as_json)
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--table", "table_path", required=True,
              type=click.Path(exists=True))
@click.option("--ordering", "ordering_path", required=True,
              type=click.Path(exists=True))
@click.option("--native", "native_path", type=click.Path(exists=True),
              help="JSON file with the native multiplicity histogram counts")
@click.option("--json", "as_json", is_flag=True)
def detect(config_path, table_path, ordering_path, native_path, as_json):
    """Sentinel statistics: UMI histograms, chi-square, interference."""
    try:
        cfg = _load_cfg(config_path)
        template = workflow.build_template(cfg)
        keys = read_consensus_table(table_path, template)
        ordering = protocol.Message.read(ordering_path)
        h_shared, h_unshared = sentinel.umi_histograms(
            keys, template, set(ordering.seqs))
        if native_path:
            with open(native_path) as fh:
                counts = json.load(fh)
            native = sentinel.UmiHistogram(np.asarray(counts), "pooled")
        else:
            native = sentinel.pool_histograms([h_shared, h_unshared])
        report = sentinel.detection_report(native, h_shared, h_unshared)
        _emit(report, as_json, text=sentinel.format_report(report))
    except Exception as exc:
        raise _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--message", "message_path", type=click.Path(exists=True),
              help="payload file (defaults to the bundled demo image)")
@click.option("--json", "as_json", is_flag=True)
def e2e(config_path, seed, out_dir, message_path, as_json):
    """Full Alice/Bob(/Eve) run; writes all artifacts deterministically."""
    try:
        cfg = _load_cfg(config_path, seed)
        os.makedirs(out_dir, exist_ok=True)
        if message_path:
            with open(message_path, "rb") as fh:
                payload = fh.read()
        else:
            payload = (importlib.resources.files("dnaotp") / "assets"
                       / "demo.pgm").read_bytes()
        msg_bits = bytes_to_bits(payload)
        summary, art = workflow.run_e2e(cfg, message_bits=msg_bits)
        template = art["sim"].template
        write_consensus_table(art["keys_alice"], template,
                              os.path.join(out_dir, "alice.tsv"))
        write_consensus_table(art["keys_bob"], template,
                              os.path.join(out_dir, "bob.tsv"))
        ex = art["exchange"]
        ex.announce_alice.write(os.path.join(out_dir, "announce_alice.msg"))
        ex.announce_bob.write(os.path.join(out_dir, "announce_bob.msg"))
        ex.ordering.write(os.path.join(out_dir, "ordering.msg"))
        ex.errseq_bob.write(os.path.join(out_dir, "errseq_bob.msg"))
        digitize.write_mask(os.path.join(out_dir, "mask_alice.bin"),
                            ex.mask_alice)
        digitize.write_mask(os.path.join(out_dir, "mask_bob.bin"),
                            ex.mask_bob)
        digitize.write_mask(os.path.join(out_dir, "mask_reconciled.bin"),
                            art["mask_reconciled"])
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True, default=str)
        if not summary.get("message_roundtrip", False):
            raise DecodeFailure("demo message failed to round-trip")
        _emit(summary, as_json)
    except Exception as exc:
        raise _fail(exc)


if __name__ == "__main__":
    main()
