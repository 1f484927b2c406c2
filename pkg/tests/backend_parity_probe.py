"""Compute a digest over outputs of every numba-accelerated code path.

Run under both backends (DNAOTP_DISABLE_NUMBA unset / =1); the printed
digest must be identical.  Executed by test_backends.py via subprocess.
"""

import hashlib
import json

import numpy as np

from dnaotp import entropy, workflow
from dnaotp.backends import backend_name
from dnaotp.config import config_from_dict
from dnaotp.entropy.suffix import TupleStats
from dnaotp.molsim.bias import SynthesisBias
from dnaotp.reconcile import BchCode


def main():
    h = hashlib.sha256()

    def mix(label, arr):
        h.update(label.encode())
        h.update(np.ascontiguousarray(arr).tobytes())

    # alignment + clustering + consensus via the full pipeline
    cfg = config_from_dict({"synthesis": {"diversity": 120,
                                          "pool_size": 1000}})
    summary, art = workflow.run_e2e(cfg)
    mix("mask", art["exchange"].mask_bob.bits)
    mix("mask_rec", art["mask_reconciled"].bits)
    for party in ("keys_alice", "keys_bob"):
        mix(party + ".bases", art[party].bases)
        mix(party + ".quals", art[party].quals)

    # synthesis bias sampling
    bias = SynthesisBias.nanopore_like(70)
    mix("bias", bias.sample(500, np.random.default_rng(5)))

    # entropy battery: suffix statistics and all predictors
    rng = np.random.default_rng(7)
    bits = (rng.random(60_000) < 0.55).astype(np.uint8)
    stats = TupleStats(bits)
    mix("tuples", np.array([stats.most_common_count(w) for w in range(1, 17)]
                           + [stats.identical_pairs(w) for w in range(1, 17)]
                           + [stats.max_lcp]))
    rep = entropy.assess(bits)
    mix("estimates", np.array([rep.estimates[k]
                               for k in sorted(rep.estimates)]))

    # BCH encode/decode
    code = BchCode(m=8, t=5)
    msg = rng.integers(0, 2, code.k).astype(np.uint8)
    cw = code.encode(msg)
    noisy = cw.copy()
    noisy[rng.choice(code.n, 5, replace=False)] ^= 1
    dec, ncorr = code.decode(noisy)
    mix("bch", np.concatenate([cw, dec, np.array([ncorr], dtype=np.uint8)]))

    print(json.dumps({"backend": backend_name(),
                      "digest": h.hexdigest()}))


if __name__ == "__main__":
    main()
