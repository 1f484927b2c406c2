"""Eve's two interception attacks on Bob's pad in transit."""

from __future__ import annotations

import numpy as np

from .pad import PadInventory
from .pcr import pcr_amplify


def attack_steal(pad_b: PadInventory, fraction: float, seed: int = 0):
    """Scenario 1: physically divert a fraction of the molecules.

    Each molecule moves to Eve independently with probability
    ``fraction``; totals are conserved (eve + bob = original).
    """
    if not (0.0 <= fraction <= 1.0):
        raise ValueError("fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    to_eve = rng.binomial(pad_b.count, fraction)
    to_bob = pad_b.count - to_eve
    eve = pad_b.take(np.flatnonzero(to_eve > 0), to_eve[to_eve > 0])
    bob = pad_b.take(np.flatnonzero(to_bob > 0), to_bob[to_bob > 0])
    eve.owner = "Eve"
    return eve, bob


def _sample_molecules(pad: PadInventory, n: int, rng) -> np.ndarray:
    """Per-row counts of a uniform sample of n molecules, no replacement."""
    return rng.multivariate_hypergeometric(pad.count, n)


def attack_copy_replace(pad_b: PadInventory, cycles: int,
                        efficiency: float = 0.95, err_rate: float = 1e-6,
                        return_count: int = None, return_fraction: float = None,
                        seed: int = 0):
    """Scenario 2: amplify the whole pad, return a sample, keep the rest.

    ``return_fraction`` samples that fraction of the amplified pool for
    Bob; ``return_count`` fixes the returned molecule count directly
    and defaults to the original count so Bob receives a pad of the
    expected size.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    if return_count is not None and return_fraction is not None:
        raise ValueError("give return_count or return_fraction, not both")
    rng = np.random.default_rng(seed)
    amplified = pcr_amplify(pad_b, cycles, efficiency, err_rate,
                            seed=rng.integers(2 ** 63))
    if return_fraction is not None:
        if not (0.0 < return_fraction <= 1.0):
            raise ValueError("return_fraction must be in (0, 1]")
        return_count = round(return_fraction * amplified.total_molecules)
    elif return_count is None:
        return_count = pad_b.total_molecules
    if return_count > amplified.total_molecules:
        raise ValueError("return_count exceeds amplified total")
    back = _sample_molecules(amplified, return_count, rng)
    bob = amplified.take(np.flatnonzero(back > 0), back[back > 0])
    kept = amplified.count - back
    eve = amplified.take(np.flatnonzero(kept > 0), kept[kept > 0])
    bob.owner, eve.owner = "Bob", "Eve"
    return eve, bob
