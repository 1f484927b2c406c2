"""Interception detection from molecular copy-number statistics.

UMI multiplicity of a cluster counts distinct physical strands behind
the same key.  Untouched 2-copy pads put almost all mass at m = 1 and 2;
copy-replace attacks amplify molecules and push mass to m >= 2, which a
chi-square test against a pooled native reference distribution detects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats


@dataclass
class UmiHistogram:
    counts: np.ndarray          # counts[i] = clusters with multiplicity i+1
    key_class: str              # "shared" | "unshared" | "pooled"

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise ValueError("negative histogram count")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalized(self) -> np.ndarray:
        t = self.total
        return self.counts / t if t else self.counts.astype(float)

    def padded(self, max_m: int) -> np.ndarray:
        out = np.zeros(max_m, dtype=np.int64)
        out[:self.counts.size] = self.counts
        return out


def _histogram(mult: np.ndarray, key_class: str) -> UmiHistogram:
    mult = np.asarray(mult, dtype=np.int64)
    if mult.size == 0:
        return UmiHistogram(np.zeros(0, dtype=np.int64), key_class)
    counts = np.bincount(mult, minlength=mult.max() + 1)[1:]
    return UmiHistogram(counts, key_class)


def umi_histograms(keys, template, shared_indices):
    """Split retained clusters into shared/unshared by index membership."""
    from . import protocol
    if np.all(keys.umi_multiplicity == 0):
        raise ValueError("consensus keys carry no UMI data")
    idx = protocol.indices_of(keys, template)
    shared = np.array([s in shared_indices for s in idx], dtype=bool)
    mult = keys.umi_multiplicity
    valid = mult > 0
    return (_histogram(mult[shared & valid], "shared"),
            _histogram(mult[~shared & valid], "unshared"))


def pool_histograms(hists, key_class: str = "pooled") -> UmiHistogram:
    """Sum replicate histograms into one native reference."""
    hists = list(hists)
    if not hists:
        raise ValueError("no histograms to pool")
    width = max(h.counts.size for h in hists)
    return UmiHistogram(sum(h.padded(width) for h in hists), key_class)


@dataclass
class ChiSquareResult:
    chi2: float
    dof: int
    alpha: float                 # upper-tail p-value (type-I critical alpha)
    safety: float                # P = 1 - alpha
    merged_bins: int


def _merge_bins(expected: np.ndarray, observed: np.ndarray, min_expected=5.0):
    """Greedy right-to-left merge so every bin has expected >= min_expected."""
    exp, obs = [], []
    acc_e = acc_o = 0.0
    for e, o in zip(expected[::-1], observed[::-1]):
        acc_e += e
        acc_o += o
        if acc_e >= min_expected:
            exp.append(acc_e)
            obs.append(acc_o)
            acc_e = acc_o = 0.0
    if exp and (acc_e or acc_o):    # leftover tail folds into the last bin
        exp[-1] += acc_e
        obs[-1] += acc_o
    return np.array(exp[::-1]), np.array(obs[::-1])


def chi_square_safety(native: UmiHistogram, observed: UmiHistogram,
                      min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson chi-square of observed multiplicities vs the native law.

    Expected counts come from the pooled native distribution scaled to
    the observed total; bins with expected < ``min_expected`` are
    merged.  alpha is the upper-tail probability of the statistic and
    P = 1 - alpha the reported safety probability (P near 1 = alarm).
    """
    if native.total == 0 or observed.total == 0:
        raise ValueError("empty histogram")
    width = max(native.counts.size, observed.counts.size)
    p_native = native.padded(width) / native.total
    obs = observed.padded(width).astype(float)
    expected = p_native * observed.total
    exp_m, obs_m = _merge_bins(expected, obs, min_expected)
    if exp_m.size < 2:
        raise ValueError("fewer than 2 usable bins after merging")
    chi2 = float(np.sum((obs_m - exp_m) ** 2 / exp_m))
    dof = exp_m.size - 1
    alpha = float(stats.chi2.sf(chi2, dof))
    return ChiSquareResult(chi2, dof, alpha, 1.0 - alpha, exp_m.size)


@dataclass
class InterferenceIndex:
    value: float                 # unshared heavy-tail mass / shared
    reciprocal: float
    shared_tail: float           # sum_{i>=2} N(m_i)/N(m_1), shared class
    unshared_tail: float
    undefined: bool              # a zero denominator occurred


def interference_index(hist_shared: UmiHistogram,
                       hist_unshared: UmiHistogram) -> InterferenceIndex:
    """Heavy-tail mass ratio between unshared and shared key classes."""

    def tail(h: UmiHistogram):
        if h.counts.size == 0 or h.counts[0] == 0:
            return math.inf, True
        return float(h.counts[1:].sum() / h.counts[0]), False

    s_tail, s_bad = tail(hist_shared)
    u_tail, u_bad = tail(hist_unshared)
    if s_bad or u_bad:
        return InterferenceIndex(math.inf, 0.0, s_tail, u_tail, True)
    if s_tail == 0.0:
        return InterferenceIndex(math.inf, 0.0, s_tail, u_tail, True)
    value = u_tail / s_tail
    return InterferenceIndex(value, 1.0 / value, s_tail, u_tail, False)


@dataclass
class VennSummary:
    n_a: int
    n_b: int
    n_e: int
    ab: int
    ae: int
    be: int
    abe: int


def tripartite_check(alice_indices, bob_indices, eve_indices) -> VennSummary:
    a, b, e = set(alice_indices), set(bob_indices), set(eve_indices)
    return VennSummary(len(a), len(b), len(e), len(a & b), len(a & e),
                       len(b & e), len(a & b & e))


def detection_report(native: UmiHistogram, hist_shared: UmiHistogram,
                     hist_unshared: UmiHistogram, venn: VennSummary = None,
                     alarm_significance: float = 0.01) -> dict:
    """Machine-readable summary of all sentinel statistics."""
    observed = pool_histograms([hist_shared, hist_unshared], "observed")
    chi = chi_square_safety(native, observed)
    ii = interference_index(hist_shared, hist_unshared)
    report = {
        "histograms": {
            "native": native.counts.tolist(),
            "shared": hist_shared.counts.tolist(),
            "unshared": hist_unshared.counts.tolist(),
        },
        "chi2": chi.chi2,
        "dof": chi.dof,
        "alpha": chi.alpha,
        "safety_probability": chi.safety,
        "alarm": chi.alpha < alarm_significance,
        "interference_index": None if ii.undefined else ii.value,
        "interference_index_reciprocal": None if ii.undefined else ii.reciprocal,
        "interference_components": {
            "shared_tail": ii.shared_tail if math.isfinite(ii.shared_tail) else None,
            "unshared_tail": ii.unshared_tail if math.isfinite(ii.unshared_tail) else None,
        },
    }
    if venn is not None:
        report["venn"] = {
            "A": venn.n_a, "B": venn.n_b, "E": venn.n_e,
            "A&B": venn.ab, "A&E": venn.ae, "B&E": venn.be,
            "A&B&E": venn.abe,
        }
    return report


def format_report(report: dict) -> str:
    """Plain-text table for operators."""
    lines = ["sentinel detection report", "-" * 32]
    lines.append(f"chi2 = {report['chi2']:.3f}  dof = {report['dof']}")
    lines.append(f"alpha = {report['alpha']:.3e}  "
                 f"P(safety) = {report['safety_probability']:.6f}")
    lines.append(f"alarm: {'YES' if report['alarm'] else 'no'}")
    ii = report["interference_index"]
    lines.append("interference index = "
                 + (f"{ii:.4f}" if ii is not None else "undefined"))
    if "venn" in report:
        v = report["venn"]
        lines.append(f"|A|={v['A']} |B|={v['B']} |E|={v['E']} "
                     f"|A&B|={v['A&B']} |A&E|={v['A&E']} "
                     f"|B&E|={v['B&E']} |A&B&E|={v['A&B&E']}")
    return "\n".join(lines)
