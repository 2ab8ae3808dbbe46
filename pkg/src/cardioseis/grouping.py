"""Within-group alignment, ensemble averaging, and the dissimilarity metrics
that decide which respiratory criterion groups similar SCG events better.

Dissimilarity of an event against a group average is the RMS of the
pointwise difference, normalized by the RMS of the average (in percent).
A group's relative difference (RD) compares its mean dissimilarity against
the alternate group's average with that against its own; positive RD means
the grouping is doing its job.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateAnalysisError, InputError
from .respiration import FlowPhase, VolumePhase
from .signal_core import DegenerateCorrelation, best_lag, rms

log = logging.getLogger(__name__)

RD_TIE_TOLERANCE = 0.01


class Criterion(enum.Enum):
    FLOW_RATE = "FlowRate"
    LUNG_VOLUME = "LungVolume"


class Winner(enum.Enum):
    FLOW_RATE = "FlowRate"
    LUNG_VOLUME = "LungVolume"
    TIE = "Tie"


@dataclass(frozen=True)
class GroupStats:
    """One Table-II/III style row half: a single group's numbers."""

    group_id: str  # Inspiration / Expiration / LLV / HLV
    n: int
    ensemble_avg: np.ndarray
    mean_dissim_same: float
    sd_same: float
    mean_dissim_alt: float
    sd_alt: float
    rd: float


@dataclass(frozen=True)
class CriterionComparison:
    """Four GroupStats plus the per-pair winner flags.

    Pair order: Inspiration vs LLV, then
    Expiration vs HLV.
    """

    inspiration: GroupStats
    expiration: GroupStats
    llv: GroupStats
    hlv: GroupStats
    winner_insp_llv: Winner
    winner_exp_hlv: Winner

    @property
    def groups(self):
        return (self.inspiration, self.expiration, self.llv, self.hlv)


def _shift_event(ev, lag: int):
    """Re-extract an event's window lag samples later in its source channel.

    The shift is clamped so the window stays inside the recording.
    """
    length = len(ev.window)
    n = len(ev.source)
    lo = length // 2 - ev.ref_index
    hi = n - length + length // 2 - ev.ref_index
    lag = int(np.clip(lag, lo, hi))
    if lag == 0:
        return ev
    ref = ev.ref_index + lag
    start = ref - length // 2
    return replace(ev, ref_index=ref, window=ev.source.samples[start:start + length].copy(),
                   align_shift=ev.align_shift + lag)


def align_events(events, max_shift: int):
    """Two-pass time alignment of equal-length event windows.

    Pass one aligns everything to the highest-RMS event; pass two re-aligns
    to the pass-one ensemble average. Constant-window events are dropped
    with a warning. Lags come from Pearson-normalized cross-correlation.
    """
    if not events:
        raise DegenerateAnalysisError("empty group")
    lengths = {len(ev.window) for ev in events}
    if len(lengths) != 1:
        raise InputError("event windows differ in length")
    usable = [ev for ev in events if np.ptp(ev.window) > 0]
    dropped = len(events) - len(usable)
    if dropped:
        log.warning("align_events: dropped %d constant-window event(s)", dropped)
    if not usable:
        raise DegenerateAnalysisError("empty group")
    reference = max(usable, key=lambda ev: rms(ev.window))
    aligned = [_align_to(ev, reference.window, max_shift) for ev in usable]
    avg = ensemble_average(aligned)
    if np.ptp(avg) > 0:
        aligned = [_align_to(ev, avg, max_shift) for ev in aligned]
    return aligned


def _align_to(ev, target, max_shift: int):
    try:
        lag = best_lag(target, ev.window, max_shift)
    except DegenerateCorrelation:
        return ev
    return _shift_event(ev, lag)


def ensemble_average(events) -> np.ndarray:
    """Pointwise mean of the (aligned) event windows.

    Identical windows average to themselves exactly (no float drift).
    """
    if not events:
        raise DegenerateAnalysisError("empty group")
    stack = np.stack([ev.window for ev in events])
    if np.all(stack == stack[0]):
        return stack[0].copy()
    return np.mean(stack, axis=0)


def drms(event_window, group_avg) -> float:
    """RMS of the pointwise difference between an event and a group average."""
    event_window = np.asarray(event_window, dtype=float)
    group_avg = np.asarray(group_avg, dtype=float)
    if event_window.shape != group_avg.shape:
        raise InputError("length mismatch")
    return rms(event_window - group_avg)


def normalized_dissim(event_window, group_avg) -> float:
    """drms normalized by the average's RMS, in percent."""
    denom = rms(group_avg)
    if denom == 0:
        raise DegenerateAnalysisError("degenerate group average")
    return 100.0 * drms(event_window, group_avg) / denom


def mean_dissimilarity(events, group_avg) -> tuple[float, float]:
    """Mean and sample SD (n-1) of normalized dissimilarity over events.

    A single-event group gets SD 0.
    """
    if not events:
        raise DegenerateAnalysisError("empty group")
    vals = np.array([normalized_dissim(ev.window, group_avg) for ev in events])
    sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    return float(np.mean(vals)), sd


def relative_difference(mean_same: float, mean_alt: float) -> float:
    """Percent excess of cross-group over within-group mean dissimilarity."""
    if mean_same == 0:
        raise DegenerateAnalysisError("zero within-group dissimilarity")
    return 100.0 * (mean_alt - mean_same) / mean_same


def _group_labels(criterion: Criterion):
    if criterion is Criterion.FLOW_RATE:
        return [(FlowPhase.INSPIRATION, lambda ev: ev.flow_phase is FlowPhase.INSPIRATION),
                (FlowPhase.EXPIRATION, lambda ev: ev.flow_phase is FlowPhase.EXPIRATION)]
    return [(VolumePhase.LLV, lambda ev: ev.volume_phase is VolumePhase.LLV),
            (VolumePhase.HLV, lambda ev: ev.volume_phase is VolumePhase.HLV)]


def evaluate_criterion(events, criterion: Criterion, max_shift: int | None = None):
    """Split labeled events by one criterion and compute both GroupStats.

    Per group: align, ensemble-average, mean dissimilarity against the own
    average, then against the alternate group's average (each event is
    re-aligned to that average first so timing offsets do not masquerade
    as morphology differences), and finally the RD.
    """
    if not events:
        raise DegenerateAnalysisError("empty group")
    if max_shift is None:
        max_shift = len(events[0].window) // 4
    split = []
    for label, pred in _group_labels(criterion):
        members = [ev for ev in events if pred(ev)]
        if not members:
            raise DegenerateAnalysisError(f"degenerate split: {criterion.value} "
                                          f"group {label.value} is empty")
        split.append((label, members))
    aligned = {label: align_events(members, max_shift) for label, members in split}
    averages = {label: ensemble_average(evs) for label, evs in aligned.items()}
    stats = []
    labels = [label for label, _ in split]
    for label, other in (labels, labels[::-1]):
        evs = aligned[label]
        own_avg, alt_avg = averages[label], averages[other]
        mean_same, sd_same = mean_dissimilarity(evs, own_avg)
        realigned = [_align_to(ev, alt_avg, max_shift) for ev in evs]
        mean_alt, sd_alt = mean_dissimilarity(realigned, alt_avg)
        stats.append(GroupStats(
            group_id=label.value, n=len(evs), ensemble_avg=own_avg,
            mean_dissim_same=mean_same, sd_same=sd_same,
            mean_dissim_alt=mean_alt, sd_alt=sd_alt,
            rd=relative_difference(mean_same, mean_alt)))
    return tuple(stats)


def _pick_winner(rd_fr: float, rd_lv: float) -> Winner:
    if abs(rd_lv - rd_fr) <= RD_TIE_TOLERANCE:
        return Winner.TIE
    return Winner.LUNG_VOLUME if rd_lv > rd_fr else Winner.FLOW_RATE


def compare_criteria(events, max_shift: int | None = None) -> CriterionComparison:
    """Evaluate both grouping criteria and flag the winner per group pair."""
    insp, exp = evaluate_criterion(events, Criterion.FLOW_RATE, max_shift)
    llv, hlv = evaluate_criterion(events, Criterion.LUNG_VOLUME, max_shift)
    return CriterionComparison(
        inspiration=insp, expiration=exp, llv=llv, hlv=hlv,
        winner_insp_llv=_pick_winner(insp.rd, llv.rd),
        winner_exp_hlv=_pick_winner(exp.rd, hlv.rd))


def screen_outliers(events, max_shift: int | None = None, n_sd: float = 3.0):
    """Drop events whose dissimilarity to the all-event ensemble average
    exceeds mean + n_sd * SD. Stand-in for the manual artifact check.

    Returns (kept_events, n_dropped). Kept events keep their original
    (pre-screening-alignment) windows.
    """
    if len(events) < 3:
        return list(events), 0
    if max_shift is None:
        max_shift = len(events[0].window) // 4
    usable = [ev for ev in events if np.ptp(ev.window) > 0]
    if len(usable) < 3:
        return usable, len(events) - len(usable)
    aligned = align_events(usable, max_shift)
    avg = ensemble_average(aligned)
    if np.ptp(avg) == 0:
        return usable, len(events) - len(usable)
    vals = np.array([normalized_dissim(ev.window, avg) for ev in aligned])
    limit = vals.mean() + n_sd * (vals.std(ddof=1) if len(vals) > 1 else 0.0)
    kept = [ev for ev, v in zip(usable, vals) if v <= limit]
    return kept, len(events) - len(kept)
