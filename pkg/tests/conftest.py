from pathlib import Path

import numpy as np
import pytest

import cardioseis as cs
from cardioseis.event_detection import template_from_channel

DATA_DIR = Path(__file__).parent / "data"


def run_synth_analysis(coupling, seed, snr_db=20.0, screen=True, coupling_strength=1.0):
    """Generate a recording and run the in-memory analysis chain on it.

    Returns (comparison, detected events, ground truth, conditioned scg).
    """
    cfg = cs.SynthConfig(coupling=coupling, seed=seed, snr_db=snr_db,
                         coupling_strength=coupling_strength)
    rec, truth = cs.gen_recording(cfg)
    scg = cs.lowpass(rec["scg"], 100.0)
    length = len(cs.default_morphologies(cfg.fs)[0])
    first = truth.beat_indices[0]
    tpl = template_from_channel(scg, (first - length // 2) / cfg.fs, length / cfg.fs)
    events = cs.detect_events(scg, tpl)
    trace = cs.integrate_flow(rec["flow"])
    labeled = cs.label_events(events, trace)
    if screen:
        labeled, _ = cs.screen_outliers(labeled)
    comparison = cs.compare_criteria(labeled)
    return comparison, events, truth, scg


def detection_scores(events, truth, tol=2):
    """(recall, precision, max_ref_error) of detections vs ground truth."""
    refs = np.array([ev.ref_index for ev in events])
    beats = np.array(truth.beat_indices)
    if refs.size == 0:
        return 0.0, 0.0, np.inf
    hits = [np.abs(refs - b).min() for b in beats]
    recall = np.mean([h <= tol for h in hits])
    precision = np.mean([np.abs(beats - r).min() <= tol for r in refs])
    matched = [h for h in hits if h <= tol]
    return float(recall), float(precision), (max(matched) if matched else np.inf)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
