"""End-to-end orchestration: condition -> detect -> label -> group -> report.

Stage failures are re-raised with a stage tag so the CLI can print where a
run died and exit with the right code.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .errors import CardioseisError, DegenerateAnalysisError, InputError
from .event_detection import detect_events, template_from_channel
from .grouping import compare_criteria, screen_outliers
from .ingest import ingest_csv
from .report import (GROUP_ORDER, comparison_to_row, write_report_csv,
                     write_report_json)
from .respiration import integrate_flow, label_events
from .signal_core import Recording, lowpass, resample
from .svgplot import bar_chart, line_plot


class StageError(CardioseisError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CardioseisError as exc:
        raise StageError(name, exc) from exc


def analyze_recording(rec: Recording, config: PipelineConfig):
    """Run the analysis chain on an in-memory recording.

    Returns (CriterionComparison, context dict with events / trace /
    ensemble averages for reporting and plotting).
    """
    scg = _stage("resample", resample, rec["scg"], config.analysis_fs)
    flow = _stage("resample", resample, rec["flow"], config.analysis_fs)
    scg = _stage("lowpass", lowpass, scg, config.lowpass_cutoff_hz)
    tpl = _stage("template", template_from_channel, scg,
                 config.template_start_s, config.template_length_s)
    events = _stage("detect", detect_events, scg, tpl,
                    config.threshold_frac, config.min_separation_s)
    trace = _stage("respiration", integrate_flow, flow, config.detrend)
    events = _stage("label", label_events, events, trace)
    dropped = 0
    if config.outlier_screen:
        events, dropped = _stage("screen", screen_outliers, events, config.max_shift)
    if not events:
        raise StageError("group", DegenerateAnalysisError("no events detected"))
    cmp = _stage("group", compare_criteria, events, config.max_shift)
    context = {
        "events": events,
        "trace": trace,
        "template": tpl,
        "outliers_dropped": dropped,
        "analysis_fs": config.analysis_fs,
    }
    return cmp, context


def _write_artifacts(rec_id: str, cmp, context, out_dir: Path):
    fs = context["analysis_fs"]
    averages = {st.group_id: st.ensemble_avg for st in cmp.groups}
    n = len(next(iter(averages.values())))
    avg_csv = out_dir / f"{rec_id}_ensemble_averages.csv"
    with open(avg_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index"] + [g.lower() for g in GROUP_ORDER])
        for i in range(n):
            writer.writerow([i] + ["%.9g" % averages[g][i] for g in GROUP_ORDER])
    t = np.arange(n) / fs
    ens_svg = out_dir / f"{rec_id}_ensemble_averages.svg"
    line_plot({g: averages[g] for g in GROUP_ORDER}, ens_svg,
              title=f"{rec_id}: ensemble-averaged SCG per group",
              xlabel="time (s)", ylabel="amplitude", x=t)
    rd_svg = out_dir / f"{rec_id}_rd_bars.svg"
    bar_chart(GROUP_ORDER, [st.rd for st in cmp.groups], rd_svg,
              title=f"{rec_id}: relative difference per group", ylabel="RD (%)")
    return [avg_csv, ens_svg, rd_svg]


def run_pipeline(config: PipelineConfig):
    """Process every configured input file and write reports and plots.

    Returns (rows, artifact paths). Deterministic: rows sorted by
    recording id, groups in fixed order, stable float formatting.
    """
    if not config.inputs:
        raise InputError("no input files configured")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows, artifacts = [], []
    for path in config.inputs:
        rec = _stage("ingest", ingest_csv, path, config)
        cmp, context = analyze_recording(rec, config)
        rows.append(comparison_to_row(rec.recording_id, cmp,
                                      extras={"outliers_dropped": context["outliers_dropped"],
                                              "n_events": len(context["events"])}))
        artifacts += _write_artifacts(rec.recording_id, cmp, context, out_dir)
    json_path = out_dir / "report.json"
    csv_path = out_dir / "report.csv"
    write_report_json(rows, json_path)
    write_report_csv(rows, csv_path)
    artifacts += [json_path, csv_path]
    return rows, artifacts
