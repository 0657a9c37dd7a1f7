import json
import math

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

from latent_transport.reporting import csv_text, json_text, write_csv, write_json
from latent_transport.reporting.plots import plot_epoch_metrics, plot_lyapunov, plot_training_curves, save_figure
from latent_transport.trainer import EpochRecord, StepRecord, TraceLog


def _trace():
    trace = TraceLog()
    for step in range(1, 11):
        trace.add_step(StepRecord(step, 2.0 / step, 1.0 / step, 1.0 / step, 0.0, 0.5))
    for epoch in range(3):
        trace.add_epoch(EpochRecord(epoch, 1.0, 1.0 / (epoch + 1), 0.5, 0.02, 0.01))
    return trace


def test_csv_cells():
    text = csv_text(["name", "flag", "count", "value"], [["a", True, np.int64(3), 0.1]])
    assert text == "name,flag,count,value\na,true,3,0.10000000000000001\n"


def test_csv_row_width_checked():
    with pytest.raises(ValueError, match="2 cells"):
        csv_text(["a", "b", "c"], [[1, 2]])


def test_json_text_is_canonical():
    first = json_text({"b": np.float64(0.5), "a": np.arange(3), "flag": np.bool_(True)})
    assert first == json_text({"flag": True, "a": [0, 1, 2], "b": 0.5})
    assert json.loads(first) == {"a": [0, 1, 2], "b": 0.5, "flag": True}
    assert first.endswith("}\n")


def test_json_text_drops_non_finite():
    assert json.loads(json_text({"x": math.inf, "y": float("nan")})) == {"x": None, "y": None}


def test_writers_create_directories(tmp_path):
    csv_path = write_csv(tmp_path / "a" / "rows.csv", ["x"], [[1], [2]])
    json_path = write_json(tmp_path / "b" / "doc.json", {"k": 1})
    assert csv_path.read_text() == "x\n1\n2\n"
    assert json.loads(json_path.read_text()) == {"k": 1}


def test_plots_render(tmp_path):
    trace = _trace()
    ax = plot_training_curves(trace)
    assert len(ax.get_lines()) == 3
    assert save_figure(ax, tmp_path / "training.png").stat().st_size > 0
    assert save_figure(plot_epoch_metrics(trace), tmp_path / "epochs.png").exists()
    ax = plot_lyapunov(np.zeros(10), window=4)
    assert ax.get_xlabel() == "Step"
    assert save_figure(ax, tmp_path / "plots" / "lyapunov.png").exists()
