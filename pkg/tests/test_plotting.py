import pytest

from nematic2d.checkpoint import CsvSink
from nematic2d.diagnostics import TWIN_COLUMNS
from nematic2d.dynamics import StepReport
from nematic2d.plotting import plot_csv


def _steps(path):
    with CsvSink(path, StepReport.CSV_COLUMNS) as sink:
        for i in range(5):
            sink.append(StepReport(0.1 * i, 1.0 / (i + 1), 1.0, 0.1, 0.1, 1e-4 * i, 0.0, 0.0))


def _twin(path):
    with CsvSink(path, TWIN_COLUMNS) as sink:
        for i in range(5):
            sink.append((0.1 * i, 1e-6 / (i + 1), 0, 0, 0, 1.0, 0.1 * i, 0.0, 1e-6, True))


@pytest.mark.parametrize("writer", [_steps, _twin])
def test_plots_are_deterministic_svg(tmp_path, writer):
    csv = tmp_path / "series.csv"
    writer(csv)
    a = plot_csv(csv, tmp_path / "a.svg")
    b = plot_csv(csv, tmp_path / "b.svg")
    text = open(a).read()
    assert text.startswith("<?xml") and "<svg" in text
    assert open(a, "rb").read() == open(b, "rb").read()


def test_unknown_csv_rejected(tmp_path):
    csv = tmp_path / "x.csv"
    csv.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="not a step-report"):
        plot_csv(csv, tmp_path / "x.svg")
