import runpy

import pytest

from gwsplice.report import CheckRow, Report, Series, checks_csv, emit_plot_script, render_png, series_csv


def _report(deltas=(1.0, 2.0, 3.0)):
    rep = Report("demo", {"seed": 0}, title="demo ratios")
    for d in deltas:
        rep.series.append(Series(f"delta={d}", [5.0, 10.0, 20.0], [1.0, d, 0.5 * d]))
    return rep


def test_plot_script_needs_series():
    with pytest.raises(ValueError):
        emit_plot_script(Report("empty"))
    with pytest.raises(ValueError):
        render_png(Report("empty"), "unused.png")


def test_plot_script_draws_one_curve_per_delta(tmp_path, monkeypatch):
    import matplotlib

    matplotlib.use("Agg")
    script = tmp_path / "plot.py"
    script.write_text(emit_plot_script(_report()))
    monkeypatch.chdir(tmp_path)
    ns = runpy.run_path(str(script))
    assert len(ns["ax"].lines) == 3
    assert [ln.get_label() for ln in ns["ax"].lines] == ["delta=1.0", "delta=2.0", "delta=3.0"]
    assert (tmp_path / "plot.png").stat().st_size > 0


def test_png_is_deterministic(tmp_path):
    a = render_png(_report(), tmp_path / "a.png").read_bytes()
    b = render_png(_report(), tmp_path / "b.png").read_bytes()
    assert a[:8] == b"\x89PNG\r\n\x1a\n" and a == b


def test_digest_depends_on_inputs_only():
    r1, r2 = _report(), _report((4.0,))
    assert r1.digest == r2.digest
    assert Report("demo", {"seed": 1}).digest != r1.digest


def test_checks_and_series_csv():
    rep = _report((1.0,))
    row = rep.add("residual", 1e-12, 1e-10, True, "ok")
    assert isinstance(row, CheckRow) and rep.passed
    rep.add("drift", 2.0, 1.0, False)
    assert not rep.passed
    text = checks_csv(rep)
    assert "name,value,threshold,pass,note" in text and "residual,1e-12,1e-10,1,ok" in text
    lines = series_csv(rep).splitlines()
    assert lines[2] == "series,R,ratio" and lines[3] == "delta=1.0,5.0,1.0"
