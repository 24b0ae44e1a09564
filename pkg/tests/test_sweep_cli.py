import csv
import io
import json

import pytest

from rtsym import cli
from rtsym.hamiltonians import h1_spec, h3_spec
from rtsym.sweep import (
    CSV_HEADER,
    ConfigError,
    SweepConfig,
    parse_rows,
    preset_config,
    render,
    run_sweep,
    with_overrides,
)


def _small(name="fig2", **kw):
    return preset_config(name, cutoff=4, steps=21, **kw)


def test_csv_layout_and_footer():
    text = render(run_sweep(_small()), "csv")
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    rows = list(csv.reader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert len(rows) == 22 and all(len(r) == len(rows[0]) for r in rows)
    mid = rows[1 + 10]  # kappa = g
    assert mid[-1] == "SINGULAR" and mid[12] == "SINGULAR"
    footer = [l for l in lines if l.startswith("# ep")]
    assert len(footer) == 1
    kappa = float(footer[0].split()[2].partition("=")[2])
    assert abs(kappa - 1.0) <= 1e-6


def test_driven_singular_row_marks_levels():
    result = run_sweep(_small("fig3"))
    row = result.rows[10]
    assert row.singular and row.analytic.e0 is None
    assert "SINGULAR,SINGULAR" in render([row], "csv")


def test_json_roundtrip():
    result = run_sweep(_small("fig3"))
    text = render(result, "json")
    back = parse_rows(text)
    assert [r.value for r in back] == [r.value for r in result.rows]
    assert back[3].numeric == pytest.approx(result.rows[3].numeric)
    footer = json.loads(text)[-1]
    assert footer["record"] == "footer" and footer["ep"][0]["block_exact"] is False


def test_symmetry_verdicts_in_rows():
    row = run_sweep(_small()).rows[5]
    verdicts = {r["symmetry"]: r["verdict"] for r in row.symmetry}
    assert verdicts == {"PT": True, "RT": True}


def test_threaded_sweep_matches_serial():
    serial = render(run_sweep(_small("fig3")), "csv")
    threaded = render(run_sweep(with_overrides(_small("fig3"), {"workers": 3})), "csv")
    assert serial == threaded


def test_non_quadratic_model_reports_na():
    cfg = SweepConfig(h3_spec(0.3, 1.0, 0.1, 0.4, 0.0), "kappa", 0.0, 1.0, 5, 4)
    result = run_sweep(cfg)
    assert result.rt_theta == pytest.approx(-0.8)
    assert render(result, "csv").splitlines()[1].count("NA") == 10
    assert result.eps == []


@pytest.mark.parametrize("data,path", [
    ({}, "hamiltonian"),
    ({"hamiltonian": {"terms": [{"type": "Nope"}]}}, "hamiltonian"),
    ({"hamiltonian": h1_spec(1, 0, 0).to_dict(), "sweep": {"lo": 1.0, "hi": 0.0}}, "sweep.lo"),
    ({"hamiltonian": h1_spec(1, 0, 0).to_dict(), "sweep": {"steps": 1}}, "sweep.steps"),
    ({"hamiltonian": h1_spec(1, 0, 0).to_dict(), "sweep": {"parameter": "phi"}}, "sweep.parameter"),
    ({"hamiltonian": h1_spec(1, 0, 0).to_dict(), "tolerances": {"ep": -1}}, "tolerances.ep"),
    ({"hamiltonian": h1_spec(1, 0, 0).to_dict(), "outputs": {"format": "xml"}}, "outputs.format"),
])
def test_config_errors_name_the_field(data, path):
    with pytest.raises(ConfigError) as info:
        SweepConfig.from_dict(data)
    assert info.value.path == path


def test_config_roundtrip():
    cfg = _small("fig3", eps=0.2)
    assert SweepConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_cli_sweep_with_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(_small().to_dict()))
    out = tmp_path / "o.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().startswith(CSV_HEADER)


def test_cli_certify(capsys):
    assert cli.main(["certify", "--preset", "fig3", "--cutoff", "4", "--param", "kappa=0.5"]) == 0
    recs = {r["symmetry"]: r for r in json.loads(capsys.readouterr().out)}
    assert recs["PT"]["verdict"] is False
    assert recs["RT"]["verdict"] is True and recs["RT"]["theta"] == 0.0


def test_cli_spectrum(capsys):
    assert cli.main(["spectrum", "--preset", "fig3", "--cutoff", "6", "--param", "kappa=0.6"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["analytic"]["levels"]["0"] == pytest.approx([-0.03125, 0.0])
    assert len(out["eigenvalues"]) == 49


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["sweep", "--preset", "fig2", "--param", "steps=1"]) == 2
    assert cli.main(["sweep", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["sweep", "--config", str(bad)]) == 2
    assert cli.main(["ep", "--preset", "fig2", "--param", "lo=0", "--param", "hi=0.5"]) == 2
    assert cli.main(["sweep", "--preset", "fig2", "--param", "bogus=1"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_ep_stdout(capsys):
    assert cli.main(["ep", "--preset", "fig3", "--param", "tol=1e-9"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert abs(rec["kappa"] - 1.0) <= 1e-9
    assert rec["caveat"]


def test_empty_rows_give_header_only():
    assert render([], "csv") == CSV_HEADER + "\n"
    assert render([], "json") == "[]\n"


def test_drive_shift_between_presets():
    fig2 = run_sweep(preset_config("fig2", cutoff=10, steps=11))
    fig3 = run_sweep(preset_config("fig3", eps=0.1, cutoff=10, steps=11))
    for r2, r3 in zip(fig2.rows, fig3.rows):
        if r2.value > 0.9:
            break
        shift = r3.analytic.lam0.real
        for z2, z3 in zip(r2.numeric, r3.numeric):
            assert abs((z3.real - z2.real) - shift) <= 1e-4
