import math

import pytest

from oic.cli import main, parse_snr, parse_snr_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_parse_snr():
    assert parse_snr("20dB") == pytest.approx(100)
    assert parse_snr("3.5lin") == 3.5
    assert parse_snr("-3 dB") == pytest.approx(10**-0.3)
    for bad in ("20", "abc", "-1lin", "1e3", "lin"):
        with pytest.raises(UsageError):
            parse_snr(bad)


def test_parse_grid():
    assert parse_snr_grid("0lin:30lin:4") == [0, 10, 20, 30]
    assert parse_snr_grid("0dB:20dB:3") == pytest.approx([1, 10, 100])
    assert parse_snr_grid("1lin,3lin") == [1, 3]
    for bad in ("", "0lin:10dB:3", "3lin,1lin", "0lin:1lin", "0lin:1lin:0", "1,2"):
        with pytest.raises(UsageError):
            parse_snr_grid(bad)


def test_rate_curve_no_primary(capsys):
    code, out, _ = run(capsys, "rate-curve", "--gamma-p", "0lin", "--beta-p", "1lin", "--gamma-s-grid", "0lin:30lin:31")
    assert code == 0
    header, rows = table(out)
    assert header == ["gamma_s", "rate_oic", "rate_noic", "regime"]
    assert len(rows) == 31
    for r in rows:
        assert float(r["rate_oic"]) == pytest.approx(math.log2(1 + float(r["gamma_s"])), abs=1e-11)


def test_rate_curve_kink_row(capsys):
    code, out, _ = run(capsys, "rate-curve", "--gamma-p", "20lin", "--beta-p", "5lin", "--gamma-s-grid", "1lin,3lin,10lin")
    assert code == 0
    _, rows = table(out)
    kink = rows[1]
    assert kink["gamma_s"] == "3"
    assert float(kink["rate_oic"]) == pytest.approx(2.0, abs=1e-11)
    assert float(kink["rate_noic"]) == pytest.approx(math.log2(24 / 21), abs=1e-11)
    assert kink["regime"] == "CleanDecode"
    assert rows[2]["regime"] == "Superposition"


def test_rate_curve_empty_grid_writes_nothing(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, _, err = run(capsys, "rate-curve", "--gamma-p", "20lin", "--beta-p", "5lin", "--gamma-s-grid", "", "-o", str(target))
    assert code == 2
    assert "grid" in err
    assert not target.exists()


def test_bare_number_rejected(capsys):
    code, _, err = run(capsys, "rate-curve", "--gamma-p", "20", "--beta-p", "5lin", "--gamma-s-grid", "1lin")
    assert code == 2
    assert "unit suffix" in err


def test_missing_argument_is_usage_error(capsys):
    code, _, _ = run(capsys, "rate-curve", "--gamma-p", "20lin")
    assert code == 2


def write_channels(tmp_path, text):
    path = tmp_path / "ch.txt"
    path.write_text(text)
    return str(path)


def test_allocate_two_channel(capsys, tmp_path):
    path = write_channels(tmp_path, "# two channels\n1 10lin 5lin\n1, 10lin, 20lin  # undecodable\n")
    code, out, _ = run(capsys, "allocate", "--total", "4", "--channels", path)
    assert code == 0
    header, rows = table(out)
    assert header == ["channel", "nu", "gamma_p", "beta_p", "cap", "energy_oic", "energy_conventional", "rate_oic"]
    assert [float(r["energy_oic"]) for r in rows] == pytest.approx([2.0, 2.0], abs=1e-9)
    assert [float(r["cap"]) for r in rows] == [1.0, 0.0]
    footer = out.strip().splitlines()[-1]
    assert footer.startswith("# sum_rate_oic=")
    assert "sum_rate_noic=" in footer and "water_marginal=" in footer


def test_allocate_zero_and_single(capsys, tmp_path):
    path = write_channels(tmp_path, "1 10lin 5lin\n2 3dB 1lin\n")
    code, out, _ = run(capsys, "allocate", "--total", "0", "--channels", path)
    assert code == 0
    _, rows = table(out)
    assert all(float(r["energy_oic"]) == 0 and float(r["rate_oic"]) == 0 for r in rows)
    path = write_channels(tmp_path, "0.5 10lin 5lin\n")
    code, out, _ = run(capsys, "allocate", "--total", "7", "--channels", path)
    _, rows = table(out)
    assert float(rows[0]["energy_oic"]) == 7.0


@pytest.mark.parametrize(
    "text, fragment",
    [("1 10lin\n", ":1:"), ("1 10lin 5lin\nx 1lin 1lin\n", ":2:"), ("-1 10lin 5lin\n", ":1:"), ("1 10 5lin\n", "unit suffix"), ("# nothing\n", "no channels")],
)
def test_allocate_bad_file(capsys, tmp_path, text, fragment):
    path = write_channels(tmp_path, text)
    code, _, err = run(capsys, "allocate", "--total", "1", "--channels", path)
    assert code == 2
    assert fragment in err


def test_allocate_negative_total(capsys, tmp_path):
    path = write_channels(tmp_path, "1 10lin 5lin\n")
    code, _, _ = run(capsys, "allocate", "--total", "-1", "--channels", path)
    assert code == 2


def test_line(capsys):
    code, out, _ = run(capsys, "line", "--beta-p", "20dB", "--v", "3", "--gamma-s", "20dB", "--x-min", "0.5", "--x-max", "1.5", "--points", "3")
    assert code == 0
    header, rows = table(out)
    assert header == ["x", "gamma_p", "rate_noic", "rate_oic", "regime"]
    assert float(rows[0]["rate_oic"]) == pytest.approx(3.157, abs=1e-3)
    assert float(rows[1]["x"]) == 1.0
    assert float(rows[1]["gamma_p"]) == pytest.approx(100, rel=1e-12)


def test_line_with_target(capsys):
    code, out, _ = run(capsys, "line", "--beta-p", "20dB", "--v", "3", "--gamma-s", "20dB", "--x-min", "0.5", "--x-max", "1.5", "--points", "3", "--target-snr", "10lin")
    assert code == 0
    header, rows = table(out)
    assert header[-4:] == ["required_snr_noic_dB", "required_snr_oic_dB", "gap_dB", "inversion_branch"]
    assert float(rows[0]["gap_dB"]) == pytest.approx(14.1, abs=0.1)
    assert float(rows[2]["gap_dB"]) == 0.0
    code2, out2, _ = run(capsys, "line", "--beta-p", "20dB", "--v", "3", "--gamma-s", "20dB", "--x-min", "0.5", "--x-max", "1.5", "--points", "3", "--target-rate", repr(math.log2(11)))
    assert table(out2)[1] == rows


@pytest.mark.parametrize("args", [("--x-min", "1", "--x-max", "0.5", "--points", "3"), ("--x-min", "0", "--x-max", "1", "--points", "3"), ("--x-min", "0.1", "--x-max", "1", "--points", "1")])
def test_line_bad_range(capsys, args):
    code, _, _ = run(capsys, "line", "--beta-p", "20dB", "--v", "3", "--gamma-s", "20dB", *args)
    assert code == 2


MC = """channels = 3
mean_gamma_p = 20dB
mean_beta_p = {beta}
iterations = 30
energy_grid = 0, 3, 30
{seed}
"""


def write_mc(tmp_path, beta="20dB", seed="seed = 42"):
    path = tmp_path / "mc.cfg"
    path.write_text(MC.format(beta=beta, seed=seed))
    return str(path)


def test_mc_output(capsys, tmp_path):
    code, out, _ = run(capsys, "mc", "--config", write_mc(tmp_path))
    assert code == 0
    assert "# seed=42" in out
    header, rows = table(out)
    assert header == ["energy", "avg_snr_per_channel", "avg_sum_rate_oic", "avg_sum_rate_noic", "avg_rel_diff_paper", "avg_rel_diff_companion"]
    assert rows[0]["avg_rel_diff_paper"] == "nan"
    for r in rows:
        assert float(r["avg_sum_rate_oic"]) >= float(r["avg_sum_rate_noic"])


def test_mc_missing_seed(capsys, tmp_path):
    code, _, err = run(capsys, "mc", "--config", write_mc(tmp_path, seed=""))
    assert code == 2
    assert "seed" in err


def test_mc_never_decodable_sentinel(capsys, tmp_path):
    code, out, _ = run(capsys, "mc", "--config", write_mc(tmp_path, beta="inf"))
    assert code == 0
    _, rows = table(out)
    for r in rows:
        assert float(r["avg_sum_rate_oic"]) == pytest.approx(float(r["avg_sum_rate_noic"]), rel=1e-11)


def test_mc_byte_identical(tmp_path):
    cfg = write_mc(tmp_path)
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["mc", "--config", cfg, "-o", str(a)]) == 0
    assert main(["mc", "--config", cfg, "-o", str(b)]) == 0
    assert main(["mc", "--config", cfg, "--workers", "2", "-o", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_mc_unknown_key(capsys, tmp_path):
    path = tmp_path / "mc.cfg"
    path.write_text(MC.format(beta="20dB", seed="seed = 1") + "colour = blue\n")
    code, _, err = run(capsys, "mc", "--config", str(path))
    assert code == 2
    assert "colour" in err


def test_internal_error_exit_code(capsys, monkeypatch):
    import oic.cli

    def boom(args):
        raise RuntimeError("boom")

    monkeypatch.setattr(oic.cli, "cmd_rate_curve", boom)
    code = main(["rate-curve", "--gamma-p", "1lin", "--beta-p", "1lin", "--gamma-s-grid", "1lin"])
    assert code == 1
    assert "internal error" in capsys.readouterr().err
