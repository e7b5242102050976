import csv
import io
import re
import statistics

import numpy as np
import pytest

from sgwindow.bench import add_noise, gen_waveform, mix_seed
from sgwindow.cli import main
from sgwindow.csvio import read_table, to_text, write_signal
from sgwindow.errors import ParseError
from sgwindow.kernel import Signal
from sgwindow.window import CostModel, nopt_closed


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_csv(path, values, times=None):
    with open(path, "w", newline="") as fh:
        write_signal(fh, Signal(np.asarray(values, dtype=float), times=times))
    return path


class TestCoeffs:
    def test_worked_example(self, capsys):
        code, out, _ = run(capsys, "coeffs", "--order", 2, "--window", 5)
        assert code == 0
        _, data = read_table(io.StringIO(out))
        np.testing.assert_array_equal(data[:, 0], [-2, -1, 0, 1, 2])
        np.testing.assert_allclose(data[:, 1], np.array([-3, 12, 17, 12, -3]) / 35, atol=1e-15)

    @pytest.mark.parametrize("method", ["cheb", "ls"])
    def test_moving_average(self, capsys, method):
        code, out, _ = run(capsys, "coeffs", "--order", 0, "--window", 3, "--method", method)
        assert code == 0
        _, data = read_table(io.StringIO(out))
        np.testing.assert_allclose(data[:, 1], 1 / 3, atol=1e-15)

    @pytest.mark.parametrize("order, window", [(3, 9), (2, 4), (2, 3)])
    def test_invalid_spec(self, capsys, order, window):
        code, out, err = run(capsys, "coeffs", "--order", order, "--window", window)
        assert code == 4 and out == ""
        assert "error" in err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["coeffs", "--order", "2"])
        assert exc.value.code == 2


class TestSmooth:
    def test_constant_column(self, tmp_path, capsys):
        src = write_csv(tmp_path / "c.csv", np.full(40, 2.5))
        for edge in ("reflect", "truncate", "hold"):
            code, out, _ = run(capsys, "smooth", "--input", src, "--order", 2, "--window", 11,
                               "--edge", edge)
            assert code == 0
            _, data = read_table(io.StringIO(out))
            assert data.shape == (40, 1)
            np.testing.assert_allclose(data[:, 0], 2.5, rtol=1e-13)

    def test_two_columns_keep_time(self, tmp_path, capsys):
        t = np.linspace(0, 1, 30)
        src = write_csv(tmp_path / "s.csv", np.sin(t), times=t)
        out_path = tmp_path / "o.csv"
        code, _, _ = run(capsys, "smooth", "--input", src, "--order", 2, "--window", 7,
                         "--out", out_path)
        assert code == 0
        _, data = read_table(open(out_path))
        np.testing.assert_array_equal(data[:, 0], t)

    def test_even_window(self, tmp_path, capsys):
        src = write_csv(tmp_path / "c.csv", np.ones(20))
        code, _, err = run(capsys, "smooth", "--input", src, "--order", 2, "--window", 4)
        assert code == 4 and "odd" in err

    def test_window_longer_than_signal(self, tmp_path, capsys):
        src = write_csv(tmp_path / "c.csv", np.ones(5))
        code, _, _ = run(capsys, "smooth", "--input", src, "--order", 2, "--window", 9)
        assert code == 4

    def test_auto_needs_sigma(self, tmp_path):
        src = write_csv(tmp_path / "c.csv", np.ones(50))
        with pytest.raises(SystemExit) as exc:
            main(["smooth", "--input", str(src), "--order", "2", "--auto"])
        assert exc.value.code == 2

    def test_auto_estimate_sigma(self, tmp_path, capsys):
        x = add_noise(gen_waveform("X2", L=300), 0.3, 1).samples
        src = write_csv(tmp_path / "n.csv", x)
        code, out, err = run(capsys, "smooth", "--input", src, "--order", 2, "--auto",
                             "--estimate-sigma")
        assert code == 0
        assert re.search(r"final N=\d+ status=\S+ iterations=\d+", err)
        assert len(out.splitlines()) == 300

    def test_auto_x1_median(self, tmp_path, capsys):
        clean = gen_waveform("X1")
        finals = []
        for k in range(9):
            x = add_noise(clean, 1.0, mix_seed(0, k))
            src = write_csv(tmp_path / f"x{k}.csv", x.samples, times=x.times)
            code, _, err = run(capsys, "smooth", "--input", src, "--order", 2, "--auto",
                               "--sigma", 1)
            assert code == 0
            finals.append(int(re.search(r"final N=(\d+)", err).group(1)))
        assert statistics.median_low(finals) == pytest.approx(163, rel=0.25)

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, "smooth", "--input", tmp_path / "nope.csv", "--order", 0,
                         "--window", 3)
        assert code == 3

    def test_garbage_input(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("1.0\nabc\n2.0\n")
        code, _, err = run(capsys, "smooth", "--input", p, "--order", 0, "--window", 3)
        assert code == 3 and "not a number" in err


class TestSelect:
    def test_constant_saturates(self, tmp_path, capsys):
        src = write_csv(tmp_path / "c.csv", np.full(200, 4.0))
        code, out, _ = run(capsys, "select", "--input", src, "--order", 2, "--sigma", 1)
        assert code == 0
        last = out.strip().splitlines()[-1].split(",")
        assert last[0] == "final" and last[2] == "saturated-at-bound"

    def test_quartic(self, tmp_path, capsys):
        t = np.arange(-150, 151, dtype=float)
        sigma = 1e-3
        x = add_noise(t**4 / 24, sigma, 5)
        src = write_csv(tmp_path / "q.csv", x)
        code, out, _ = run(capsys, "select", "--input", src, "--order", 2, "--sigma", sigma)
        assert code == 0
        final = int(out.strip().splitlines()[-1].split(",")[1])
        _, want, _ = nopt_closed(CostModel(2, sigma**2, 1.0))
        assert abs(final - want) <= 4

    def test_trace_rows(self, tmp_path, capsys):
        x = add_noise(gen_waveform("X1"), 1.0, 3).samples
        src = write_csv(tmp_path / "x.csv", x)
        code, out, _ = run(capsys, "select", "--input", src, "--order", 2, "--sigma", 1)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "iteration,N1,v_hat,N_next"
        assert 1 <= len(lines) - 2 <= 50
        windows = [int(line.split(",")[1]) for line in lines[1:-1]]
        assert all(w % 2 == 1 for w in windows)

    def test_too_short(self, tmp_path, capsys):
        src = write_csv(tmp_path / "s.csv", np.ones(4))
        code, _, _ = run(capsys, "select", "--input", src, "--order", 2, "--sigma", 1)
        assert code == 4


class TestBench:
    def test_table1_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            code, _, _ = run(capsys, "bench", "table1", "--trials", 2, "--seed", 7, "--out", p)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        rows = list(csv.reader(open(a)))
        assert len(rows) == 25
        assert rows[0][:3] == ["waveform", "sigma", "n"]

    def test_table1_anchor(self, tmp_path, capsys):
        p = tmp_path / "t.csv"
        run(capsys, "bench", "table1", "--trials", 1, "--out", p)
        rows = [line.split(",") for line in p.read_text().splitlines()[1:]]
        row = next(r for r in rows if r[:3] == ["X1", "1", "2"])
        assert int(row[9]) == pytest.approx(163, rel=0.10)

    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "bench", "sweep", "--waveform", "X1", "--order", 2,
                           "--sigmas", "0.25,0.5,1,2", "--trials", 2)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 5
        nf = [int(line.split(",")[1]) for line in lines[1:]]
        assert nf == sorted(nf)

    def test_demo(self, capsys):
        code, out, _ = run(capsys, "bench", "demo", "--windows", "19,163,501")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,clean,noisy,y_19,y_163,y_501"
        assert len(lines) == 1001

    def test_bad_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["bench", "table2"])
        assert exc.value.code == 2

    def test_bad_demo_windows(self, capsys):
        code, _, _ = run(capsys, "bench", "demo", "--windows", "20")
        assert code == 4


class TestCsv:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        vals = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-12, 12, size=(20, 3))
        _, back = read_table(io.StringIO(to_text(vals.tolist(), ["a", "b", "c"])))
        np.testing.assert_array_equal(back, vals)

    @pytest.mark.parametrize("text", ["", "a,b\n", "1,2\n3\n", "1\nnan\n", "x\n1\n2,3\n"])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            read_table(io.StringIO(text))
