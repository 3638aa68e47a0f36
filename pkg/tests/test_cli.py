import json

from rvdsp.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, main


def write_scenario(tmp_path, body, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(body)
    return str(path)


CONV_SCENARIO = """
[scenario]
kind = "conv"
mode = "testbench"
n = 16
k = 3
seed = 4
"""


class TestRun:
    def test_report_to_stdout(self, tmp_path, capsys):
        path = write_scenario(tmp_path, CONV_SCENARIO)
        assert main(["run", "--scenario", path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["status"] == "ok"
        assert report["conv"]["busy_cycles"] == (16 - 3 + 1) * (3 * 3 + 1)
        assert len(report["output"]["words"]) == 14

    def test_report_file_and_dump(self, tmp_path, capsys):
        path = write_scenario(tmp_path, CONV_SCENARIO)
        report_path = tmp_path / "report.json"
        dump_path = tmp_path / "datamem.hex"
        assert main(["run", "--scenario", path,
                     "--report", str(report_path),
                     "--dump", "datamem", str(dump_path)]) == EXIT_OK
        report = json.loads(report_path.read_text())
        assert report["schema_version"] == 1
        dump = dump_path.read_text()
        assert dump.startswith("@00008000")

    def test_trace_file(self, tmp_path):
        path = write_scenario(tmp_path, CONV_SCENARIO)
        trace_path = tmp_path / "trace.txt"
        assert main(["run", "--scenario", path,
                     "--trace", str(trace_path)]) == EXIT_OK
        lines = trace_path.read_text().splitlines()
        assert lines and all(" | " in ln for ln in lines)

    def test_full_system_run(self, tmp_path, capsys):
        body = CONV_SCENARIO.replace('"testbench"', '"full_system"')
        path = write_scenario(tmp_path, body)
        assert main(["run", "--scenario", path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["cpu"]["retired"] > 0

    def test_external_data_files(self, tmp_path, capsys):
        x_path = tmp_path / "x.hex"
        h_path = tmp_path / "h.hex"
        x_path.write_text("@00008000\n" + "".join(f"{v:08X}\n" for v in (1, 2, 3, 4)))
        h_path.write_text("@00008100\n00000001\n00000001\n")
        body = f"""
[scenario]
kind = "conv"
n = 4
k = 2

[data]
x_file = "{x_path}"
h_file = "{h_path}"
"""
        path = write_scenario(tmp_path, body)
        assert main(["run", "--scenario", path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["output"]["words"] == [3, 5, 7]

    def test_missing_file_is_config_error(self, capsys):
        assert main(["run", "--scenario", "/nonexistent.cfg"]) == EXIT_CONFIG

    def test_overlapping_buffers_rejected(self, tmp_path, capsys):
        body = """
[scenario]
kind = "conv"
n = 64
k = 8
in_addr = 0x8000
kern_addr = 0x8004
out_addr = 0x9000
"""
        path = write_scenario(tmp_path, body)
        assert main(["run", "--scenario", path]) == EXIT_VALIDATION
        assert "overlap" in capsys.readouterr().err

    def test_bad_lengths_rejected(self, tmp_path, capsys):
        body = CONV_SCENARIO.replace("k = 3", "k = 99")
        path = write_scenario(tmp_path, body)
        assert main(["run", "--scenario", path]) == EXIT_VALIDATION

    def test_dot_scenario(self, tmp_path, capsys):
        body = """
[scenario]
kind = "dot"
l = 5
seed = 2
"""
        path = write_scenario(tmp_path, body)
        assert main(["run", "--scenario", path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["dot"]["busy_cycles"] == 16


class TestModel:
    def test_conv(self, capsys):
        assert main(["model", "conv", "--n", "1024", "--k", "16",
                     "--freq", "100e6"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "C_SW   = 166485" in out
        assert "C_DSP  = 49451" in out
        assert "3.3667" in out
        assert "1.66485 ms" in out
        assert "0.49451 ms" in out

    def test_conv_invalid(self, capsys):
        assert main(["model", "conv", "--n", "4", "--k", "9"]) == EXIT_CONFIG

    def test_dot(self, capsys):
        assert main(["model", "dot", "--l", "8192"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "81925" in out and "24577" in out
        assert "81920" in out and "24576" in out

    def test_cnn(self, capsys):
        assert main(["model", "cnn", "--n", "256", "--k", "16",
                     "--c", "4", "--k-out", "8"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "macs = 131072" in out
        assert "1310720" in out and "393216" in out

    def test_dense(self, capsys):
        assert main(["model", "dense", "--in-features", "128",
                     "--out-features", "64"]) == EXIT_OK
        assert "macs = 8192" in capsys.readouterr().out


class TestCompare:
    def test_reference_workload_matches(self, capsys):
        assert main(["compare"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "166485" in out
        assert "49451" in out
        assert "49441" in out
        assert "all simulated figures match" in out


class TestAsm:
    def test_listing(self, tmp_path, capsys):
        prog = tmp_path / "prog.hex"
        prog.write_text("@00000000\n00700093\n00100073\n")
        assert main(["asm", "--list", str(prog)]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "00000000: 00700093  addi x1, x0, 7"
        assert "ebreak" in out[1]

    def test_bad_image(self, tmp_path, capsys):
        prog = tmp_path / "bad.hex"
        prog.write_text("zzz\n")
        assert main(["asm", "--list", str(prog)]) == EXIT_CONFIG
