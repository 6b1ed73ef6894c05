"""CLI surface: exit codes, file outputs, reproducibility, serving."""

import http.client
import json
import os
import socket
import subprocess
import sys
import threading
import time

import pytest

from excellence_mapper.cli import main

RUN = [sys.executable, "-m", "excellence_mapper.cli"]


def run_cli(args, **kwargs):
    env = dict(os.environ)
    env.update(kwargs.pop("env", {}))
    return subprocess.run(RUN + args, capture_output=True, text=True,
                          env=env, **kwargs)


class TestSimulateCommand:
    def test_writes_corpus_files(self, tmp_path):
        out = tmp_path / "sim"
        code = main(["simulate", "--seed", "3", "--institutions", "6",
                     "--papers", "25", "--beta0", "-2.0", "--sigma", "0.4",
                     "--out-dir", str(out)])
        assert code == 0
        for name in ("papers.jsonl", "institutions.csv",
                     "assignments.csv", "truth.json"):
            assert (out / name).is_file()

    def test_bad_parameters_exit_one(self, tmp_path):
        code = main(["simulate", "--seed", "3", "--institutions", "0",
                     "--papers", "25", "--beta0", "-2.0", "--sigma", "0.4",
                     "--out-dir", str(tmp_path)])
        assert code == 1


class TestFitCommand:
    def test_fit_succeeds(self, sim_corpus, tmp_path, capsys):
        out = tmp_path / "results.json"
        dump = tmp_path / "assignments.csv"
        code = main(["fit",
                     "--papers", str(sim_corpus["papers"]),
                     "--institutions", str(sim_corpus["institutions"]),
                     "--subjects", "all",
                     "--out", str(out),
                     "--dump-percentiles", str(dump),
                     "--generated-at", "2026-01-01T00:00:00Z"])
        assert code == 0
        payload = json.loads(out.read_text())
        assert [s["subject"] for s in payload["subjects"]] == ["PHYS"]
        assert dump.read_text().startswith("paper_id,subject,")
        assert "1 subject(s) fitted" in capsys.readouterr().out

    def test_all_subjects_failed_exits_two(self, sim_corpus, tmp_path, capsys):
        out = tmp_path / "results.json"
        code = main(["fit",
                     "--papers", str(sim_corpus["papers"]),
                     "--institutions", str(sim_corpus["institutions"]),
                     "--min-institutions", "100",
                     "--out", str(out)])
        assert code == 2
        assert json.loads(out.read_text())["subjects"] == []
        assert "below min_institutions" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        code = main(["fit", "--papers", str(tmp_path / "nope.jsonl"),
                     "--institutions", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "r.json")])
        assert code == 1

    def test_malformed_input_exits_one(self, sim_corpus, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"paper_id": "P1", "year": 2007}\n')
        code = main(["fit", "--papers", str(bad),
                     "--institutions", str(sim_corpus["institutions"]),
                     "--out", str(tmp_path / "r.json")])
        assert code == 1
        assert "line 1" in capsys.readouterr().err

    def test_source_date_epoch_reproducibility(self, sim_corpus, tmp_path):
        args = ["fit",
                "--papers", str(sim_corpus["papers"]),
                "--institutions", str(sim_corpus["institutions"]),
                "--out", ""]
        env = {"SOURCE_DATE_EPOCH": "1767225600"}
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        first = run_cli(args[:-1] + [str(out1)], env=env)
        second = run_cli(args[:-1] + [str(out2)], env=env)
        assert first.returncode == 0 and second.returncode == 0, second.stderr
        assert out1.read_bytes() == out2.read_bytes()
        assert json.loads(out1.read_text())["generated_at"] == \
            "2026-01-01T00:00:00Z"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class TestServeCommand:
    def test_serves_results_and_static_files(self, tmp_path):
        results = tmp_path / "results.json"
        results.write_text('{"schema_version": 1, "subjects": []}')
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html>ok</html>")
        port = free_port()

        thread = threading.Thread(
            target=main,
            args=(["serve", "--results", str(results), "--port", str(port),
                   "--ui-dir", str(ui)],),
            daemon=True,
        )
        thread.start()
        deadline = time.time() + 5.0
        last_error = None
        while time.time() < deadline:
            try:
                conn = http.client.HTTPConnection("127.0.0.1", port, timeout=1)
                conn.request("GET", "/results.json")
                response = conn.getresponse()
                body = response.read()
                assert response.status == 200
                assert json.loads(body)["schema_version"] == 1
                conn.request("GET", "/index.html")
                page = conn.getresponse()
                assert page.status == 200
                assert b"ok" in page.read()
                return
            except (ConnectionError, OSError) as exc:
                last_error = exc
                time.sleep(0.05)
        pytest.fail(f"server did not come up: {last_error}")

    def test_missing_results_exits_one(self, tmp_path):
        code = main(["serve", "--results", str(tmp_path / "nope.json")])
        assert code == 1
