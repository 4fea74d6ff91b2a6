"""End-to-end CLI tests through real subprocesses.

Every test shells out to ``python -m scaffold_align.cli`` so argument
parsing, config merging, exit codes, and file outputs are exercised
exactly as a user would hit them.
"""

import csv
import io
import json
import subprocess
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path

import pytest

from scaffold_align.alignment import compute_alignment, records_csv_text
from scaffold_align.corpus import parse_corpus
from scaffold_align.embedding import HashingTextEmbedder, build_store

TOY = resources.files("scaffold_align") / "data" / "toy_corpus.jsonl"


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "scaffold_align.cli", *[str(a) for a in args]],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture()
def toy_path(tmp_path):
    path = tmp_path / "toy.jsonl"
    path.write_text(TOY.read_text(encoding="utf-8"), encoding="utf-8")
    return path


def test_summarize_stdout(toy_path):
    proc = run_cli("summarize", "--corpus", toy_path)
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert payload["dialogue_count"] == 8
    assert payload["message_count"] == 31
    assert 0.0 < payload["tutor_message_share"] < 1.0


def test_summarize_to_file(toy_path, tmp_path):
    out = tmp_path / "summary.json"
    proc = run_cli("summarize", "--corpus", toy_path, "--out", out)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["dialogue_count"] == 8


def test_missing_corpus_exits_2_and_names_path(tmp_path):
    missing = tmp_path / "nope.jsonl"
    proc = run_cli("summarize", "--corpus", missing)
    assert proc.returncode == 2
    assert str(missing) in proc.stderr


def test_malformed_line_reports_line_number(tmp_path):
    bad = tmp_path / "bad.jsonl"
    good_line = TOY.read_text(encoding="utf-8").splitlines()[0]
    bad.write_text(good_line + "\n{not json\n", encoding="utf-8")
    proc = run_cli("summarize", "--corpus", bad)
    assert proc.returncode == 2
    assert "line 2" in proc.stderr


def test_align_deterministic_and_matches_library(toy_path, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for out in (out_a, out_b):
        proc = run_cli("align", "--corpus", toy_path, "--out", out, "--dim", 64)
        assert proc.returncode == 0, proc.stderr
    assert out_a.read_bytes() == out_b.read_bytes()

    corpus = parse_corpus(toy_path.read_text(encoding="utf-8"))
    embedder = HashingTextEmbedder(dim=64)
    store = build_store(corpus, embedder.embed, dim=64)
    expected = records_csv_text(compute_alignment(corpus, store))
    assert out_a.read_text(encoding="utf-8") == expected


def test_align_min_messages_filters(toy_path, tmp_path):
    out = tmp_path / "filtered.csv"
    proc = run_cli(
        "align", "--corpus", toy_path, "--out", out, "--dim", 32, "--min-messages", 4
    )
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    # toy corpus message counts: 2,3,4,5,3,6,4,4 -> dialogues with >= 4 keep 5
    assert {r["dialogue_id"] for r in rows} == {
        "toy-003", "toy-004", "toy-006", "toy-007", "toy-008",
    }


def test_align_store_provider_roundtrip(toy_path, tmp_path):
    # build a store offline, then feed it back through --provider store
    corpus = parse_corpus(toy_path.read_text(encoding="utf-8"))
    embedder = HashingTextEmbedder(dim=48)
    store = build_store(corpus, embedder.embed, dim=48)
    store_path = tmp_path / "vectors.emb"
    from scaffold_align.embedding import write_store
    with open(store_path, "wb") as sink:
        write_store(store, sink)

    out_store = tmp_path / "from_store.csv"
    proc = run_cli(
        "align", "--corpus", toy_path, "--out", out_store,
        "--provider", "store", "--store", store_path,
    )
    assert proc.returncode == 0, proc.stderr

    out_det = tmp_path / "from_det.csv"
    proc = run_cli("align", "--corpus", toy_path, "--out", out_det, "--dim", 48)
    assert proc.returncode == 0, proc.stderr
    assert out_store.read_bytes() == out_det.read_bytes()


def test_align_incomplete_store_exits_3_naming_key(toy_path, tmp_path):
    corpus = parse_corpus(toy_path.read_text(encoding="utf-8"))
    embedder = HashingTextEmbedder(dim=16)
    store = build_store(corpus, embedder.embed, dim=16)
    # drop one dialogue's anchor vector
    from scaffold_align.embedding import EmbeddingStore, TextKey, write_store
    partial = EmbeddingStore(dim=16)
    for key, vec in store.items():
        parsed = TextKey.from_string(key)
        if not (parsed.dialogue_id == "toy-005" and parsed.kind == "problem"):
            partial.put(key, vec)
    store_path = tmp_path / "partial.emb"
    with open(store_path, "wb") as sink:
        write_store(partial, sink)

    proc = run_cli(
        "align", "--corpus", toy_path, "--out", tmp_path / "x.csv",
        "--provider", "store", "--store", store_path,
    )
    assert proc.returncode == 3
    assert "toy-005" in proc.stderr
    assert "problem" in proc.stderr


class _EmbedHandler(BaseHTTPRequestHandler):
    """Deterministic stand-in service: hashing embedder behind HTTP."""

    embedder = HashingTextEmbedder(dim=40)

    def do_POST(self):
        body = self.rfile.read(int(self.headers["Content-Length"]))
        texts = json.loads(body)["texts"]
        vectors = [[float(x) for x in self.embedder.embed(t)] for t in texts]
        payload = json.dumps({"vectors": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def embed_service():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _EmbedHandler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}/embed"
    finally:
        server.shutdown()
        server.server_close()


def test_align_http_provider_matches_offline(toy_path, tmp_path, embed_service):
    out = tmp_path / "http.csv"
    proc = run_cli(
        "align", "--corpus", toy_path, "--out", out,
        "--provider", "http", "--endpoint", embed_service, "--batch-size", 7,
    )
    assert proc.returncode == 0, proc.stderr

    out_offline = tmp_path / "offline.csv"
    proc = run_cli("align", "--corpus", toy_path, "--out", out_offline, "--dim", 40)
    assert proc.returncode == 0, proc.stderr
    assert out.read_bytes() == out_offline.read_bytes()


def test_align_http_failure_exits_4(toy_path, tmp_path):
    proc = run_cli(
        "align", "--corpus", toy_path, "--out", tmp_path / "x.csv",
        "--provider", "http", "--endpoint", "http://127.0.0.1:9/embed",
    )
    assert proc.returncode == 4


def test_analyze_selected_models(tmp_path):
    # the toy corpus is too small for stable fits; simulate a corpus first
    corpus_path = tmp_path / "sim.jsonl"
    proc = run_cli(
        "simulate", "--seed", 4, "--out", corpus_path,
        "--dialogues", 60, "--tutors", 6,
    )
    assert proc.returncode == 0, proc.stderr

    out_dir = tmp_path / "reports"
    proc = run_cli(
        "analyze", "--corpus", corpus_path, "--out-dir", out_dir,
        "--models", "0,1", "--dim", 64,
    )
    assert proc.returncode == 0, proc.stderr

    fit0 = json.loads((out_dir / "fit_model_0.json").read_text())
    fit1 = json.loads((out_dir / "fit_model_1.json").read_text())
    assert fit0["model_id"] == 0 and fit1["model_id"] == 1
    assert fit0["converged"] and fit1["converged"]
    assert not (out_dir / "fit_model_2.json").exists()

    comparison = json.loads((out_dir / "comparison_model_1_vs_0.json").read_text())
    assert comparison["chi2"] >= 0.0
    assert comparison["df"] == 1
    assert 0.0 <= comparison["p_value"] <= 1.0

    assert (out_dir / "records.csv").exists()
    for anchor in ("problem", "solution"):
        for role in ("tutor", "student"):
            assert (out_dir / f"trajectory_{anchor}_{role}.csv").exists()
            assert (out_dir / f"density_{anchor}_{role}.csv").exists()


def test_analyze_from_records_skips_embedding(tmp_path):
    corpus_path = tmp_path / "sim.jsonl"
    run_cli("simulate", "--seed", 4, "--out", corpus_path, "--dialogues", 60, "--tutors", 6)
    records_path = tmp_path / "records.csv"
    proc = run_cli("align", "--corpus", corpus_path, "--out", records_path, "--dim", 64)
    assert proc.returncode == 0, proc.stderr

    out_dir = tmp_path / "reports"
    proc = run_cli(
        "analyze", "--records", records_path, "--out-dir", out_dir, "--models", "0,1",
    )
    assert proc.returncode == 0, proc.stderr
    # records.csv is an input here, not an output
    assert not (out_dir / "records.csv").exists()
    assert (out_dir / "fit_model_1.json").exists()


def test_analyze_degenerate_records_exit_5(tmp_path):
    # constant similarity column cannot be standardized
    records_path = tmp_path / "degenerate.csv"
    header = ("dialogue_id,tutor_id,index,role,rel_position,msg_length,"
              "sim_problem,sim_solution,qs_baseline")
    rows = [header]
    for d in range(3):
        for i in range(1, 7):
            role = "tutor" if i % 2 else "student"
            length = 5 + ((7 * i + 3 * d) % 11)  # not collinear with index
            rows.append(
                f"d{d},t{d % 2},{i},{role},{i / 6:.6f},{length},0.5,{0.1 * i:.6f},0.0"
            )
    records_path.write_text("\n".join(rows) + "\n", encoding="utf-8")

    proc = run_cli("analyze", "--records", records_path, "--out-dir", tmp_path / "r")
    assert proc.returncode == 5
    assert "sim_problem" in proc.stderr


def test_analyze_needs_corpus_or_records(tmp_path):
    proc = run_cli("analyze", "--out-dir", tmp_path / "r")
    assert proc.returncode == 2
    assert "--corpus" in proc.stderr


def test_simulate_determinism_and_truth(tmp_path):
    out_a = tmp_path / "a.jsonl"
    out_b = tmp_path / "b.jsonl"
    for out in (out_a, out_b):
        proc = run_cli(
            "simulate", "--seed", 11, "--out", out, "--dialogues", 40, "--tutors", 4,
        )
        assert proc.returncode == 0, proc.stderr
    assert out_a.read_bytes() == out_b.read_bytes()

    truth = json.loads((tmp_path / "a.jsonl.truth.json").read_text())
    assert truth["config"]["seed"] == 11
    assert truth["planted_signs"]["sim_solution:student"] == 1

    proc = run_cli(
        "simulate", "--seed", 12, "--out", tmp_path / "c.jsonl",
        "--dialogues", 40, "--tutors", 4,
    )
    assert proc.returncode == 0
    assert (tmp_path / "c.jsonl").read_bytes() != out_a.read_bytes()


def test_config_file_supplies_defaults_flags_win(toy_path, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"min_messages": 4, "dim": 32}))
    out = tmp_path / "out.csv"

    # config value applies when the flag is absent
    proc = run_cli("align", "--corpus", toy_path, "--out", out, "--config", config)
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert {r["dialogue_id"] for r in rows} == {
        "toy-003", "toy-004", "toy-006", "toy-007", "toy-008",
    }

    # explicit flag beats the config file
    proc = run_cli(
        "align", "--corpus", toy_path, "--out", out, "--config", config,
        "--min-messages", 1,
    )
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert {r["dialogue_id"] for r in rows} == {f"toy-{i:03d}" for i in range(1, 9)}


def test_config_unknown_key_exits_2(toy_path, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"not_a_real_option": 1}))
    proc = run_cli("summarize", "--corpus", toy_path, "--config", config)
    assert proc.returncode == 2
    assert "not_a_real_option" in proc.stderr


def test_export_golden_stable(tmp_path):
    dir_a = tmp_path / "golden_a"
    dir_b = tmp_path / "golden_b"
    for out_dir in (dir_a, dir_b):
        proc = run_cli("export-golden", "--out-dir", out_dir, "--dim", 64)
        assert proc.returncode == 0, proc.stderr
    for name in ("corpus.jsonl", "store.emb", "records.csv", "summary.json"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), name


def test_unknown_subcommand_exits_2():
    proc = run_cli("frobnicate")
    assert proc.returncode == 2


def test_version_flag():
    proc = run_cli("--version")
    assert proc.returncode == 0
    assert "0.1.0" in proc.stdout
