import json

import numpy as np
import pytest

from graphhc.cli import main
from graphhc.graph import read_edge_list, read_labels
from graphhc.tree import tree_from_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerateAndCluster:
    def test_gen_sbm_then_cluster(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        labels = tmp_path / "labels.txt"
        code, _, _ = run_cli(capsys, "gen-sbm", "--k", "3", "--n-k", "15",
                             "--p", "0.6", "--q", "0.05", "--seed", "0",
                             "--output", str(edges), "--labels", str(labels))
        assert code == 0
        g = read_edge_list(edges)
        assert g.n == 45
        lab = read_labels(labels)
        assert lab.shape[0] == 45

        tree_path = tmp_path / "tree.json"
        code, out, _ = run_cli(capsys, "cluster", "--input", str(edges),
                               "--algo", "specwrsc", "--k", "3", "--seed", "0",
                               "--output-tree", str(tree_path), "--emit-cost")
        assert code == 0
        cost = float(out.strip())
        assert cost > 0
        tree = tree_from_json(tree_path.read_text())
        assert tree.n_leaves == 45

    def test_cluster_all_algorithms(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        run_cli(capsys, "gen-sbm", "--k", "2", "--n-k", "10", "--p", "0.8",
                "--q", "0.05", "--seed", "1", "--output", str(edges))
        for algo in ("specwrsc", "caterpillar", "avglink", "balanced"):
            code, out, _ = run_cli(capsys, "cluster", "--input", str(edges),
                                   "--algo", algo, "--k", "2", "--emit-cost")
            assert code == 0, algo
            assert float(out.strip()) > 0

    def test_k_sweep_and_eta_sweep(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        run_cli(capsys, "gen-sbm", "--k", "3", "--n-k", "8", "--p", "0.8",
                "--q", "0.05", "--seed", "2", "--output", str(edges))
        code, out, err = run_cli(capsys, "cluster", "--input", str(edges),
                                 "--k-sweep", "4", "--emit-cost")
        assert code == 0
        code, out, err = run_cli(capsys, "cluster", "--input", str(edges),
                                 "--algo", "caterpillar", "--k", "3",
                                 "--eta-sweep", "--emit-cost")
        assert code == 0

    def test_dump_buckets(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        run_cli(capsys, "gen-sbm", "--k", "2", "--n-k", "8", "--p", "0.9",
                "--q", "0.2", "--seed", "3", "--output", str(edges))
        code, out, _ = run_cli(capsys, "cluster", "--input", str(edges),
                               "--algo", "specwrsc", "--k", "2",
                               "--dump-buckets", "-")
        assert code == 0
        payload = json.loads(out)
        assert len(payload) == 2
        members = sorted(v for bg in payload for b in bg["buckets"]
                        for v in b["vertices"])
        assert members == list(range(16))

    def test_merge_duplicates_flag(self, tmp_path, capsys):
        path = tmp_path / "dup.txt"
        path.write_text("0 1 1.0\n1 0 2.0\n1 2 1.0\n")
        code, _, _ = run_cli(capsys, "cluster", "--input", str(path),
                             "--algo", "avglink", "--emit-cost")
        assert code == 2  # duplicate rejected
        code, out, _ = run_cli(capsys, "cluster", "--input", str(path),
                               "--algo", "avglink", "--merge-duplicates",
                               "--emit-cost")
        assert code == 0


class TestSpectrum:
    def test_json_output_with_gap(self, tmp_path, capsys):
        edges = tmp_path / "g.txt"
        run_cli(capsys, "gen-sbm", "--k", "2", "--n-k", "12", "--p", "0.9",
                "--q", "0.01", "--seed", "0", "--output", str(edges))
        code, out, _ = run_cli(capsys, "spectrum", "--input", str(edges),
                               "--k", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 24
        assert len(payload["eigenvalues"]) == 3
        assert payload["eigenvalues"][0] == pytest.approx(0.0, abs=1e-8)
        assert payload["gap"] > 1.0


class TestKernelGraph:
    def test_points_to_graph(self, tmp_path, capsys):
        pts = tmp_path / "pts.csv"
        pts.write_text("0.0,0.0\n0.1,0.0\n5.0,5.0\n5.1,5.0\n")
        out_path = tmp_path / "kg.txt"
        code, _, _ = run_cli(capsys, "kernel-graph", "--points", str(pts),
                             "--sigma", "1.0", "--output", str(out_path))
        assert code == 0
        g = read_edge_list(out_path)
        assert g.n == 4
        assert g.m == 6


class TestHsbmCli:
    def test_gen_hsbm(self, tmp_path, capsys):
        edges = tmp_path / "h.txt"
        labels = tmp_path / "hl.txt"
        code, _, _ = run_cli(capsys, "gen-hsbm", "--n-k", "10", "--p", "0.6",
                             "--q-min", "0.01", "--seed", "0",
                             "--output", str(edges), "--labels", str(labels))
        assert code == 0
        assert read_edge_list(edges).n == 50
        assert read_labels(labels).max() == 4


class TestBenchCli:
    def test_bench_end_to_end(self, tmp_path, capsys):
        cfg = {
            "graphs": [{"name": "s", "type": "sbm", "k": 2, "n_k": 10,
                        "p": 0.8, "q": 0.05}],
            "algorithms": [{"algo": "specwrsc", "k": 2}, {"algo": "balanced"}],
            "seeds": [0, 1],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        csv_path = tmp_path / "out.csv"
        jsonl_path = tmp_path / "out.jsonl"
        code, out, _ = run_cli(capsys, "bench", "--config", str(cfg_path),
                               "--output-csv", str(csv_path),
                               "--output-jsonl", str(jsonl_path))
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "graph,n,m,algo,k,seed,cost,wall_time_s,depth,buckets,contracted_n"
        assert len(lines) == 5
        summary = json.loads(out)
        assert summary["errors"] == []

    def test_bench_error_exit_code(self, tmp_path, capsys):
        cfg = {"graphs": [{"name": "bad", "type": "nope"}],
               "algorithms": [{"algo": "balanced"}], "seeds": [0]}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code, _, _ = run_cli(capsys, "bench", "--config", str(cfg_path))
        assert code == 1


class TestVerifyCli:
    def test_quick_verify(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--quick")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) >= 8
        assert all(line.startswith("PASS") for line in lines)
