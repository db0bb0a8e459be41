from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from helfi_align.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = str(FIXTURES / "corpus.tsv")


@pytest.fixture()
def runner():
    return CliRunner()


class TestValidateCommand:
    def test_clean_fixture_exit_zero(self, runner):
        result = runner.invoke(main, ["validate", CORPUS])
        assert result.exit_code == 0
        assert "0 errors" in result.output or "0 errors" in (result.stderr or "")

    def test_mutated_fixture_names_rule_and_verse(self, runner, corpus_text, tmp_path):
        broken = corpus_text.replace("\t6b\tneuvo\t", "\t9\tneuvo\t")
        path = tmp_path / "broken.tsv"
        path.write_text(broken, encoding="utf-8")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "R1-dangling-link" in result.output
        assert "ps001:001" in result.output

    def test_nonexistent_path_exit_two(self, runner):
        result = runner.invoke(main, ["validate", "/does/not/exist.tsv"])
        assert result.exit_code == 2

    def test_tsv_format(self, runner):
        result = runner.invoke(main, ["validate", CORPUS, "--format", "tsv"])
        assert result.exit_code == 0

    def test_stdin(self, runner, corpus_text):
        result = runner.invoke(main, ["validate", "-"], input=corpus_text)
        assert result.exit_code == 0

    def test_rules_file(self, runner, tmp_path, corpus_text):
        rules = tmp_path / "rules.cfg"
        rules.write_text("R7-unlinked-source=off\n")
        result = runner.invoke(main, ["validate", CORPUS, "--rules", str(rules)])
        assert result.exit_code == 0

    def test_rules_env_var(self, runner, tmp_path):
        rules = tmp_path / "rules.cfg"
        rules.write_text("R7-unlinked-source=off\n")
        result = runner.invoke(main, ["validate", CORPUS], env={"HELFI_RULES": str(rules)})
        assert result.exit_code == 0

    def test_profile_env_var(self, runner, tmp_path, corpus_text):
        profile = tmp_path / "fmt.profile"
        profile.write_text("lenient=yes\n", encoding="utf-8")
        commented = tmp_path / "commented.tsv"
        commented.write_text("# header\n" + corpus_text, encoding="utf-8")
        strict = runner.invoke(main, ["validate", str(commented)])
        assert strict.exit_code == 1
        lenient = runner.invoke(main, ["validate", str(commented)], env={"HELFI_PROFILE": str(profile)})
        assert lenient.exit_code == 0


class TestConcordCommand:
    def test_single_headword(self, runner):
        result = runner.invoke(main, ["concord", CORPUS, "--headword", "autuas"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "autuas"
        assert lines[1] == "  835 (1)"
        assert len(lines) == 3

    def test_all_headwords_in_order(self, runner):
        result = runner.invoke(main, ["concord", CORPUS])
        assert result.exit_code == 0
        heads = [l for l in result.output.splitlines() if l and not l.startswith(" ")]
        # 15 headwords plus the periphery appendix section marker.
        assert len([h for h in heads if h != "periphery appendix"]) == 15

    def test_json_format(self, runner):
        result = runner.invoke(main, ["concord", CORPUS, "--format", "json"])
        tree = json.loads(result.output)
        assert len(tree["headwords"]) == 15

    def test_unknown_headword_exit_one(self, runner):
        result = runner.invoke(main, ["concord", CORPUS, "--headword", "zzz"])
        assert result.exit_code == 1

    def test_kwic_width(self, runner):
        result = runner.invoke(main, ["concord", CORPUS, "--headword", "autuas", "--kwic-width", "20"])
        assert result.exit_code == 0
        kwic = result.output.splitlines()[2].lstrip()
        window = kwic.split("  ", 1)[1]
        assert len(window) <= 20


class TestSyncCommand:
    def test_catalog_rows(self, runner, tmp_path):
        report = tmp_path / "report.tsv"
        result = runner.invoke(
            main,
            ["sync", str(FIXTURES / "seg_first.tsv"), str(FIXTURES / "seg_second.tsv"), "--report", str(report)],
        )
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 10
        rows = [l.split("\t") for l in report.read_text(encoding="utf-8").splitlines()]
        layers = {}
        for layer, ref, word, kind, _ in rows:
            layers.setdefault((ref, word), set()).add(int(layer))
        assert 1 in layers[("mal003:012", "4")]
        assert 2 in layers[("mal003:012", "1")]
        assert 3 in layers[("mal003:012", "2")]
        assert 3 in layers[("ecc004:010", "8")]

    def test_identical_inputs_empty_report(self, runner, tmp_path):
        result = runner.invoke(main, ["sync", str(FIXTURES / "seg_first.tsv"), str(FIXTURES / "seg_first.tsv")])
        assert result.exit_code == 0
        # Unified output only; no discrepancy rows follow the ten words.
        assert len(result.output.splitlines()) == 10

    def test_text_mismatch_exit_one(self, runner, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        a.write_text("gen001:001\t1\tוְדוֹר\n", encoding="utf-8")
        b.write_text("gen001:001\t1\tכְּדוֹר\n", encoding="utf-8")
        result = runner.invoke(main, ["sync", str(a), str(b)])
        assert result.exit_code == 1

    def test_custom_prefix_inventory(self, runner, tmp_path):
        # Without ה in the inventory, the article split classifies as a
        # suffix and merges away.
        prefixes = tmp_path / "prefixes.txt"
        prefixes.write_text("ו\n", encoding="utf-8")
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        a.write_text("gen001:005\t5\tוְ/הַ/שָּׁמַיִם\n", encoding="utf-8")
        b.write_text("gen001:005\t5\tוְ/הַ/שָּׁמַיִם\n", encoding="utf-8")
        default = runner.invoke(main, ["sync", str(a), str(b)])
        assert default.output.splitlines()[0].endswith("וְ+הַ+שָּׁמַיִם")
        narrowed = runner.invoke(main, ["sync", str(a), str(b), "--prefixes", str(prefixes)])
        assert narrowed.exit_code == 0
        assert narrowed.output.splitlines()[0].endswith("וְ+הַ=שָּׁמַיִם")


class TestDiffCommand:
    def test_identical_editions(self, runner):
        result = runner.invoke(main, ["diff", CORPUS, CORPUS])
        assert result.exit_code == 0
        assert result.output == ""

    def test_one_verse_delta(self, runner, corpus_text, psalms_text, tmp_path):
        only_ps = tmp_path / "only_ps.tsv"
        only_ps.write_text(psalms_text, encoding="utf-8")
        result = runner.invoke(main, ["diff", CORPUS, str(only_ps)])
        assert result.exit_code == 0
        assert result.output.splitlines() == ["missing-in-b\thb001:001\t"]

    def test_surface_delta_counts(self, runner, corpus_text, tmp_path):
        edited = corpus_text.replace("muinoin _␣", "ammoin _␣")
        path = tmp_path / "edited.tsv"
        path.write_text(edited, encoding="utf-8")
        result = runner.invoke(main, ["diff", CORPUS, str(path)])
        rows = result.output.splitlines()
        assert len(rows) == 1
        assert rows[0].startswith("surface-differs\thb001:001")


class TestStatsCommand:
    def test_fixture_counts(self, runner):
        result = runner.invoke(main, ["stats", CORPUS])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        rows = {l.split("\t")[0]: l.split("\t") for l in lines[1:]}
        assert rows["ps"][1:4] == ["1", "9", "10"]
        assert rows["hb"][1:4] == ["1", "7", "9"]
        assert rows["total"][2] == "16"

    def test_empty_corpus(self, runner, tmp_path):
        empty = tmp_path / "empty.tsv"
        empty.write_text("", encoding="utf-8")
        result = runner.invoke(main, ["stats", str(empty)])
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 1  # header only


class TestConvertCommand:
    def test_canonicalize_is_identity_on_canonical_file(self, runner, corpus_text):
        result = runner.invoke(main, ["convert", CORPUS, "--canonicalize"])
        assert result.exit_code == 0
        assert result.output == corpus_text

    def test_lenient_input_becomes_strict_valid(self, runner, corpus_text, tmp_path):
        messy = "# a comment line\n" + corpus_text
        path = tmp_path / "messy.tsv"
        path.write_text(messy, encoding="utf-8")
        out = tmp_path / "clean.tsv"
        result = runner.invoke(main, ["convert", str(path), "-o", str(out)])
        assert result.exit_code == 0
        from helfi_align.formats import parse_corpus

        reparsed, diags = parse_corpus(out.read_text(encoding="utf-8").splitlines(True))
        assert not diags  # strict-valid now
        assert len(reparsed.verses) == 2

    def test_profile_switches_marker(self, runner, tmp_path):
        profile = tmp_path / "alt.profile"
        profile.write_text("marker= _SP\n", encoding="utf-8")
        result = runner.invoke(main, ["convert", CORPUS, "--profile", str(profile)])
        assert result.exit_code == 0
        assert " _SP" in result.output
        assert "␣" not in result.output


class TestServeCommand:
    def test_port_in_use_exit_one(self, runner):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        result = runner.invoke(main, ["serve", CORPUS, "--port", str(port)])
        blocker.close()
        assert result.exit_code == 1

    def test_serve_and_fetch_meta(self, tmp_path):
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        proc = subprocess.Popen(
            [sys.executable, "-m", "helfi_align.cli", "serve", CORPUS, "--port", str(port)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            import httpx

            meta = None
            for _ in range(100):
                try:
                    meta = httpx.get(f"http://127.0.0.1:{port}/corpus/meta", timeout=1.0).json()
                    break
                except Exception:
                    time.sleep(0.1)
            assert meta is not None, "service never came up"
            assert meta["books"] == ["ps", "hb"]
        finally:
            proc.terminate()
            proc.wait(timeout=10)


class TestHelp:
    @pytest.mark.parametrize(
        "command,flags",
        [
            ("validate", ["--rules", "--format", "--profile", "--books", "--extractors", "--lenient"]),
            ("concord", ["--headword", "--kwic-width", "--format"]),
            ("sync", ["--report", "--prefixes"]),
            ("diff", ["--profile", "--books"]),
            ("stats", ["--profile"]),
            ("serve", ["--port", "--host", "--static-dir", "--rules"]),
            ("convert", ["--output", "--canonicalize", "--in-profile", "--profile"]),
        ],
    )
    def test_help_documents_flags(self, runner, command, flags):
        result = runner.invoke(main, [command, "--help"])
        assert result.exit_code == 0
        for flag in flags:
            assert flag in result.output
