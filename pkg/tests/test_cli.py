import json

import pytest

from formeclust.cli import main
from formeclust.synth import write_book


@pytest.fixture(scope="module")
def book_dir(tmp_path_factory, clean_quarto_book):
    out = tmp_path_factory.mktemp("book")
    write_book(clean_quarto_book, out)
    return out


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestClusterCommand:
    def test_writes_outputs_and_succeeds(self, book_dir, tmp_path, capsys):
        out = tmp_path / "run"
        code = run_cli("cluster", "--manifest", book_dir / "manifest.json",
                       "-o", out, "--seed", "17")
        assert code == 0
        for name in ("labels.csv", "distances.csv", "report.json", "quantized.csv"):
            assert (out / name).exists()
        report = json.loads((out / "report.json").read_text())
        assert report["prng"] == "numpy:PCG64"
        assert report["eval"]["v_measure"] == 1.0
        assert report["config"]["seed"] == 17
        assert "100.0" in capsys.readouterr().out

    def test_same_seed_byte_identical_labels(self, book_dir, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli("cluster", "--manifest", book_dir / "manifest.json",
                           "-o", out, "--seed", "3") == 0
            outs.append((out / "labels.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_missing_image_exits_2_naming_page(self, book_dir, tmp_path, capsys):
        broken = tmp_path / "broken"
        import shutil

        shutil.copytree(book_dir, broken)
        (broken / "titles" / "p7.png").unlink()
        code = run_cli("cluster", "--manifest", broken / "manifest.json",
                       "-o", tmp_path / "out")
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["code"] == 2
        assert "page 7" in err["error"]["message"]

    def test_missing_manifest_exits_2(self, tmp_path, capsys):
        assert run_cli("cluster", "--manifest", tmp_path / "nope.json",
                       "-o", tmp_path / "out") == 2
        capsys.readouterr()

    def test_bad_scheme_exits_1(self, book_dir, tmp_path, capsys):
        code = run_cli("cluster", "--manifest", book_dir / "manifest.json",
                       "-o", tmp_path / "out", "--scheme", "nonsense")
        assert code == 1
        capsys.readouterr()

    def test_multi_seed_mean_scores(self, book_dir, tmp_path):
        out = tmp_path / "multi"
        assert run_cli("cluster", "--manifest", book_dir / "manifest.json",
                       "-o", out, "--seed", "0", "--seeds", "3") == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["runs"]) == 3
        assert [r["seed"] for r in report["runs"]] == [0, 1, 2]
        assert report["mean_eval"]["v_measure"] == pytest.approx(1.0)

    def test_eval_of_own_outputs_matches_report(self, book_dir, tmp_path, capsys):
        out = tmp_path / "self"
        assert run_cli("cluster", "--manifest", book_dir / "manifest.json",
                       "-o", out, "--seed", "5") == 0
        report = json.loads((out / "report.json").read_text())
        assert run_cli("eval", "--gold", book_dir / "gold.csv",
                       "--pred", out / "labels.csv",
                       "-o", tmp_path / "eval.json") == 0
        capsys.readouterr()
        scored = json.loads((tmp_path / "eval.json").read_text())
        for key in ("v_measure", "one_to_one", "many_to_one"):
            assert scored[key] == pytest.approx(report["eval"][key])


class TestEvalCommand:
    def test_identical_files_are_perfect(self, book_dir, tmp_path, capsys):
        pred = tmp_path / "pred.csv"
        gold_rows = (book_dir / "gold.csv").read_text().splitlines()
        pred.write_text("unit_id,label\n" + "\n".join(r for r in gold_rows[1:]) + "\n")
        assert run_cli("eval", "--gold", book_dir / "gold.csv", "--pred", pred,
                       "-o", tmp_path / "r.json") == 0
        out = capsys.readouterr().out
        assert out.count("100.0") == 3
        r = json.loads((tmp_path / "r.json").read_text())
        assert (r["v_measure"], r["one_to_one"], r["many_to_one"]) == (1.0, 1.0, 1.0)

    def test_constant_prediction_zero_v(self, book_dir, tmp_path, capsys):
        gold_rows = (book_dir / "gold.csv").read_text().splitlines()[1:]
        pred = tmp_path / "pred.csv"
        pred.write_text("unit_id,label\n" +
                        "\n".join(f"{r.split(',')[0]},0" for r in gold_rows) + "\n")
        assert run_cli("eval", "--gold", book_dir / "gold.csv", "--pred", pred,
                       "-o", tmp_path / "r.json") == 0
        capsys.readouterr()
        assert json.loads((tmp_path / "r.json").read_text())["v_measure"] == 0.0

    def test_tiny_hand_example(self, tmp_path, capsys):
        gold = tmp_path / "gold.csv"
        pred = tmp_path / "pred.csv"
        gold.write_text("unit_id,forme_id\nu1,0\nu2,0\nu3,1\nu4,1\n")
        pred.write_text("unit_id,label\nu1,0\nu2,0\nu3,0\nu4,1\n")
        assert run_cli("eval", "--gold", gold, "--pred", pred,
                       "-o", tmp_path / "r.json") == 0
        capsys.readouterr()
        r = json.loads((tmp_path / "r.json").read_text())
        assert r["v_measure"] == pytest.approx(0.344, abs=5e-4)
        assert r["one_to_one"] == 0.75
        assert r["many_to_one"] == 0.75

    def test_unit_id_mismatch_exits_1(self, tmp_path, capsys):
        gold = tmp_path / "gold.csv"
        pred = tmp_path / "pred.csv"
        gold.write_text("unit_id,forme_id\nu1,0\nu2,1\n")
        pred.write_text("unit_id,label\nu1,0\nuX,1\n")
        assert run_cli("eval", "--gold", gold, "--pred", pred) == 1
        err = json.loads(capsys.readouterr().err)
        assert "unit-id mismatch" in err["error"]["message"]


class TestPlotCommand:
    def test_writes_svg_with_panels(self, book_dir, tmp_path, capsys):
        out = tmp_path / "run"
        assert run_cli("cluster", "--manifest", book_dir / "manifest.json",
                       "-o", out, "--seed", "0") == 0
        svg_path = tmp_path / "stairs.svg"
        assert run_cli("plot", "--manifest", book_dir / "manifest.json",
                       "--labels", out / "labels.csv", "-o", svg_path) == 0
        capsys.readouterr()
        svg = svg_path.read_text()
        n_units = len((book_dir / "gold.csv").read_text().splitlines()) - 1
        assert svg.count("<circle") == 2 * n_units  # predictions + gold panel
        assert 'class="gold"' in svg


class TestMontageCommand:
    def test_grid_dimensions(self, book_dir, tmp_path, capsys):
        from PIL import Image

        png = tmp_path / "m.png"
        assert run_cli("montage", "--manifest", book_dir / "manifest.json",
                       "-o", png) == 0
        capsys.readouterr()
        with Image.open(png) as im:
            w, h = im.size
        n_units = len((book_dir / "gold.csv").read_text().splitlines()) - 1
        assert h == n_units * (32 + 3) + 3  # quarto: rows of 4 titles, 32px tall
        assert w == 4 * (200 + 3) + 3

    def test_all_pages_single_column(self, book_dir, tmp_path, capsys):
        from PIL import Image

        png = tmp_path / "m.png"
        assert run_cli("montage", "--manifest", book_dir / "manifest.json",
                       "--scheme", "all_pages", "-o", png) == 0
        capsys.readouterr()
        with Image.open(png) as im:
            assert im.size[0] == 200 + 2 * 3


class TestSynthCommand:
    def test_generates_book_dir(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "format": "folio", "leaves_per_gathering": 4, "n_gatherings": 4,
            "n_formes": 2, "title_width": 120,
        }))
        out = tmp_path / "gen"
        assert run_cli("synth", "--spec", spec, "--seed", "1", "-o", out) == 0
        capsys.readouterr()
        assert (out / "manifest.json").exists()
        assert len(list((out / "titles").glob("p*.png"))) == 32
        assert (out / "gold.csv").read_text().startswith("unit_id,forme_id")

    def test_invalid_spec_exits_1(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "format": "folio", "leaves_per_gathering": 4, "n_gatherings": 4,
            "n_formes": 2, "noise": {"offset_max_frac": 0.9},
        }))
        assert run_cli("synth", "--spec", spec, "-o", tmp_path / "gen") == 1
        capsys.readouterr()


class TestExitCodes:
    def test_classification(self):
        import numpy as np

        from formeclust import ManifestError
        from formeclust.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, _classify

        assert _classify(ManifestError("bad")) == EXIT_CONFIG
        assert _classify(ValueError("bad")) == EXIT_CONFIG
        assert _classify(FileNotFoundError("gone")) == EXIT_IO
        assert _classify(OSError("page 3: unreadable")) == EXIT_IO
        assert _classify(np.linalg.LinAlgError("no convergence")) == EXIT_NUMERIC

    def test_no_subcommand_is_config_error(self, capsys):
        assert main([]) == 1
        capsys.readouterr()


class TestAblateCommand:
    def test_emits_comparison_csv(self, book_dir, tmp_path, capsys):
        out = tmp_path / "ablation"
        assert run_cli("ablate", "--manifest", book_dir / "manifest.json",
                       "-o", out, "--seed", "0") == 0
        capsys.readouterr()
        lines = (out / "ablation.csv").read_text().splitlines()
        assert lines[0] == "scheme,v_measure,one_to_one,many_to_one"
        assert [ln.split(",")[0] for ln in lines[1:]] == [
            "all_pages", "recto_pages", "sheet_sides"
        ]
        # zero-noise book: sheet sides are perfect
        assert lines[3].split(",")[1] == "100.0"
        doc = json.loads((out / "ablation.json").read_text())
        assert doc["schemes"]["sheet_sides"]["v_measure"] == pytest.approx(1.0)
