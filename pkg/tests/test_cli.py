import json

import pytest

from kpdixmier.cache import ResultCache
from kpdixmier.cli import EXIT_INVALID, EXIT_OK, InputError, main, parse_catalog
from kpdixmier.config import CACHE_ENV, Config


@pytest.fixture(autouse=True)
def no_cache(monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)


def test_orbits_list(capsys):
    assert main(["orbits", "list", "--group", "sp", "--n", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[2, 2]" in out or "2,2" in out


def test_verify_kp_passes(tmp_path):
    out = tmp_path / "r.json"
    rc = main(["verify", "kp", "--group", "GL", "--n", "2", "--partition", "2", "--dmax", "2",
               "--json", str(out), "--stable"])
    assert rc == EXIT_OK
    data = json.loads(out.read_text())
    assert data["passed"] is True
    assert [r["quotient"] for r in data["rows"]] == [1, 3, 5]
    assert "timing" not in data


def test_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["hilbert", "--group", "O", "--n", "3", "--partition", "3", "--dmax", "2",
                 "--csv", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 4


@pytest.mark.parametrize("argv", [
    ["verify", "kp", "--group", "Sp", "--n", "4", "--partition", "3,1"],
    ["verify", "kp", "--group", "O", "--n", "4", "--partition", "2,1,1"],
    ["verify", "kp", "--group", "GL", "--n", "3", "--partition", "1,2"],
    ["verify", "kp", "--group", "XX", "--n", "3", "--partition", "3"],
    ["verify", "kp", "--group", "GL", "--n", "3", "--partition", "3", "--dmax", "-1"],
    ["form", "--group", "GL", "--n", "2", "--partition", "2", "--d", "-1"],
    ["verify", "kp", "--group", "GL", "--n", "2"],
    ["casimir", "--group", "GL", "--n", "2", "--partition", "a"],
])
def test_invalid_input_exit_code(argv, capsys):
    assert main(argv) == EXIT_INVALID
    assert "error" in capsys.readouterr().err


def test_unknown_option_is_invalid():
    assert main(["nonsense"]) == EXIT_INVALID


def test_empty_catalog(tmp_path, capsys):
    cat = tmp_path / "empty.txt"
    cat.write_text("# nothing here\n\n")
    assert main(["batch", str(cat)]) == EXIT_OK


def test_bad_catalog_line_cites_line(tmp_path, capsys):
    cat = tmp_path / "bad.txt"
    cat.write_text("GL 2 2 kp=2\nSp 3 2,1\n")
    assert main(["batch", str(cat)]) == EXIT_INVALID
    assert "line 2" in capsys.readouterr().err


def test_parse_catalog_options():
    rows = parse_catalog("GL 2 2 kp=2 dixmier=1\nO 3 3 dmax=1  # comment\n")
    assert rows == [("GL", 2, (2,), 2, 1), ("O", 3, (3,), 1, 1)]
    with pytest.raises(InputError):
        parse_catalog("GL 2 2 foo=1")


def test_config_roundtrip(tmp_path):
    c = Config(dmax_small=2, sample_seed=5, cache_dir="/tmp/x")
    assert Config.loads(c.dumps()) == c
    with pytest.raises(ValueError):
        Config.loads("bogus = 1")
    path = tmp_path / "c.cfg"
    path.write_text("sample_seed = 9\n")
    assert Config.load(str(path)).sample_seed == 9


def test_warm_cache_matches_cold(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    cat = tmp_path / "cat.txt"
    cat.write_text("GL 2 2 kp=2 dixmier=2\nO 3 3 kp=2 dixmier=1\n")
    cold, warm = tmp_path / "cold.json", tmp_path / "warm.json"
    assert main(["batch", str(cat), "--json", str(cold), "--stable"]) == EXIT_OK
    assert any((tmp_path / "cache").rglob("*.json"))
    assert main(["batch", str(cat), "--json", str(warm), "--stable"]) == EXIT_OK
    assert cold.read_bytes() == warm.read_bytes()


def test_cache_hits(tmp_path):
    cache = ResultCache(str(tmp_path))
    calls = []
    f = lambda: calls.append(1) or {"v": 1}
    assert cache.get_or_compute("GL(2)[2]", "m", 1, {}, {"c": 1}, f) == {"v": 1}
    assert cache.get_or_compute("GL(2)[2]", "m", 1, {}, {"c": 1}, f) == {"v": 1}
    assert (cache.hits, cache.misses, len(calls)) == (1, 1, 1)
    # a change of conventions misses
    cache.get_or_compute("GL(2)[2]", "m", 1, {}, {"c": 2}, f)
    assert len(calls) == 2



def test_shipped_catalog_is_the_desk_catalog():
    from pathlib import Path
    from kpdixmier.cli import DESK_CATALOG
    text = (Path(__file__).resolve().parents[1] / "catalogs" / "desk.txt").read_text()
    assert parse_catalog(text) == list(DESK_CATALOG)
