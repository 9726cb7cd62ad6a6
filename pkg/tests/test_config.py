import os

import pytest

import config
from config import RunConfig, load_run_config, parse_int_range, require_thread_cap
from errors import ConfigurationError


class TestThreadCap:

    def test_default(self, monkeypatch):
        monkeypatch.setattr(config, "CFC_LAB_THREADS", None)
        assert require_thread_cap() == (os.cpu_count() or 1)

    def test_explicit(self, monkeypatch):
        monkeypatch.setattr(config, "CFC_LAB_THREADS", "3")
        assert require_thread_cap() == 3

    @pytest.mark.parametrize("value", ["0", "-2", "many"])
    def test_invalid(self, monkeypatch, value):
        monkeypatch.setattr(config, "CFC_LAB_THREADS", value)
        with pytest.raises(ConfigurationError):
            require_thread_cap()


@pytest.mark.parametrize("text, expected", [
    ("5,10,20", (5, 10, 20)),
    ("2..5", (2, 3, 4, 5)),
    ("2..10:4", (2, 6, 10)),
    ("8,2..3,8", (2, 3, 8)),
])
def test_parse_int_range(text, expected):
    assert parse_int_range(text) == expected


@pytest.mark.parametrize("text", ["", "a..b", "2..", ","])
def test_parse_int_range_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_int_range(text)


class TestRunConfig:

    def test_defaults(self):
        settings = RunConfig()
        assert settings.output_format == "table"
        assert settings.grid is None
        assert settings.epsilon == 0.05
        assert settings.full.mode == "sum"
        assert settings.classical.length == 10_000

    def test_grid_list(self):
        assert RunConfig(grid=[1e-2, 5e-3]).grid == (1e-2, 5e-3)

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("output_format: csv\nseed: 4\nfull:\n  n_outer: 5\n  m_inner: 7\n", encoding="utf-8")
        settings = load_run_config(path, command="full", command_overrides={"m_inner": 9, "mode": None}, seed=None)
        assert settings.output_format == "csv"
        assert settings.seed == 4
        assert (settings.full.n_outer, settings.full.m_inner, settings.full.mode) == (5, 9, "sum")

    @pytest.mark.parametrize("document", ["- 1\n- 2\n", "reduced: [1]\n", "reduced:\n  colour: red\n", "a: [\n"])
    def test_bad_files(self, tmp_path, document):
        path = tmp_path / "run.yaml"
        path.write_text(document, encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_run_config(path, command="reduced")
