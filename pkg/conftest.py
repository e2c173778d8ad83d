# conftest.py
# All comments and identifiers in English

import json

import pytest

from create_fixture_corpus import write_fixture

FIXTURE_PATH_FIELDS = (("corpus", "disasterContextPath"), ("corpus", "labelsPath"),
                       ("simulate", "mockScriptPath"), ("annotation", "humanRoundsPath"))


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """The synthetic 25-user corpus with its scripted mock provider."""
    directory = tmp_path_factory.mktemp("fixture")
    write_fixture(str(directory))
    return directory


@pytest.fixture
def fixture_config_path(fixture_dir, tmp_path):
    """The fixture config with absolute inputs and an output directory private to the test."""
    with open(fixture_dir / "config.json", 'r', encoding='utf-8') as f:
        data = json.load(f)
    data["corpus"]["postPaths"] = [str(fixture_dir / p) for p in data["corpus"]["postPaths"]]
    for section, key in FIXTURE_PATH_FIELDS:
        data[section][key] = str(fixture_dir / data[section][key])
    data["outDir"] = str(tmp_path / "run_output")
    path = tmp_path / "config.json"
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2)
    return path
