"""Shared fixtures: small grids, sampled scenarios and an isolated environment."""

import os
from unittest.mock import patch

import pytest
from loguru import logger

from src.fields.grid import Grid
from src.fields.scenarios import sample_scenario


@pytest.fixture(autouse=True)
def isolated_environment():
    """Hide GCME_* variables of the developer's shell from every test."""
    clean = {k: v for k, v in os.environ.items() if not k.startswith("GCME_")}
    with patch.dict(os.environ, clean, clear=True):
        yield


@pytest.fixture
def caplog_loguru(caplog):
    """Route loguru records into pytest's caplog."""
    handler_id = logger.add(caplog.handler, format="{message}", level="DEBUG")
    yield caplog
    logger.remove(handler_id)


@pytest.fixture
def grid2():
    return Grid.uniform(2, 9, 0.1)


@pytest.fixture
def grid3():
    return Grid.uniform(3, 8, 0.1)


@pytest.fixture
def pure_gauge3(grid3):
    """Flat non-abelian connection on the 3D grid, with its frame."""
    return sample_scenario("pure_gauge", grid3)


@pytest.fixture
def random3(grid3):
    """Generically non-flat smooth connection on the 3D grid."""
    return sample_scenario("random_smooth(seed=42, amplitude=1, bandwidth=2)", grid3).connection


@pytest.fixture
def random3_matrices(random3):
    mats = random3.matrices()
    return mats["x"], mats["y"], mats["t"]


@pytest.fixture
def ini_file(tmp_path):
    """Write an INI file from a dict of sections and return its path."""

    def write(sections, name="run.ini"):
        lines = []
        for section, values in sections.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in values.items())
            lines.append("")
        path = tmp_path / name
        path.write_text("\n".join(lines), encoding="utf-8")
        return path

    return write
