"""
Tests for SignConvention and its JSON persistence.
"""

import json

import pytest

from src.algebra.conventions import (
    DEFAULT_CONVENTION,
    SCHEMA_VERSION,
    SignConvention,
    load_convention,
    save_convention,
)
from src.errors import ConfigError


class TestSignConvention:
    """Test cases for SignConvention."""

    def test_defaults(self):
        """Test the hand-derived default choices."""
        assert DEFAULT_CONVENTION.choices() == {
            "su2_prefactor": "i/2",
            "pencil_sign": 1,
            "dressing_sign": -1,
            "sdym_map": "standard",
        }
        assert DEFAULT_CONVENTION.prefactor == 0.5j

    def test_other_prefactor(self):
        """Test the 1/(2i) prefactor value."""
        assert SignConvention(su2_prefactor="1/(2i)").prefactor == -0.5j

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"su2_prefactor": "2i"},
            {"pencil_sign": 0},
            {"dressing_sign": 2},
            {"sdym_map": "mirror"},
        ],
    )
    def test_invalid_choices(self, kwargs):
        """Test that every field is validated."""
        with pytest.raises(ConfigError):
            SignConvention(**kwargs)

    def test_with_provenance(self):
        """Test that provenance changes leave the choices alone."""
        tagged = DEFAULT_CONVENTION.with_provenance("unit test")
        assert tagged.provenance == "unit test"
        assert tagged.choices() == DEFAULT_CONVENTION.choices()


class TestPersistence:
    """Test cases for save_convention / load_convention."""

    def test_save_and_load(self, tmp_path):
        """Test that a saved convention loads back unchanged."""
        convention = SignConvention(pencil_sign=-1, sdym_map="conjugate", provenance="test")
        path = save_convention(convention, tmp_path / "nested" / "convention.json")
        assert path.exists()
        assert load_convention(path) == convention

    def test_document_layout(self, tmp_path):
        """Test the JSON keys written to disk."""
        path = save_convention(DEFAULT_CONVENTION, tmp_path / "c.json")
        data = json.loads(path.read_text())
        assert data["schemaVersion"] == SCHEMA_VERSION
        assert data["su2_prefactor"] == "i/2"
        assert data["provenance"] == DEFAULT_CONVENTION.provenance

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigError."""
        with pytest.raises(ConfigError):
            load_convention(tmp_path / "absent.json")

    def test_not_an_object(self, tmp_path):
        """Test that a JSON list is rejected."""
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_convention(path)

    def test_unknown_schema_version(self, tmp_path):
        """Test that a future schema version is rejected."""
        path = tmp_path / "future.json"
        path.write_text(json.dumps({"schemaVersion": SCHEMA_VERSION + 1}))
        with pytest.raises(ConfigError):
            load_convention(path)

    def test_unknown_keys(self):
        """Test that unknown keys are rejected."""
        with pytest.raises(ConfigError):
            SignConvention.from_dict({"su2_prefactor": "i/2", "colour": "blue"})
