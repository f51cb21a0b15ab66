import pytest

from src.config_loader import RunConfig, config_from_dict, load_config


def test_defaults_when_file_missing(tmp_path):
    config = load_config(str(tmp_path / "missing.yaml"))
    assert config.precision.bits == 128
    assert config.bounds.modular_level == 10
    assert config.run.format == "json"


def test_yaml_overrides(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "precision:\n  bits: 256\ntolerances:\n  membership: 1e-12\nlll:\n  delta: 0.75\n",
        encoding="utf-8",
    )
    config = load_config(str(path))
    assert config.precision.bits == 256
    assert config.tolerances.membership == 1e-12
    assert config.lll.delta == 0.75
    assert config.bounds.max_order == 200


def test_invalid_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("lll:\n  delta: 1.5\n", encoding="utf-8")
    assert load_config(str(path)).lll.delta == 0.99


@pytest.mark.parametrize(
    "data",
    [
        {"precision": {"bits": 32}},
        {"tolerances": {"relation": 0}},
        {"bounds": {"max_order": -1}},
        {"run": {"format": "xml"}},
    ],
)
def test_validation_rejects(data):
    with pytest.raises(ValueError):
        config_from_dict(data)


def test_digits_follow_precision():
    config = RunConfig()
    assert config.digits == 38
    config.precision.bits = 53
    assert config.digits == 15
