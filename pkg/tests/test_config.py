import logging

from mqsptool.config_generator import create_blank_config, generate_configuration_from_cli, save_config
from mqsptool.config_loader import load_config_file, merge_config
from mqsptool.validate_inputs import parse_complex, validate_inputs


def _config(**overrides):
    config = create_blank_config()
    config.update(overrides)
    return config


def test_blank_config_defaults():
    config = create_blank_config()
    assert config["BACKEND"] == "auto"
    assert config["SEARCH"]["GRID_N"] is None
    assert config["TOLERANCES"]["UNITARY"] == 1e-8
    assert config["TOLERANCES"]["SEARCH_CORNER"] == 1e-4


def test_cli_options_overlay_the_base():
    options = {"seed": 9, "in_path": "poly.json", "tol": 1e-6, "da": 3, "alpha0": "2-1i", "backend": None}
    config = generate_configuration_from_cli(options, tol_key="CORNER")
    assert config["RANDOM_SEED"] == 9
    assert config["FILE_PATHS"]["INPUT"] == "poly.json"
    assert config["TOLERANCES"]["CORNER"] == 1e-6
    assert config["TOLERANCES"]["UNITARY"] == 1e-8
    assert config["SEARCH"]["DA"] == 3
    assert config["FAMILY"]["ALPHA0"] == "2-1i"
    assert config["BACKEND"] == "auto"


def test_generator_leaves_the_base_untouched():
    base = create_blank_config()
    generate_configuration_from_cli({"seed": 1}, base)
    assert base["RANDOM_SEED"] == 0


def test_save_and_load_round_trip(tmp_path):
    config = generate_configuration_from_cli({"seed": 4, "samples": 12})
    path = save_config(config, str(tmp_path / "run"))
    assert path.endswith(".yml")
    loaded = load_config_file(path, print)
    assert merge_config(create_blank_config(), loaded) == config


def test_load_reports_bad_files(tmp_path):
    messages = []
    assert load_config_file(str(tmp_path / "missing.yml"), messages.append) is None
    broken = tmp_path / "broken.yml"
    broken.write_text("SEARCH: [unclosed\n", encoding="utf-8")
    assert load_config_file(str(broken), messages.append) is None
    listing = tmp_path / "list.yml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    assert load_config_file(str(listing), messages.append) is None
    assert len(messages) == 3 and all(message.startswith("ERROR") for message in messages)

    empty = tmp_path / "empty.yml"
    empty.write_text("", encoding="utf-8")
    assert load_config_file(str(empty), messages.append) == {}


def test_merge_keeps_sections_and_warns_on_unknown_keys(caplog):
    base = create_blank_config()
    logger = logging.getLogger("mqsp_logger")
    logger.addHandler(caplog.handler)  # the command line turns propagation off
    try:
        with caplog.at_level(logging.WARNING, logger="mqsp_logger"):
            merged = merge_config(base, {"SEARCH": {"DA": 4}, "COLOUR": "red"})
    finally:
        logger.removeHandler(caplog.handler)
    assert merged["SEARCH"]["DA"] == 4
    assert merged["SEARCH"]["DB"] == 2
    assert merged["COLOUR"] == "red"
    assert "COLOUR" in caplog.text


def test_validation_needs_an_input_document(tmp_path):
    messages = []
    assert not validate_inputs(_config(), "certify", messages.append)
    assert "--in" in messages[-1]

    config = _config()
    config["FILE_PATHS"]["INPUT"] = str(tmp_path / "absent.json")
    assert not validate_inputs(config, "decomp-uni", messages.append)

    present = tmp_path / "present.json"
    present.write_text("{}", encoding="utf-8")
    config["FILE_PATHS"]["INPUT"] = str(present)
    assert validate_inputs(config, "decomp-uni", messages.append)


def test_validation_rejects_bad_settings(tmp_path):
    messages = []
    assert not validate_inputs(_config(BACKEND="symbolic"), "verify-f22", messages.append)
    assert not validate_inputs(_config(RUN_ID=""), "verify-f22", messages.append)
    assert not validate_inputs(_config(WORKERS=0), "verify-f22", messages.append)

    config = _config()
    config["TOLERANCES"]["CORNER"] = 0
    assert not validate_inputs(config, "verify-f22", messages.append)

    config = _config()
    config["FILE_PATHS"]["OUTPUT_DIR"] = str(tmp_path / "nowhere")
    assert not validate_inputs(config, "verify-f22", messages.append)
    assert len(messages) == 5


def test_validation_of_search_and_family_settings():
    messages = []
    assert validate_inputs(_config(), "search", messages.append)
    assert not validate_inputs(_config(SAMPLES=0), "survey", messages.append)

    config = _config()
    config["SEARCH"]["GRID_N"] = 1
    assert not validate_inputs(config, "search", messages.append)

    config = _config()
    config["FAMILY"]["ALPHA0"] = "0"
    assert not validate_inputs(config, "solve-family", messages.append)
    config["FAMILY"]["ALPHA0"] = "one"
    assert not validate_inputs(config, "solve-family", messages.append)


def test_parse_complex():
    assert parse_complex("1+1i") == 1 + 1j
    assert parse_complex("2 - 3i") == 2 - 3j
    assert parse_complex(0.5) == 0.5
