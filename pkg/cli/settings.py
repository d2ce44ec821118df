import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from preprocessor import Config
from preprocessor.errors import ConfigError

logger = logging.getLogger(__name__)

SETTINGS_FILE = Path.home() / ".tropism_preprocessor" / "settings.json"


def default_settings() -> Dict[str, Any]:
    settings = Config().to_dict()
    settings["format"] = "text"
    return settings


def load_settings(path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Defaults merged with the JSON settings file, if there is one.

    A file that cannot be read or parsed is logged and ignored.
    """
    settings = default_settings()
    settings_file = Path(path) if path else SETTINGS_FILE
    if settings_file.exists():
        try:
            with open(settings_file, "r", encoding="utf-8") as f:
                loaded = json.load(f)
            if not isinstance(loaded, dict):
                raise ValueError("top level is not an object")
            settings.update(loaded)
        except (OSError, ValueError) as ex:
            logger.warning("error loading settings from %s: %s", settings_file, ex)
    return settings


def save_settings(settings: Dict[str, Any], path: Optional[Path] = None) -> Path:
    settings_file = Path(path) if path else SETTINGS_FILE
    os.makedirs(settings_file.parent, exist_ok=True)
    with open(settings_file, "w", encoding="utf-8") as f:
        json.dump(settings, f, indent=2)
    logger.info("settings saved to %s", settings_file)
    return settings_file


def config_from_settings(settings: Dict[str, Any]) -> Config:
    """The Config part of a settings dictionary; other keys are ignored."""
    try:
        return Config.from_dict(settings)
    except TypeError as ex:
        raise ConfigError(f"invalid settings: {ex}") from ex
