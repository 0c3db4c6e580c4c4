"""Application settings kept in an INI file with a single [Settings] section."""
from __future__ import annotations

import configparser
import logging
import pathlib
from dataclasses import dataclass
from typing import Mapping, Optional

from configupdater import ConfigUpdater

from normlift.errors import SettingsError

logger = logging.getLogger(__name__)

SETTINGS_SECTION = "Settings"
SETTINGS_FILE = "normlift.ini"

DEFAULTS = {
    "series_order": "64",
    "precision": "8",
    "guard_digits": "auto",
    "output_format": "json",
    "log_level": "WARNING",
    "workers": "1",
    "seed": "0",
}

OUTPUT_FORMATS = ("json", "human")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    series_order: int = 64
    precision: int = 8
    guard_digits: Optional[int] = None  # None: derived from p, e and the series order
    output_format: str = "json"
    log_level: str = "WARNING"
    workers: int = 1
    seed: int = 0


def default_settings_path() -> pathlib.Path:
    return pathlib.Path.cwd() / SETTINGS_FILE


def _get_int(parser: configparser.ConfigParser, key: str, minimum: int) -> int:
    try:
        value = parser.getint(SETTINGS_SECTION, key)
    except ValueError:
        raise SettingsError(f"{key} must be an integer, got {parser.get(SETTINGS_SECTION, key)!r}") from None
    if value < minimum:
        raise SettingsError(f"{key} must be at least {minimum}, got {value}")
    return value


def _parse(parser: configparser.ConfigParser) -> Settings:
    guard_raw = parser.get(SETTINGS_SECTION, "guard_digits").strip().lower()
    guard = None if guard_raw == "auto" else _get_int(parser, "guard_digits", 0)
    output_format = parser.get(SETTINGS_SECTION, "output_format").strip().lower()
    if output_format not in OUTPUT_FORMATS:
        raise SettingsError(f"output_format must be one of {', '.join(OUTPUT_FORMATS)}, got {output_format!r}")
    log_level = parser.get(SETTINGS_SECTION, "log_level").strip().upper()
    if log_level not in LOG_LEVELS:
        raise SettingsError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}")
    return Settings(
        series_order=_get_int(parser, "series_order", 2),
        precision=_get_int(parser, "precision", 1),
        guard_digits=guard,
        output_format=output_format,
        log_level=log_level,
        workers=_get_int(parser, "workers", 0),
        seed=_get_int(parser, "seed", 0),
    )


def _save(parser: configparser.ConfigParser, path: pathlib.Path, missing: Mapping[str, str]) -> None:
    """Write a new file, or append the missing keys to an existing one keeping its comments."""
    try:
        if not path.exists():
            with open(path, "w") as f:
                parser.write(f)
            return
        updater = ConfigUpdater()
        updater.read(path, encoding="utf-8")
        if not updater.has_section(SETTINGS_SECTION):
            updater.add_section(SETTINGS_SECTION)
        for key, value in missing.items():
            updater.set(SETTINGS_SECTION, key, value)
        updater.update_file()
    except OSError as e:
        logger.warning("Could not save settings: %s", e)


def load_settings(path: pathlib.Path | str | None = None) -> Settings:
    """Read the settings file, creating it or completing missing keys with defaults."""
    path = default_settings_path() if path is None else pathlib.Path(path)
    parser = configparser.ConfigParser()
    if path.exists():
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as e:
            raise SettingsError(f"Error parsing settings file {path}: {e}") from None

    if not parser.has_section(SETTINGS_SECTION):
        parser.add_section(SETTINGS_SECTION)
    missing = {}
    for key, value in DEFAULTS.items():
        if not parser.has_option(SETTINGS_SECTION, key):
            parser.set(SETTINGS_SECTION, key, value)
            missing[key] = value
    if missing:
        logger.debug("writing default settings to %s", path)
        _save(parser, path, missing)
    return _parse(parser)


def update_settings(path: pathlib.Path | str, changes: Mapping[str, str]) -> Settings:
    """Change keys in place, keeping comments and key order of the file."""
    path = pathlib.Path(path)
    unknown = [key for key in changes if key not in DEFAULTS]
    if unknown:
        raise SettingsError(f"unknown setting(s): {', '.join(unknown)}")
    load_settings(path)

    # Validate the merged values before touching the file.
    check = configparser.ConfigParser()
    check.read(path, encoding="utf-8")
    for key, value in changes.items():
        check.set(SETTINGS_SECTION, key, str(value))
    settings = _parse(check)

    updater = ConfigUpdater()
    try:
        updater.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise SettingsError(f"Error parsing settings file {path}: {e}") from None
    for key, value in changes.items():
        updater.set(SETTINGS_SECTION, key, str(value))
    updater.update_file()
    return settings


def settings_items(path: pathlib.Path | str) -> list[tuple[str, str]]:
    """Raw key/value pairs of the [Settings] section, in file order."""
    updater = ConfigUpdater()
    updater.read(pathlib.Path(path), encoding="utf-8")
    return [(key, option.value) for key, option in updater.items(SETTINGS_SECTION)]
