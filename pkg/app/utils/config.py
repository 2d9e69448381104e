"""
Configuration Management
========================

This module provides the configuration system shared by the library and the CLI:
1. Loads configuration from YAML/JSON files
2. Integrates with environment variables (SINGINT_*)
3. Validates the merged result against schemas/config_schema.json
4. Provides a singleton pattern for global access
5. Supports configuration persistence

The system prioritizes configuration sources in this order:
1. Environment variables (highest priority)
2. YAML configuration file
3. JSON configuration file
4. Default values (lowest priority)
"""

import copy
import json
import os
import sys
from pathlib import Path

import jsonschema
import yaml
from dotenv import load_dotenv

APP_DIR = Path(__file__).parent.parent
SCHEMA_DIR = APP_DIR.parent / "schemas"

DEFAULTS = {
    "app": {"title": "singint", "version": "1.0.0"},
    "logging": {
        "directory": "logs",
        "to_file": True,
        "console_level": "WARNING",
        "raw_payloads": False,
    },
    "search": {"max_depth": 8, "max_term_witnesses": 2, "max_geo_instantiations": 24},
    "interpolation": {
        "case33_form": "implicative",
        "conjunct_order": "atoms_first",
        "partition_cap": 64,
    },
    "selftest": {"seed": 0, "random_derivations": 25, "max_height": 4},
}

# variable -> (section, key, converter)
ENV_OVERRIDES = {
    "SINGINT_LOG_DIR": ("logging", "directory", str),
    "SINGINT_LOG_TO_FILE": ("logging", "to_file", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "SINGINT_CONSOLE_LEVEL": ("logging", "console_level", lambda v: v.strip().upper()),
    "SINGINT_SEARCH_DEPTH": ("search", "max_depth", int),
    "SINGINT_CASE33_FORM": ("interpolation", "case33_form", str),
    "SINGINT_PARTITION_CAP": ("interpolation", "partition_cap", int),
}


def _warn(message):
    print(message, file=sys.stderr)


class Config:
    """
    Singleton configuration manager.

    The configuration is loaded once at first access; tests that change
    the environment call reload().
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls)
            cls._instance._load_config()
        return cls._instance

    def _load_config(self):
        """
        Load and merge configuration from every source.

        1. Loads environment variables from a .env file
        2. Loads config.yaml, falling back to config.json
        3. Fills missing sections and keys from DEFAULTS
        4. Applies SINGINT_* environment overrides
        5. Validates; an invalid configuration is replaced by DEFAULTS
        """
        load_dotenv()

        yaml_config_path = APP_DIR / "config.yaml"
        json_config_path = APP_DIR / "config.json"

        self.config = {}

        if yaml_config_path.exists():
            try:
                with open(yaml_config_path, 'r', encoding='utf-8') as file:
                    self.config = yaml.safe_load(file) or {}
            except Exception as e:
                _warn(f"Error loading YAML config: {str(e)}")

        if not self.config and json_config_path.exists():
            try:
                with open(json_config_path, 'r', encoding='utf-8') as file:
                    self.config = json.load(file)
            except Exception as e:
                _warn(f"Error loading JSON config: {str(e)}")

        if not isinstance(self.config, dict):
            _warn("Warning: configuration is not a mapping. Using defaults.")
            self.config = {}

        for section, values in DEFAULTS.items():
            self.config.setdefault(section, {})
            if not isinstance(self.config[section], dict):
                self.config[section] = {}
            for key, value in values.items():
                self.config[section].setdefault(key, value)

        for variable, (section, key, convert) in ENV_OVERRIDES.items():
            raw = os.environ.get(variable)
            if raw is None:
                continue
            try:
                self.config[section][key] = convert(raw)
            except ValueError:
                _warn(f"Ignoring {variable}={raw!r}: not a valid value for {section}.{key}")

        self.validation_error = None
        try:
            jsonschema.validate(self.config, self.schema())
        except jsonschema.ValidationError as e:
            path = ".".join(str(p) for p in e.absolute_path) or "<root>"
            self.validation_error = f"{path}: {e.message}"
            _warn(f"Invalid configuration ({self.validation_error}). Using defaults.")
            self.config = copy.deepcopy(DEFAULTS)

    @staticmethod
    def schema():
        with open(SCHEMA_DIR / "config_schema.json", 'r', encoding='utf-8') as file:
            return json.load(file)["schema"]

    def reload(self):
        self._load_config()
        return self

    def get(self, section, key=None, default=None):
        """
        Retrieve a configuration value.

        Args:
            section: The configuration section (e.g., 'search', 'interpolation')
            key: The specific configuration key within the section
            default: Default value to return if the key is not found
        """
        if key is None:
            return self.config.get(section, default)
        return self.config.get(section, {}).get(key, default)

    def save(self):
        """
        Persist the current configuration to config.yaml.

        Returns:
            bool: True if the save was successful, False otherwise
        """
        yaml_config_path = APP_DIR / "config.yaml"

        try:
            with open(yaml_config_path, 'w', encoding='utf-8') as file:
                yaml.dump(self.config, file, default_flow_style=False, sort_keys=False)
            return True
        except Exception as e:
            _warn(f"Error saving configuration: {str(e)}")
            return False
