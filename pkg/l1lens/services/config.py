import json
from collections.abc import Mapping
from pathlib import Path

from django.conf import settings

from l1lens.errors import ConfigError
from l1lens.schemas.llm import GenerationConfig


def defaults() -> dict:
    return {
        key.lower(): str(value) if isinstance(value, Path) else value
        for key, value in settings.L1LENS.items()
    }


def effective_config(
    config_file: Path | None = None, flags: Mapping | None = None
) -> dict:
    """Merge settings defaults, a JSON config file and explicit flags.

    Flags whose value is ``None`` were not given and do not override.
    """
    config = defaults()
    if config_file is not None:
        try:
            loaded = json.loads(config_file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_file}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"{config_file}: expected a JSON object")
        unknown = sorted(set(loaded) - set(config))
        if unknown:
            raise ConfigError(
                f"{config_file}: unknown keys {', '.join(unknown)}"
            )
        config.update(loaded)
    for name, value in (flags or {}).items():
        if value is not None:
            config[name] = value
    return config


def generation_config(config: Mapping) -> GenerationConfig:
    return GenerationConfig(
        model_name=config["model"],
        temperature=config["temperature"],
        max_output_tokens=config["max_output_tokens"],
        retries=config["retries"],
        backoff_base_ms=config["backoff_base_ms"],
        endpoint_url=config["endpoint_url"],
        api_key_env=config["api_key_env"],
        timeout_s=config["timeout_s"],
    )
