"""Run manifests written next to every command output.

Keys are sorted and nothing time-dependent is recorded, so re-running a
command with the same inputs rewrites the manifest byte for byte.
"""

import hashlib
import json
from collections.abc import Mapping
from pathlib import Path

MANIFEST_SUFFIX = ".manifest.json"


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def _plain(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    return value


def build_manifest(
    command: str,
    options: Mapping,
    inputs: Mapping[str, Path | None],
    config: Mapping,
    seeds: Mapping[str, int] | None = None,
    prompt_version: str | None = None,
    lexicon_digest: str | None = None,
) -> dict:
    return _plain(
        {
            "command": command,
            "options": dict(options),
            "inputs": {
                name: {"path": str(path), "sha256": file_digest(path)}
                for name, path in inputs.items()
                if path is not None and Path(path).is_file()
            },
            "seeds": dict(seeds or {}),
            "prompt_version": prompt_version,
            "lexicon_digest": lexicon_digest,
            "config": dict(config),
        }
    )


def write_manifest(output: Path, manifest: dict) -> Path:
    path = manifest_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False)
        + "\n",
        encoding="utf-8",
    )
    return path
