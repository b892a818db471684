"""
Flat ``key = value`` configuration files.

Nested models are addressed with dotted keys (``schedule.steps = 50``),
``#`` starts a comment and ``none`` stands for an unset optional value.
Parsed files are validated by the matching pydantic model.
"""

from pathlib import Path
from typing import Any
from pydantic import BaseModel, ValidationError
from .cfl import atomic_write_bytes
from ..types import ConfigError

NONE_LITERAL = "none"

def _insert(tree: dict[str, Any], key: str, value: str, line_no: int):
    parts = key.split(".")
    if any(part == "" for part in parts):
        raise ConfigError(f"line {line_no}: malformed key '{key}'")
    node = tree
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"line {line_no}: '{part}' is both a value and a section")
        node = child
    leaf = parts[-1]
    if leaf in node:
        raise ConfigError(f"line {line_no}: duplicate key '{key}'")
    node[leaf] = None if value.lower() == NONE_LITERAL else value

def parse_key_values(text: str) -> dict[str, Any]:
    """
    Nested dict of the raw string values in ``text``.

    Raises:
        ConfigError: On a line without ``=``, an empty or duplicate key.
    """
    tree: dict[str, Any] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got '{line}'")
        key, value = (item.strip() for item in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        _insert(tree, key, value, line_no)
    return tree

def merge_overrides(tree: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """``key=value`` strings from the command line, applied on top of ``tree``."""
    merged = _copy_tree(tree)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override '{item}' is not key=value")
        _remove(merged, key.strip())
        _insert(merged, key.strip(), value.strip(), 0)
    return merged

def _copy_tree(tree: dict[str, Any]) -> dict[str, Any]:
    return {k: _copy_tree(v) if isinstance(v, dict) else v for k, v in tree.items()}

def _remove(tree: dict[str, Any], key: str):
    *sections, leaf = key.split(".")
    node = tree
    for part in sections:
        node = node.get(part)
        if not isinstance(node, dict):
            return
    node.pop(leaf, None)

def build_config[M: BaseModel](model: type[M], tree: dict[str, Any]) -> M:
    """
    Raises:
        ConfigError: Carrying the pydantic validation message.
    """
    try:
        return model.model_validate(tree)
    except ValidationError as e:
        raise ConfigError(str(e)) from e

def load_config[M: BaseModel](path: str | Path,
                              model: type[M],
                              overrides: list[str] | None = None) -> M:
    tree = parse_key_values(Path(path).read_text(encoding="utf-8"))
    return build_config(model, merge_overrides(tree, overrides or []))

def _format(value: Any) -> str:
    match value:
        case None:
            return NONE_LITERAL
        case bool():
            return "true" if value else "false"
        case float():
            return repr(value)
        case tuple() | list():
            return ", ".join(_format(item) for item in value)
        case _:
            return str(value)

def _flatten(data: dict[str, Any], prefix: str = "") -> list[tuple[str, str]]:
    items = []
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            items.extend(_flatten(value, f"{name}."))
        else:
            items.append((name, _format(value)))
    return items

def dump_config(model: BaseModel, comments: dict[str, str] | None = None) -> str:
    """
    Every field of ``model``, defaults included, one ``key = value`` per line.
    ``comments`` become leading ``# key: value`` lines.
    """
    lines = [f"# {key}: {value}" for key, value in (comments or {}).items()]
    lines.extend(f"{key} = {value}" for key, value in _flatten(model.model_dump()))
    return "\n".join(lines) + "\n"

def write_config(path: str | Path, model: BaseModel, comments: dict[str, str] | None = None):
    atomic_write_bytes(Path(path), dump_config(model, comments).encode("utf-8"))

__all__ = [
    "parse_key_values",
    "merge_overrides",
    "build_config",
    "load_config",
    "dump_config",
    "write_config",
]
