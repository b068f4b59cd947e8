"""Experiment configuration: INI sections (or one JSON object) validated into pydantic models."""
from __future__ import annotations

import configparser
import json
import re
from pathlib import Path
from typing import Any, Dict, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.feedforward.budget import default_loss_components
from app.feedforward.models import LossComponent, SwitchModel, TimingBudget
from app.montecarlo.sweep import SweepSpec
from app.source.model import SourceModel
from app.utils.exceptions import ConfigError
from app.utils.settings import SETTINGS

SECTIONS = ("source", "switch", "timing", "sweep", "loss", "output")

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    source: SourceModel = Field(default_factory=SourceModel)
    switch: SwitchModel = Field(default_factory=SwitchModel)
    timing: TimingBudget = Field(default_factory=TimingBudget)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    loss: list[LossComponent] = Field(default_factory=default_loss_components)
    output_dir: Path = Field(default_factory=lambda: Path(SETTINGS.default_output_dir))


class _LineIndex:
    """Where each section and key sits in the source text, for diagnostics."""

    def __init__(self, text: str, json_mode: bool = False):
        self._lines = text.splitlines()
        self._json = json_mode
        self._keys: Dict[tuple[str, str], int] = {}
        self._sections: Dict[str, int] = {}
        if not json_mode:
            section = None
            for number, line in enumerate(self._lines, start=1):
                match = _SECTION_RE.match(line)
                if match:
                    section = match.group(1).strip().lower()
                    self._sections.setdefault(section, number)
                    continue
                match = _KEY_RE.match(line)
                if match and section is not None:
                    self._keys.setdefault((section, match.group(1).strip().lower()), number)

    def key(self, section: str, key: str) -> Optional[int]:
        if not self._json:
            return self._keys.get((section, key.lower()))
        section_line = self.section(section) or 1
        pattern = re.compile(rf'"{re.escape(key)}"\s*:')
        for number, line in enumerate(self._lines[section_line - 1:], start=section_line):
            if pattern.search(line):
                return number
        return None

    def section(self, section: str) -> Optional[int]:
        if not self._json:
            return self._sections.get(section)
        pattern = re.compile(rf'"{re.escape(section)}"\s*:')
        for number, line in enumerate(self._lines, start=1):
            if pattern.search(line):
                return number
        return None


def _validate(model: Type[BaseModel], section: str, data: Dict[str, Any], index: _LineIndex, **extra) -> BaseModel:
    try:
        return model(**data, **extra)
    except ValidationError as e:
        error = e.errors()[0]
        key = str(error["loc"][0]) if error.get("loc") else None
        line = index.key(section, key) if key else index.section(section)
        if error["type"] == "extra_forbidden":
            raise ConfigError(f"unknown key '{key}' in [{section}]", line=line, key=key) from e
        where = f"'{key}' in [{section}]" if key else f"[{section}]"
        raise ConfigError(f"invalid value for {where}: {error['msg']}", line=line, key=key) from e


def _build(sections: Dict[str, Dict[str, Any]], index: _LineIndex) -> ExperimentConfig:
    for name in sections:
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]", line=index.section(name), key=name)
    source = _validate(SourceModel, "source", sections.get("source", {}), index)
    switch = _validate(SwitchModel, "switch", sections.get("switch", {}), index)
    timing = _validate(TimingBudget, "timing", sections.get("timing", {}), index)
    sweep_data = dict(sections.get("sweep", {}))
    if "source" in sweep_data:
        raise ConfigError("the source belongs in [source], not [sweep]", line=index.key("sweep", "source"), key="source")
    sweep = _validate(SweepSpec, "sweep", sweep_data, index, source=source)
    loss = default_loss_components()
    if "loss" in sections:
        loss = []
        for name, value in sections["loss"].items():
            try:
                loss.append(LossComponent(name=name, db=value))
            except ValidationError as e:
                raise ConfigError(
                    f"invalid loss '{name}' in [loss]: {e.errors()[0]['msg']}", line=index.key("loss", name), key=name
                ) from e
    output = dict(sections.get("output", {}))
    output_dir = output.pop("output_dir", SETTINGS.default_output_dir)
    if output:
        key = next(iter(output))
        raise ConfigError(f"unknown key '{key}' in [output]", line=index.key("output", key), key=key)
    return ExperimentConfig(source=source, switch=switch, timing=timing, sweep=sweep, loss=loss, output_dir=Path(output_dir))


def _parse_ini(text: str) -> Dict[str, Dict[str, Any]]:
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"key outside any section: {e.line.strip()!r}", line=e.lineno) from e
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as e:
        raise ConfigError(e.message.splitlines()[0], line=e.lineno) from e
    except configparser.ParsingError as e:
        line, content = e.errors[0]
        raise ConfigError(f"cannot parse {content.strip()!r}", line=line) from e
    return {name.strip().lower(): dict(parser.items(name)) for name in parser.sections()}


def _parse_json(text: str) -> Dict[str, Dict[str, Any]]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e
    if not isinstance(payload, dict):
        raise ConfigError("JSON config must be an object of sections", line=1)
    sections = {}
    for name, body in payload.items():
        if name == "output_dir":
            sections.setdefault("output", {})["output_dir"] = body
        elif not isinstance(body, dict):
            raise ConfigError(f"section '{name}' must be an object")
        else:
            sections[name] = body
    return sections


def load_config_text(text: str, config_format: str = "ini") -> ExperimentConfig:
    config_format = config_format.lower()
    if config_format == "json":
        return _build(_parse_json(text), _LineIndex(text, json_mode=True))
    if config_format == "ini":
        return _build(_parse_ini(text), _LineIndex(text))
    raise ConfigError(f"unknown config format {config_format!r}")


def load_config(path: Optional[Path | str], config_format: Optional[str] = None) -> ExperimentConfig:
    """
    Read and validate an experiment config.

    Args:
        path: config file; None yields the defaults
        config_format: 'ini' or 'json'; inferred from a .json suffix when omitted

    Raises:
        ConfigError: with the offending key and line when known
    """
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from e
    if config_format is None:
        config_format = "json" if path.suffix.lower() == ".json" else SETTINGS.default_config_format
    return load_config_text(text, config_format)
