"""Per-run configuration loaded from an INI-style run file"""

import configparser
import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.config.settings import settings
from app.core.exceptions import ConfigError
from app.models.enums import NodeKind, TransformKind
from app.models.schemas import AveragingConfig, SearchConfig

logger = logging.getLogger(__name__)

LIST_FIELDS = {("data", "percentage"), ("data", "drop"), ("preprocess", "transforms")}


class DataSection(BaseModel):
    path: Optional[str] = None
    sentinel: str = settings.MISSING_SENTINEL
    percentage: List[str] = Field(default_factory=list, description="Columns on a 0-100 scale")
    drop: List[str] = Field(default_factory=list, description="Columns removed after recoding")


class PreprocessSection(BaseModel):
    k: int = Field(default=settings.KNN_NEIGHBORS, ge=1)
    transforms: List[TransformKind] = Field(default_factory=lambda: list(TransformKind))


class ConstraintsSection(BaseModel):
    strategy: Optional[int] = Field(None, ge=1, le=2)
    blacklist: Optional[str] = None
    whitelist: Optional[str] = None
    domains: Optional[str] = None


class CvSection(BaseModel):
    folds: int = Field(default=settings.DEFAULT_CV_FOLDS, ge=2)
    seed: int = 0
    standardize: bool = False
    relearn: bool = False
    average_in_cv: bool = False


class RunSection(BaseModel):
    label: str = "run"
    workers: int = Field(default=settings.DEFAULT_WORKERS, ge=1)


class RunConfig(BaseModel):
    """Everything needed to reproduce one pipeline run"""
    run: RunSection = Field(default_factory=RunSection)
    data: DataSection = Field(default_factory=DataSection)
    schema_: Dict[str, NodeKind] = Field(default_factory=dict, alias="schema")
    recode: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    preprocess: PreprocessSection = Field(default_factory=PreprocessSection)
    constraints: ConstraintsSection = Field(default_factory=ConstraintsSection)
    search: SearchConfig = Field(default_factory=SearchConfig)
    averaging: AveragingConfig = Field(default_factory=AveragingConfig)
    cv: CvSection = Field(default_factory=CvSection)

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("recode")
    @classmethod
    def _recode_targets_schema(cls, value: Dict[str, Dict[str, str]], info):
        schema = info.data.get("schema_") or {}
        for column in value:
            if schema and column not in schema:
                raise ValueError(f"recode.{column}: column not declared in [schema]")
        return value

    def with_overrides(self, overrides: Dict[str, object]) -> "RunConfig":
        """Apply dotted 'section.key' overrides (None values are skipped)"""
        data = self.model_dump(by_alias=True)
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, key = dotted.split(".", 1)
            data.setdefault(section, {})[key] = value
        try:
            return RunConfig.model_validate(data)
        except ValidationError as exc:
            error = exc.errors()[0]
            raise ConfigError(f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}") from exc

    def canonical_json(self) -> str:
        # field order is fixed by the model; [schema] order is significant (node order)
        return json.dumps(self.model_dump(mode="json", by_alias=True), separators=(",", ":"))

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form"""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def resolved(self) -> Dict:
        """The configuration plus its digest, as embedded in artifacts"""
        return {"config": self.model_dump(mode="json", by_alias=True), "digest": self.digest()}


# === Loading
def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _locate(lines: List[str], section: str, key: Optional[str] = None) -> Optional[int]:
    """1-based line of [section] (or of key inside it)"""
    inside = False
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            if inside and key is not None:
                return None
            inside = line[1:-1].strip() == section
            if inside and key is None:
                return number
            continue
        if inside and key is not None and "=" in line:
            if line.split("=", 1)[0].strip() == key:
                return number
    return None


def _raw_sections(parser: configparser.ConfigParser) -> Dict:
    raw: Dict = {"recode": {}}
    for section in parser.sections():
        items = dict(parser.items(section))
        if section.startswith("recode."):
            raw["recode"][section[len("recode."):].strip()] = items
            continue
        for key in list(items):
            if (section, key) in LIST_FIELDS:
                items[key] = _split(items[key])
            elif items[key] == "":
                items[key] = None
        raw[section] = items
    return raw


def _resolve_paths(cfg: RunConfig, base: Path) -> RunConfig:
    def resolve(value: Optional[str]) -> Optional[str]:
        if value is None:
            return None
        path = Path(value)
        return str(path if path.is_absolute() else (base / path))

    data = cfg.data.model_copy(update={"path": resolve(cfg.data.path)})
    constraints = cfg.constraints.model_copy(
        update={
            "blacklist": resolve(cfg.constraints.blacklist),
            "whitelist": resolve(cfg.constraints.whitelist),
            "domains": resolve(cfg.constraints.domains),
        }
    )
    return cfg.model_copy(update={"data": data, "constraints": constraints})


def parse_run_config(text: str, base: Optional[Path] = None) -> RunConfig:
    """
    Parse run-file text.

    Raises:
        ConfigError: With the offending line number when known
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], line=getattr(exc, "lineno", None)) from exc

    known = {"run", "data", "schema", "preprocess", "constraints", "search", "averaging", "cv"}
    lines = text.splitlines()
    for section in parser.sections():
        if section not in known and not section.startswith("recode."):
            raise ConfigError(f"unknown section [{section}]", line=_locate(lines, section))

    try:
        cfg = RunConfig.model_validate(_raw_sections(parser))
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = [str(part) for part in error["loc"]]
        section = "schema" if loc and loc[0] in ("schema", "schema_") else (loc[0] if loc else "")
        key = loc[1] if len(loc) > 1 else None
        if section == "recode" and key is not None:
            section, key = f"recode.{key}", None
        line = _locate(lines, section, key) or _locate(lines, section)
        where = ".".join(loc)
        raise ConfigError(f"{where}: {error['msg']}", line=line) from exc

    return _resolve_paths(cfg, base) if base is not None else cfg


def parse_resolved_config(text: str) -> RunConfig:
    """
    Parse a resolved-config artifact (resolved_config.json, or any JSON
    artifact embedding one under "run") back into a RunConfig.

    Raises:
        ConfigError: On malformed JSON, a missing config block or a digest mismatch
    """
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if isinstance(body, dict) and "config" not in body and isinstance(body.get("run"), dict):
        body = body["run"]
    if not isinstance(body, dict) or not isinstance(body.get("config"), dict):
        raise ConfigError("JSON run file has no 'config' block")

    try:
        cfg = RunConfig.model_validate(body["config"])
    except ValidationError as exc:
        error = exc.errors()[0]
        raise ConfigError(f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}") from exc
    if "digest" in body and body["digest"] != cfg.digest():
        raise ConfigError(f"digest mismatch: file says {body['digest'][:12]}, config hashes to {cfg.digest()[:12]}")
    return cfg


def load_run_config(path: Path) -> RunConfig:
    """Load an INI run file, or a resolved-config JSON artifact to replay a run"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read run file {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        cfg = parse_resolved_config(text)
    else:
        cfg = parse_run_config(text, base=path.parent)
    logger.info(f"Loaded run configuration '{cfg.run.label}' from {path} (digest {cfg.digest()[:12]})")
    return cfg


def write_resolved(cfg: RunConfig, directory: Path) -> Path:
    """Dump resolved_config.json into an artifact directory"""
    target = Path(directory) / "resolved_config.json"
    target.write_text(json.dumps(cfg.resolved(), indent=2) + "\n")
    return target
