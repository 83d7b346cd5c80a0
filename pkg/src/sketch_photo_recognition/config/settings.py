"""
Configuration models and loading

Pydantic models describe every tunable of the pipeline. Configs are built
from a named preset, an optional YAML file and dotted ``key=value``
overrides, in that order, and validated once at the end.
"""

import copy
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..utils.exception_handler import ConfigError
from .presets import get_preset_config, get_preset_names

# Load environment variables
load_dotenv()

DEFAULT_PRESET = os.getenv("SKETCHREC_PRESET", "full")
DEFAULT_OUTPUT_DIR = os.getenv("SKETCHREC_OUTPUT_DIR", "runs")

SimilarityMode = Literal["l1", "ssim", "l1_plus_ssim"]
SynthesisVariant = Literal["bidirectional", "photo2sketch", "sketch2photo", "none"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class DataConfig(_Section):
    """Dataset references and image geometry."""
    paired_manifest: Optional[str] = None
    photo_manifest: Optional[str] = None
    target_manifest: Optional[str] = None
    distractor_manifest: Optional[str] = None
    image_size: int = Field(256, ge=16)
    initial_size: int = Field(272, ge=16)
    photo_channels: Literal[3] = 3
    sketch_channels: Literal[1, 3] = 1
    eye_height: float = Field(0.35, gt=0, lt=1)
    interocular: float = Field(0.46, gt=0, lt=1)

    @model_validator(mode="after")
    def _crop_fits(self):
        if self.initial_size < self.image_size:
            raise ValueError(f"initial_size {self.initial_size} is smaller than image_size {self.image_size}")
        return self

    @property
    def canonical_eyes(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """Eye positions in the aligned ``initial_size`` frame."""
        size = float(self.initial_size)
        half = 0.5 * self.interocular * size
        y = self.eye_height * size
        return (size / 2 - half, y), (size / 2 + half, y)


class ModelConfig(_Section):
    """Network widths and variants."""
    latent_dim: int = Field(512, ge=2)
    encoder_base_channels: int = Field(32, ge=1)
    encoder_stages: int = Field(5, ge=1)
    generator_base_channels: int = Field(512, ge=1)
    generator_min_channels: int = Field(32, ge=1)
    const_size: int = Field(4, ge=1)
    disc_base_channels: int = Field(64, ge=1)
    leaky_slope: float = Field(0.2, ge=0)
    generator_activation: Literal["softplus", "leaky_relu"] = "softplus"
    init_std: float = Field(0.02, gt=0)
    adain_eps: float = Field(1e-5, gt=0)
    synthesis: SynthesisVariant = "bidirectional"
    adacos_mode: Literal["dynamic", "fixed"] = "dynamic"
    adacos_modalities: Literal["both", "sketch"] = "both"


class LossWeights(_Section):
    """Weights of the joint loss terms other than AdaCos."""
    lambda_gan: float = Field(1.0, ge=0)
    lambda_s: float = Field(10.0, ge=0)
    lambda_w: float = Field(1.0, ge=0)


class StepConfig(_Section):
    learning_rate: float = Field(2e-4, gt=0)
    batch_size: int = Field(8, ge=1)
    epochs: int = Field(3000, ge=0)
    betas: Tuple[float, float] = (0.5, 0.999)
    weights: LossWeights = Field(default_factory=LossWeights)
    similarity: SimilarityMode = "l1"
    checkpoint_every: int = Field(0, ge=0)


class TrainConfig(_Section):
    """Per-step optimizer settings for the three-step scheme."""
    step1: StepConfig = Field(default_factory=StepConfig)
    step2: StepConfig = Field(default_factory=lambda: StepConfig(learning_rate=5e-4, batch_size=32, epochs=50))
    step3: StepConfig = Field(default_factory=StepConfig)
    reinit_discriminators: bool = False

    def for_step(self, step: int) -> StepConfig:
        if step not in (1, 2, 3):
            raise ConfigError(f"Unknown training step {step}; expected 1, 2 or 3")
        return getattr(self, f"step{step}")


class EvalConfig(_Section):
    partitions: int = Field(5, ge=1)
    train_count: int = Field(48, ge=0)
    test_count: int = Field(75, ge=1)
    ranks: List[int] = Field(default_factory=lambda: [1, 10, 50])
    # training steps run per partition; [3] is training without pre-training
    steps: List[int] = Field(default_factory=lambda: [1, 2, 3])

    @field_validator("ranks")
    @classmethod
    def _positive_ranks(cls, ranks: List[int]) -> List[int]:
        if not ranks or any(k < 1 for k in ranks):
            raise ValueError("ranks must be a nonempty list of positive integers")
        return sorted(set(ranks))

    @field_validator("steps")
    @classmethod
    def _known_steps(cls, steps: List[int]) -> List[int]:
        if not steps or any(s not in (1, 2, 3) for s in steps):
            raise ValueError("steps must be a nonempty subset of 1, 2, 3")
        return sorted(set(steps))


class AppConfig(_Section):
    """Root configuration."""
    seed: int = 0
    output_dir: str = DEFAULT_OUTPUT_DIR
    data: DataConfig = Field(default_factory=DataConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigLoader:
    """Centralized config construction, overrides and validation."""

    @staticmethod
    def valid_paths(model: type = AppConfig, prefix: str = "") -> List[str]:
        """All dotted leaf paths accepted by overrides."""
        paths = []
        for name, field in model.model_fields.items():
            annotation = field.annotation
            if isinstance(annotation, type) and issubclass(annotation, BaseModel):
                paths.extend(ConfigLoader.valid_paths(annotation, f"{prefix}{name}."))
            else:
                paths.append(f"{prefix}{name}")
        return paths

    @staticmethod
    def parse_override(text: str) -> Tuple[str, Any]:
        if "=" not in text:
            raise ConfigError(f"Override '{text}' is not of the form key=value")
        path, raw = text.split("=", 1)
        path = path.strip()
        try:
            value = yaml.safe_load(raw) if raw.strip() else None
        except yaml.YAMLError:
            value = raw
        return path, value

    @staticmethod
    def set_path(raw: Dict[str, Any], path: str, value: Any) -> None:
        if path not in ConfigLoader.valid_paths():
            raise ConfigError(
                f"Unknown config path '{path}'. Valid paths: {', '.join(ConfigLoader.valid_paths())}"
            )
        node = raw
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    @staticmethod
    def validate(raw: Dict[str, Any]) -> AppConfig:
        try:
            return AppConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    @staticmethod
    def load(path: Optional[str] = None, preset: Optional[str] = None,
             overrides: Iterable[str] = (), seed: Optional[int] = None) -> AppConfig:
        """Build the effective config from preset, YAML file and overrides."""
        preset = preset or DEFAULT_PRESET
        preset_config = get_preset_config(preset)
        if preset_config is None:
            raise ConfigError(f"Unknown preset '{preset}'. Available: {', '.join(get_preset_names())}")
        raw = copy.deepcopy(preset_config)

        if path:
            config_path = Path(path)
            if not config_path.is_file():
                raise ConfigError(f"Config file {path} does not exist")
            try:
                file_raw = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Config file {path} is not valid YAML: {e}") from e
            if not isinstance(file_raw, dict):
                raise ConfigError(f"Config file {path} must contain a mapping at top level")
            raw = _deep_merge(raw, file_raw)

        for text in overrides:
            key, value = ConfigLoader.parse_override(text)
            ConfigLoader.set_path(raw, key, value)
        if seed is not None:
            raw["seed"] = seed
        return ConfigLoader.validate(raw)

    @staticmethod
    def with_override(config: AppConfig, path: str, value: Any) -> AppConfig:
        """Return a copy of ``config`` with one dotted path replaced."""
        raw = config.model_dump(mode="json")
        ConfigLoader.set_path(raw, path, value)
        return ConfigLoader.validate(raw)

    @staticmethod
    def dump(config: AppConfig) -> Dict[str, Any]:
        return config.model_dump(mode="json")

    @staticmethod
    def save(config: AppConfig, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(yaml.safe_dump(ConfigLoader.dump(config), sort_keys=False), encoding="utf-8")
