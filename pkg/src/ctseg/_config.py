"""Configuration records for ctseg.

Every record is an immutable dataclass validated on construction. Seeds can be
provided via:
1. Constructor arguments (highest priority)
2. The environment variable CTS_SEED
3. The built-in default of 0

A whole run is described by RunConfig, which round-trips through a flat
dotted-key JSON object such as ``{"train.lr": 0.0001, "schedule.rho": 7.0}``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import types
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Final, Literal, Union, get_args, get_origin, get_type_hints

from ctseg._exceptions import InvalidArgumentError

# Environment variable name
ENV_SEED: Final[str] = "CTS_SEED"

# Noise and EMA schedules
DEFAULT_SIGMA_MIN: Final[float] = 0.002
DEFAULT_SIGMA_MAX: Final[float] = 80.0
DEFAULT_RHO: Final[float] = 7.0
DEFAULT_SIGMA_DATA: Final[float] = 0.5
DEFAULT_S0: Final[int] = 2
DEFAULT_S1: Final[int] = 150
DEFAULT_MU0: Final[float] = 0.9
DEFAULT_TOTAL_TRAIN_STEPS: Final[int] = 5000

# Architecture
DEFAULT_DEPTH: Final[int] = 4
DEFAULT_BASE_CHANNELS: Final[int] = 16
DEFAULT_CHANNEL_MULT: Final[tuple[int, ...]] = (1, 2, 4, 8)
DEFAULT_TIME_EMBED_DIM: Final[int] = 64
DEFAULT_REDUCTION: Final[int] = 4

# Optimization
DEFAULT_LEARNING_RATE: Final[float] = 1e-4
DEFAULT_WEIGHT_DECAY: Final[float] = 0.01
DEFAULT_BATCH_SIZE: Final[int] = 4
DEFAULT_ALPHA: Final[float] = 1.0
DEFAULT_GRAD_CLIP: Final[float] = 1.0

# Preprocessing
DEFAULT_DIFFUSION_ITERATIONS: Final[int] = 5
DEFAULT_KAPPA: Final[float] = 30.0
DEFAULT_GAMMA: Final[float] = 0.1
DEFAULT_PERCENTILE_LO: Final[float] = 1.0
DEFAULT_PERCENTILE_HI: Final[float] = 99.0

Conduction = Literal["exp", "quadratic"]
ShapeFamily = Literal["ellipse", "blob", "mixed"]


def resolve_seed(seed: int | None) -> int:
    """Resolve an optional seed against the CTS_SEED environment variable.

    Args:
        seed: Explicit seed, or None to consult the environment.

    Returns:
        The explicit seed, else the integer value of CTS_SEED, else 0.

    Raises:
        InvalidArgumentError: If CTS_SEED is set but is not an integer.
    """
    if seed is not None:
        return seed
    raw = os.environ.get(ENV_SEED, "")
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError as e:
        msg = f"{ENV_SEED} must be an integer, got {raw!r}"
        raise InvalidArgumentError(msg) from e


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidArgumentError(message)


@dataclass(frozen=True, slots=True)
class ScheduleConfig:
    """Noise-level, discretization and EMA schedule constants.

    Attributes:
        sigma_min: Smallest noise level (epsilon).
        sigma_max: Largest noise level (T).
        rho: Schedule curvature exponent.
        sigma_data: Assumed standard deviation of the encoded masks.
        s0: Initial number of discretization steps.
        s1: Final number of discretization steps.
        mu0: Base EMA decay rate.
        total_train_steps: Planned number of optimizer steps (K).
    """

    sigma_min: float = DEFAULT_SIGMA_MIN
    sigma_max: float = DEFAULT_SIGMA_MAX
    rho: float = DEFAULT_RHO
    sigma_data: float = DEFAULT_SIGMA_DATA
    s0: int = DEFAULT_S0
    s1: int = DEFAULT_S1
    mu0: float = DEFAULT_MU0
    total_train_steps: int = DEFAULT_TOTAL_TRAIN_STEPS

    def __post_init__(self) -> None:
        """Validate the schedule constants."""
        _require(
            0 < self.sigma_min < self.sigma_max,
            f"Need 0 < sigma_min < sigma_max, got {self.sigma_min} and {self.sigma_max}",
        )
        _require(self.rho >= 1, f"rho must be >= 1, got {self.rho}")
        _require(self.sigma_data > 0, f"sigma_data must be positive, got {self.sigma_data}")
        _require(2 <= self.s0 <= self.s1, f"Need 2 <= s0 <= s1, got {self.s0} and {self.s1}")
        _require(0 < self.mu0 < 1, f"mu0 must lie in (0, 1), got {self.mu0}")
        _require(
            self.total_train_steps >= 1,
            f"total_train_steps must be >= 1, got {self.total_train_steps}",
        )


@dataclass(frozen=True, slots=True)
class ArchitectureConfig:
    """Shape of the condition encoder and the denoising UNet.

    Attributes:
        depth: Number of UNet resolution levels (L).
        base_channels: Channel width at full resolution.
        channel_mult: Per-level multiplier of base_channels; one entry per level.
        time_embed_dim: Width of the sinusoidal time embedding (even).
        reduction: Channel-attention reduction ratio r.
    """

    depth: int = DEFAULT_DEPTH
    base_channels: int = DEFAULT_BASE_CHANNELS
    channel_mult: tuple[int, ...] = DEFAULT_CHANNEL_MULT
    time_embed_dim: int = DEFAULT_TIME_EMBED_DIM
    reduction: int = DEFAULT_REDUCTION

    def __post_init__(self) -> None:
        """Validate widths and depth."""
        object.__setattr__(self, "channel_mult", tuple(int(m) for m in self.channel_mult))
        _require(self.depth >= 2, f"depth must be >= 2, got {self.depth}")
        _require(self.base_channels >= 1, f"base_channels must be >= 1, got {self.base_channels}")
        _require(
            len(self.channel_mult) == self.depth,
            f"channel_mult needs {self.depth} entries, got {len(self.channel_mult)}",
        )
        _require(all(m >= 1 for m in self.channel_mult), "channel_mult entries must be >= 1")
        _require(
            self.time_embed_dim >= 2 and self.time_embed_dim % 2 == 0,
            f"time_embed_dim must be even and >= 2, got {self.time_embed_dim}",
        )
        _require(self.reduction >= 1, f"reduction must be >= 1, got {self.reduction}")

    @property
    def level_channels(self) -> tuple[int, ...]:
        """Channel count at each level, full resolution first."""
        return tuple(self.base_channels * m for m in self.channel_mult)

    @property
    def size_divisor(self) -> int:
        """Spatial sizes must be divisible by this value."""
        return 2 ** (self.depth - 1)


@dataclass(frozen=True, slots=True)
class TrainerConfig:
    """Optimization and bookkeeping settings of the training loop.

    Attributes:
        lr: AdamW learning rate.
        weight_decay: Decoupled weight decay.
        beta1: First-moment decay of AdamW.
        beta2: Second-moment decay of AdamW.
        grad_clip: Maximum global gradient norm.
        batch_size: Samples per optimizer step.
        total_train_steps: Planned number of optimizer steps (K).
        alpha: Weight of the segmentation loss.
        lambda_weight: Constant weight of the consistency loss.
        eval_interval: Steps between validation evaluations (0 disables).
        checkpoint_interval: Steps between checkpoints (0 keeps only the final one).
        log_interval: Steps between info-level progress log lines.
        eval_split: Dataset split used for periodic evaluation.
        seed: Master seed; None resolves from CTS_SEED.
        use_multiscale: Fuse the condition feature pyramid (CTS-M) or zeros (CTS-nM).
        use_fftp: Reserved Fourier-filter flag; must stay off.
    """

    lr: float = DEFAULT_LEARNING_RATE
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    beta1: float = 0.9
    beta2: float = 0.999
    grad_clip: float = DEFAULT_GRAD_CLIP
    batch_size: int = DEFAULT_BATCH_SIZE
    total_train_steps: int = DEFAULT_TOTAL_TRAIN_STEPS
    alpha: float = DEFAULT_ALPHA
    lambda_weight: float = 1.0
    eval_interval: int = 500
    checkpoint_interval: int = 1000
    log_interval: int = 50
    eval_split: str = "val"
    seed: int | None = field(default=None)
    use_multiscale: bool = True
    use_fftp: bool = False

    def __post_init__(self) -> None:
        """Validate ranges and resolve the seed from the environment if unset."""
        object.__setattr__(self, "seed", resolve_seed(self.seed))
        _require(self.seed >= 0, f"seed must be >= 0, got {self.seed}")
        _require(self.lr > 0, f"lr must be positive, got {self.lr}")
        _require(self.weight_decay >= 0, f"weight_decay must be >= 0, got {self.weight_decay}")
        _require(0 <= self.beta1 < 1 and 0 <= self.beta2 < 1, "AdamW betas must lie in [0, 1)")
        _require(self.grad_clip > 0, f"grad_clip must be positive, got {self.grad_clip}")
        _require(self.batch_size >= 1, f"batch_size must be >= 1, got {self.batch_size}")
        _require(
            self.total_train_steps >= 1,
            f"total_train_steps must be >= 1, got {self.total_train_steps}",
        )
        _require(self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}")
        _require(self.lambda_weight >= 0, f"lambda_weight must be >= 0, got {self.lambda_weight}")
        _require(
            min(self.eval_interval, self.checkpoint_interval, self.log_interval) >= 0,
            "intervals must be >= 0",
        )
        _require(not self.use_fftp, "use_fftp is reserved and not implemented")


@dataclass(frozen=True, slots=True)
class SamplerConfig:
    """Inference settings.

    Attributes:
        threshold: Probability threshold for binarization.
        use_target: Sample with the EMA target parameters instead of the online ones.
        steps: Number of consistency evaluations (1 = single-step sampling).
    """

    threshold: float = 0.5
    use_target: bool = True
    steps: int = 1

    def __post_init__(self) -> None:
        """Validate the threshold and step count."""
        _require(0 < self.threshold < 1, f"threshold must lie in (0, 1), got {self.threshold}")
        _require(self.steps >= 1, f"steps must be >= 1, got {self.steps}")


@dataclass(frozen=True, slots=True)
class PreprocessConfig:
    """Image preprocessing applied at load time and before prediction.

    Attributes:
        enabled: Run anisotropic diffusion before normalization.
        n_iter: Diffusion iterations.
        kappa: Edge threshold on the raw 0-255 intensity scale.
        gamma: Explicit-scheme step size (at most 0.25).
        conduction: Conduction function, "exp" or "quadratic".
        lo: Lower clipping percentile.
        hi: Upper clipping percentile.
    """

    enabled: bool = True
    n_iter: int = DEFAULT_DIFFUSION_ITERATIONS
    kappa: float = DEFAULT_KAPPA
    gamma: float = DEFAULT_GAMMA
    conduction: Conduction = "exp"
    lo: float = DEFAULT_PERCENTILE_LO
    hi: float = DEFAULT_PERCENTILE_HI

    def __post_init__(self) -> None:
        """Validate the filter settings."""
        _require(self.n_iter >= 0, f"n_iter must be >= 0, got {self.n_iter}")
        _require(self.kappa > 0, f"kappa must be positive, got {self.kappa}")
        _require(0 < self.gamma <= 0.25, f"gamma must lie in (0, 0.25], got {self.gamma}")
        _require(self.conduction in ("exp", "quadratic"), f"Unknown conduction {self.conduction!r}")
        _require(
            0 <= self.lo < self.hi <= 100,
            f"Need 0 <= lo < hi <= 100, got {self.lo} and {self.hi}",
        )


@dataclass(frozen=True, slots=True)
class SyntheticConfig:
    """Parameters of the synthetic segmentation dataset generator.

    Attributes:
        image_size: Height and width in pixels.
        n_train: Training samples.
        n_val: Validation samples.
        n_test: Test samples.
        shape_family: "ellipse", "blob" (smooth radial blob) or "mixed".
        max_shapes: Upper bound on foreground shapes per image.
        foreground_intensity: Mean foreground intensity on a [0, 1] scale.
        background_intensity: Mean background intensity on a [0, 1] scale.
        boundary_blur: Gaussian sigma (pixels) softening shape boundaries.
        speckle_strength: Standard deviation of multiplicative speckle.
        gaussian_noise_std: Standard deviation of additive Gaussian noise.
        bias_field_strength: Amplitude of the low-frequency intensity field.
        seed: Master seed; None resolves from CTS_SEED.
    """

    image_size: int = 64
    n_train: int = 200
    n_val: int = 50
    n_test: int = 50
    shape_family: ShapeFamily = "mixed"
    max_shapes: int = 2
    foreground_intensity: float = 0.7
    background_intensity: float = 0.3
    boundary_blur: float = 1.0
    speckle_strength: float = 0.15
    gaussian_noise_std: float = 0.05
    bias_field_strength: float = 0.15
    seed: int | None = field(default=None)

    def __post_init__(self) -> None:
        """Validate sizes and noise strengths and resolve the seed."""
        object.__setattr__(self, "seed", resolve_seed(self.seed))
        _require(self.seed >= 0, f"seed must be >= 0, got {self.seed}")
        _require(self.image_size >= 16, f"image_size must be >= 16, got {self.image_size}")
        _require(
            min(self.n_train, self.n_val, self.n_test) >= 1, "split sizes must all be >= 1"
        )
        _require(
            self.shape_family in ("ellipse", "blob", "mixed"),
            f"Unknown shape family {self.shape_family!r}",
        )
        _require(self.max_shapes >= 1, f"max_shapes must be >= 1, got {self.max_shapes}")
        _require(
            min(
                self.boundary_blur,
                self.speckle_strength,
                self.gaussian_noise_std,
                self.bias_field_strength,
            )
            >= 0,
            "noise strengths must be >= 0",
        )

    @property
    def split_sizes(self) -> dict[str, int]:
        """Number of samples per split, in generation order."""
        return {"train": self.n_train, "val": self.n_val, "test": self.n_test}

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> SyntheticConfig:
        """Build a config from plain field names, coercing string values.

        Raises:
            InvalidArgumentError: On unknown keys or values that cannot be coerced.
        """
        hints = get_type_hints(cls)
        kwargs = {}
        for key, raw in data.items():
            if key not in hints:
                msg = f"Unknown generator key {key!r}"
                raise InvalidArgumentError(msg)
            kwargs[key] = _coerce(raw, hints[key], key)
        return cls(**kwargs)


_SECTIONS: Final[tuple[str, ...]] = ("schedule", "arch", "train", "sampler", "preprocess")
_K_KEYS: Final[tuple[str, str]] = ("schedule.total_train_steps", "train.total_train_steps")


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Every effective hyperparameter of a run, grouped by section.

    Attributes:
        schedule: Noise and EMA schedules.
        arch: Network shape.
        train: Optimization settings.
        sampler: Inference settings.
        preprocess: Image preprocessing.
    """

    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    arch: ArchitectureConfig = field(default_factory=ArchitectureConfig)
    train: TrainerConfig = field(default_factory=TrainerConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)

    def __post_init__(self) -> None:
        """Check that both copies of K agree."""
        _require(
            self.schedule.total_train_steps == self.train.total_train_steps,
            "schedule.total_train_steps and train.total_train_steps must match "
            f"({self.schedule.total_train_steps} != {self.train.total_train_steps})",
        )

    def with_total_steps(self, total_train_steps: int) -> RunConfig:
        """Return a copy whose schedule and trainer both plan ``total_train_steps`` steps."""
        return dataclasses.replace(
            self,
            schedule=dataclasses.replace(self.schedule, total_train_steps=total_train_steps),
            train=dataclasses.replace(self.train, total_train_steps=total_train_steps),
        )

    def to_flat(self) -> dict[str, Any]:
        """Flatten into a ``{"section.field": value}`` mapping of JSON scalars and lists."""
        flat: dict[str, Any] = {}
        for section in _SECTIONS:
            for key, value in dataclasses.asdict(getattr(self, section)).items():
                flat[f"{section}.{key}"] = list(value) if isinstance(value, tuple) else value
        return flat

    @classmethod
    def from_flat(cls, data: Mapping[str, Any], base: RunConfig | None = None) -> RunConfig:
        """Build a config from flat dotted keys layered over ``base``.

        Args:
            data: Mapping such as ``{"train.lr": "1e-4"}``. String values are
                coerced to each field's declared type.
            base: Config supplying values for keys not in ``data``.

        Returns:
            A validated RunConfig.

        Raises:
            InvalidArgumentError: On unknown keys or values that cannot be coerced.
        """
        base = base or cls()
        updates: dict[str, dict[str, Any]] = {section: {} for section in _SECTIONS}
        for dotted, raw in data.items():
            section, _, name = dotted.partition(".")
            if section not in _SECTIONS or not name:
                msg = f"Unknown config key {dotted!r}"
                raise InvalidArgumentError(msg)
            record = getattr(base, section)
            hints = get_type_hints(type(record))
            if name not in hints:
                msg = f"Unknown config key {dotted!r}"
                raise InvalidArgumentError(msg)
            updates[section][name] = _coerce(raw, hints[name], dotted)

        # K lives in two sections; a value given for one applies to both.
        for section, other in (("schedule", "train"), ("train", "schedule")):
            if "total_train_steps" in updates[section]:
                updates[other].setdefault(
                    "total_train_steps", updates[section]["total_train_steps"]
                )

        sections = {
            section: dataclasses.replace(getattr(base, section), **updates[section])
            for section in _SECTIONS
        }
        return cls(**sections)

    @classmethod
    def from_file(cls, path: Path, overrides: Mapping[str, Any] | None = None) -> RunConfig:
        """Load a flat JSON config file, then apply ``overrides`` on top."""
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            msg = f"Cannot read config file {path}: {e}"
            raise InvalidArgumentError(msg) from e
        if not isinstance(data, dict):
            msg = f"Config file {path} must contain a JSON object"
            raise InvalidArgumentError(msg)
        overrides = dict(overrides or {})
        merged = {**data, **overrides}
        # An override of K in one section replaces the file's value in both.
        for key, other in (_K_KEYS, _K_KEYS[::-1]):
            if key in overrides and other not in overrides:
                merged[other] = overrides[key]
        return cls.from_flat(merged)

    def to_json(self) -> str:
        """Canonical JSON text: sorted keys, compact separators."""
        return json.dumps(self.to_flat(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def _coerce(value: Any, hint: Any, key: str) -> Any:
    """Coerce a JSON or command-line value to a dataclass field type."""
    origin = get_origin(hint)
    try:
        if origin in (Union, types.UnionType):
            args = [a for a in get_args(hint) if a is not type(None)]
            if value is None or (isinstance(value, str) and value.lower() in ("", "none", "null")):
                return None
            return _coerce(value, args[0], key)
        if origin is Literal:
            if value not in get_args(hint):
                msg = f"{key} must be one of {get_args(hint)}, got {value!r}"
                raise InvalidArgumentError(msg)
            return value
        if origin is tuple:
            items = value.split(",") if isinstance(value, str) else list(value)
            return tuple(_coerce(item, get_args(hint)[0], key) for item in items)
        if hint is bool:
            if isinstance(value, str):
                lowered = value.lower()
                if lowered not in ("true", "false", "1", "0", "yes", "no"):
                    msg = f"{key} must be a boolean, got {value!r}"
                    raise InvalidArgumentError(msg)
                return lowered in ("true", "1", "yes")
            return bool(value)
        if hint is int:
            if isinstance(value, float) and not value.is_integer():
                msg = f"{key} must be an integer, got {value!r}"
                raise InvalidArgumentError(msg)
            return int(value)
        if hint is float:
            return float(value)
        if hint is str:
            return str(value)
    except InvalidArgumentError:
        raise
    except (TypeError, ValueError) as e:
        msg = f"Cannot interpret {value!r} for {key}"
        raise InvalidArgumentError(msg) from e
    return value
