"""The consistency segmenter: encoder h, denoiser g and the boundary-conditioned wrapper f."""

from __future__ import annotations

import torch
from torch import nn

from ctseg._config import ArchitectureConfig, ScheduleConfig
from ctseg._exceptions import InvalidArgumentError
from ctseg.networks._denoiser import Denoiser
from ctseg.networks._encoder import ConditionEncoder
from ctseg.networks._types import ConditionFeaturePyramid, ConsistencyOutput
from ctseg.schedules import boundary_coeffs


class ConsistencySegmenter(nn.Module):
    """Parameter container for one model (online or target).

    ``named_parameters()`` enumerates the encoder and denoiser weights as one
    flat collection; two instances built from the same architecture share
    the same name and shape inventory.
    """

    def __init__(self, arch: ArchitectureConfig) -> None:
        super().__init__()
        self.arch = arch
        self.encoder = ConditionEncoder(arch)
        self.denoiser = Denoiser(arch)

    @property
    def output_layer(self) -> nn.Conv2d:
        """Final convolution of the denoiser."""
        return self.denoiser.out


def parameter_inventory(model: nn.Module) -> dict[str, tuple[int, ...]]:
    """Map every parameter name to its shape."""
    return {name: tuple(p.shape) for name, p in model.named_parameters()}


def init_params(
    arch: ArchitectureConfig, seed: int, *, zero_init_output: bool = True
) -> ConsistencySegmenter:
    """Build a freshly initialized model.

    Layers use PyTorch's fan-in scaled defaults drawn from a private RNG
    seeded with ``seed``; the global RNG state is left untouched.

    Args:
        arch: Architecture configuration.
        seed: Initialization seed.
        zero_init_output: Zero the final denoiser convolution so the untrained
            consistency function reduces to the skip path.

    Returns:
        The initialized model in training mode.
    """
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        model = ConsistencySegmenter(arch)
    if zero_init_output:
        with torch.no_grad():
            nn.init.zeros_(model.output_layer.weight)
            if model.output_layer.bias is not None:
                nn.init.zeros_(model.output_layer.bias)
    return model


def _check_input(x: torch.Tensor, arch: ArchitectureConfig, name: str) -> None:
    if x.dim() != 4 or x.shape[1] != 1:
        msg = f"{name} must have shape (B, 1, H, W), got {tuple(x.shape)}"
        raise InvalidArgumentError(msg)
    divisor = arch.size_divisor
    if x.shape[-2] % divisor or x.shape[-1] % divisor:
        msg = (
            f"{name} spatial size {tuple(x.shape[-2:])} must be divisible by "
            f"{divisor} for depth {arch.depth}"
        )
        raise InvalidArgumentError(msg)


def encoder_forward(model: ConsistencySegmenter, x_d: torch.Tensor) -> ConditionFeaturePyramid:
    """Run the condition encoder.

    Raises:
        InvalidArgumentError: If ``x_d`` is not (B, 1, H, W) with H and W
            divisible by 2**(depth - 1).
    """
    _check_input(x_d, model.arch, "x_d")
    return model.encoder(x_d)


def denoiser_forward(
    model: ConsistencySegmenter,
    x_in: torch.Tensor,
    pyramid: ConditionFeaturePyramid,
    t: float,
) -> torch.Tensor:
    """Run the denoiser on an already scaled input.

    Raises:
        InvalidArgumentError: If the pyramid depth or level sizes do not
            match ``x_in``.
    """
    arch = model.arch
    _check_input(x_in, arch, "x_in")
    if pyramid.depth != arch.depth:
        msg = f"Pyramid has {pyramid.depth} levels, model depth is {arch.depth}"
        raise InvalidArgumentError(msg)
    batch, _, height, width = x_in.shape
    for i, (feature, ch) in enumerate(zip(pyramid.features, arch.level_channels, strict=True)):
        expected = (batch, ch, height >> i, width >> i)
        if tuple(feature.shape) != expected:
            msg = f"Pyramid level {i} has shape {tuple(feature.shape)}, expected {expected}"
            raise InvalidArgumentError(msg)
    return model.denoiser(x_in, pyramid.features, t)


def consistency_forward(
    model: ConsistencySegmenter,
    x_n: torch.Tensor,
    x_d: torch.Tensor,
    t: float,
    cfg: ScheduleConfig,
    *,
    use_multiscale: bool = True,
) -> ConsistencyOutput:
    """Evaluate f(x_n, x_d, t) = c_skip(t) x_n + c_out(t) g(c_in(t) x_n, h(x_d), t).

    Args:
        model: Online or target model.
        x_n: Noisy mask, shape (B, 1, H, W).
        x_d: Conditioning image, same shape.
        t: Noise level, at least ``cfg.sigma_min``.
        cfg: Schedule providing the boundary coefficients.
        use_multiscale: When False the condition features are replaced by
            zeros; ŷ is still produced.

    Returns:
        The consistency output and the encoder's auxiliary logits.

    Raises:
        InvalidArgumentError: If ``t < sigma_min`` or the shapes are invalid.
    """
    coeffs = boundary_coeffs(t, cfg)
    if x_n.shape != x_d.shape:
        msg = f"x_n shape {tuple(x_n.shape)} differs from x_d shape {tuple(x_d.shape)}"
        raise InvalidArgumentError(msg)
    pyramid = encoder_forward(model, x_d)
    if not use_multiscale:
        pyramid = pyramid.zeros_like()
    out = denoiser_forward(model, coeffs.c_in * x_n, pyramid, t)
    y = coeffs.c_skip * x_n + coeffs.c_out * out
    return ConsistencyOutput(y=y, aux_logits=pyramid.aux_prediction)
