"""Gridless greedy channel estimation for quantized hybrid massive MIMO."""

from nfcfgs.channel import (
    ArraySpec,
    ChannelRealization,
    PathParams,
    PulseSpec,
    assemble_channel,
    draw_paths,
    rc_pulse,
    rc_pulse_deriv,
    steering,
)
from nfcfgs.errors import ConfigurationError, DegenerateSupportWarning
from nfcfgs.quantization import (
    BoxDerivatives,
    QuantizedObservation,
    QuantizerSpec,
    box_loglik,
    design_quantizer,
    gain_gradient,
    log_likelihood,
    quantize,
)

__version__ = "0.1.0"

__all__ = [
    "ArraySpec",
    "BoxDerivatives",
    "ChannelRealization",
    "ConfigurationError",
    "DegenerateSupportWarning",
    "PathParams",
    "PulseSpec",
    "QuantizedObservation",
    "QuantizerSpec",
    "assemble_channel",
    "box_loglik",
    "design_quantizer",
    "draw_paths",
    "gain_gradient",
    "log_likelihood",
    "quantize",
    "rc_pulse",
    "rc_pulse_deriv",
    "steering",
    "__version__",
]
