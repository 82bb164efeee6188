"""Spiking-lattice multi-focus image fusion."""

from ._ndcnp import (
    FusionConfig,
    NeuronParams,
    ShapeError,
    auto_configure,
    closed_form,
    continuous_firing_threshold,
    decision_map,
    fuse,
    luminance,
    psnr,
    qabf,
    regime,
    run_lattice,
    single_neuron_trace,
    sml,
    spike_density,
    ssim,
)

__all__ = [
    "FusionConfig",
    "NeuronParams",
    "ShapeError",
    "auto_configure",
    "closed_form",
    "continuous_firing_threshold",
    "decision_map",
    "fuse",
    "luminance",
    "psnr",
    "qabf",
    "regime",
    "run_lattice",
    "single_neuron_trace",
    "sml",
    "spike_density",
    "ssim",
]
