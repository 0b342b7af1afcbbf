"""Self-supervised dynamic radial MRI reconstruction toolkit."""

from ._core import (
    DivergenceError,
    IoError,
    Model,
    apply_forward_model,
    load_image,
    make_coil_maps,
    make_phantom,
    make_radial_trajectory,
    multiscale_downsample,
    nufft_adjoint,
    nufft_forward,
    psnr,
    reconstruct,
    save_image,
    set_max_threads,
    simulate_measurement,
    zero_filled,
)

__all__ = [
    "DivergenceError",
    "IoError",
    "Model",
    "apply_forward_model",
    "load_image",
    "make_coil_maps",
    "make_phantom",
    "make_radial_trajectory",
    "multiscale_downsample",
    "nufft_adjoint",
    "nufft_forward",
    "psnr",
    "reconstruct",
    "save_image",
    "set_max_threads",
    "simulate_measurement",
    "zero_filled",
]
