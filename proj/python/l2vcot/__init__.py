"""Low-pass CoT pattern extraction, analysis and steering (Python bindings)."""

from ._core import (
    DegenerateError,
    DimensionError,
    FormatError,
    IOError,
    L2VError,
    ToyNet,
    UsageError,
    __version__,
    band_energies,
    band_relative_error,
    covariance_trace,
    dft_forward,
    dft_inverse,
    drift_experiment,
    extract_pattern,
    inject,
    lowpass_filter,
    lowpass_mask,
    mean_pattern,
    pca,
    read_tensor,
    spectral_resample,
    synth_directions,
    write_tensor,
)

__all__ = [
    "DegenerateError",
    "DimensionError",
    "FormatError",
    "IOError",
    "L2VError",
    "ToyNet",
    "UsageError",
    "__version__",
    "band_energies",
    "band_relative_error",
    "covariance_trace",
    "dft_forward",
    "dft_inverse",
    "drift_experiment",
    "extract_pattern",
    "inject",
    "lowpass_filter",
    "lowpass_mask",
    "mean_pattern",
    "pca",
    "read_tensor",
    "spectral_resample",
    "synth_directions",
    "write_tensor",
]
