"""Python bindings for the auvrl simulator, trainer and evaluation harness."""

from auvrl._core import (
    ACT_DIM,
    OBS_DIM,
    Checkpoint,
    InputError,
    InvalidArgument,
    InvalidParameters,
    RunConfig,
    RuntimeFailure,
    SwimEnv,
    benchmark,
    compute_gae,
    evaluate,
    hamilton_product,
    integrate_attitude,
    load_checkpoint,
    load_config,
    parse_config,
    quat_angle,
    summarize_metrics,
    train,
)

__all__ = [
    "ACT_DIM",
    "OBS_DIM",
    "Checkpoint",
    "InputError",
    "InvalidArgument",
    "InvalidParameters",
    "RunConfig",
    "RuntimeFailure",
    "SwimEnv",
    "benchmark",
    "compute_gae",
    "evaluate",
    "hamilton_product",
    "integrate_attitude",
    "load_checkpoint",
    "load_config",
    "parse_config",
    "quat_angle",
    "summarize_metrics",
    "train",
]
