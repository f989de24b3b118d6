# Copyright MorForge Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Python bindings for the morforge reduced-order model training toolkit."""

from ._core import (
    ArgumentError,
    CreepBar,
    Error,
    IoError,
    ReactionDiffusion,
    SolverError,
    SteadyRom,
    evaluate_steady,
    load_rom,
    nnls_solve,
    pod,
    run_cli,
    save_rom,
    strong_greedy,
    train_steady,
)

__all__ = [
    "ArgumentError",
    "CreepBar",
    "Error",
    "IoError",
    "ReactionDiffusion",
    "SolverError",
    "SteadyRom",
    "evaluate_steady",
    "load_rom",
    "nnls_solve",
    "pod",
    "run_cli",
    "save_rom",
    "strong_greedy",
    "train_steady",
]
