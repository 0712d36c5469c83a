import logging
import math
import os
import shutil
import tempfile
from contextlib import asynccontextmanager
from typing import AsyncGenerator, Dict, Tuple

import aiofiles.os
import numpy as np

REPLICATION_STREAMS: Tuple[str, ...] = ("traffic", "predictor", "policy", "reward", "channel")

# Spawn-key domains: setup streams are shared by all replications of an experiment
_REPLICATION_DOMAIN = 0
_SETUP_DOMAIN = 1
SETUP_STREAMS: Tuple[str, ...] = ("population", "true_means", "calibration")


def replication_streams(seed: int, replication: int) -> Dict[str, np.random.Generator]:
    """
    Independent generators for one replication, derived from the master seed
    """
    root = np.random.SeedSequence(seed, spawn_key=(_REPLICATION_DOMAIN, replication))
    return {
        name: np.random.default_rng(child)
        for name, child in zip(REPLICATION_STREAMS, root.spawn(len(REPLICATION_STREAMS)))
    }


def setup_stream(seed: int, purpose: str) -> np.random.Generator:
    """
    Generator for experiment-wide setup work such as placing the population
    """
    if purpose not in SETUP_STREAMS:
        raise ValueError(f"unknown setup stream '{purpose}'")
    key = (_SETUP_DOMAIN, SETUP_STREAMS.index(purpose))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def format_float(value: float) -> str:
    """
    Render a float with 9 significant digits
    """
    if math.isnan(value):
        return "nan"
    return f"{value:.9g}"


@asynccontextmanager
async def staged_output_dir(directory: str) -> AsyncGenerator[str, None]:
    """
    Context manager yielding a staging directory whose contents are moved into
    `directory` on success and discarded on failure
    """
    directory = os.path.abspath(directory)
    parent = os.path.dirname(directory)
    await aiofiles.os.makedirs(parent, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=".staging-", dir=parent)
    try:
        yield staging
    except BaseException:
        logging.debug("====== Discarding partial outputs in %s ======", staging)
        shutil.rmtree(staging, ignore_errors=True)
        raise
    try:
        await aiofiles.os.makedirs(directory, exist_ok=True)
        for entry in sorted(os.listdir(staging)):
            target = os.path.join(directory, entry)
            if os.path.isdir(target):
                shutil.rmtree(target)
            os.replace(os.path.join(staging, entry), target)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    logging.debug("====== Outputs written to %s ======", directory)
