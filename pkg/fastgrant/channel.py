import math
from typing import Sequence

import numpy as np

from .config import ChannelConfig
from .models import ChannelRealization, LinkParams, MtdProfile

# 99th percentile of the unit-mean exponential small-scale gain
P99_SMALL_SCALE_GAIN = -math.log(0.01)


def dbm_to_watts(dbm: float) -> float:
    return float(10 ** ((dbm - 30.0) / 10.0))


def path_loss_db(distance_km: float) -> float:
    """
    Macro-cell path loss with the distance in km
    """
    if distance_km <= 0:
        raise ValueError(f"distance must be positive, got {distance_km} km")
    return 128.1 + 37.6 * math.log10(distance_km)


def link_params(profile: MtdProfile, channel: ChannelConfig) -> LinkParams:
    return LinkParams(
        distance_km=profile.distance_km,
        tx_power_dbm=profile.tx_power_dbm,
        shadowing_sigma_db=channel.shadowing_sigma_db,
        bandwidth_hz=channel.bandwidth_hz,
        noise_psd_dbm_hz=channel.noise_psd_dbm_hz,
    )


def sample_channel(link: LinkParams, rng: np.random.Generator) -> ChannelRealization:
    """
    Draw Rayleigh small-scale fading and log-normal shadowing for one slot
    """
    small_scale = float(rng.exponential(1.0))
    shadowing_db = float(rng.normal(0.0, link.shadowing_sigma_db))
    large_scale = 10 ** (-(path_loss_db(link.distance_km) + shadowing_db) / 10)
    return ChannelRealization(
        large_scale_gain=large_scale,
        small_scale_gain=small_scale,
        composite_gain=large_scale * small_scale,
    )


def snr(link: LinkParams, gain: float) -> float:
    if gain < 0:
        raise ValueError(f"channel gain must be nonnegative, got {gain}")
    noise_w = link.bandwidth_hz * dbm_to_watts(link.noise_psd_dbm_hz)
    return dbm_to_watts(link.tx_power_dbm) * gain / noise_w


def rate(link: LinkParams, snr: float) -> float:
    """
    Shannon rate in bit/s
    """
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")
    return link.bandwidth_hz * math.log2(1.0 + snr)


def normalized_rate(c: float, c_max: float) -> float:
    if c_max <= 0:
        raise ValueError(f"c_max must be positive, got {c_max}")
    return min(c / c_max, 1.0)


def max_rate(population: Sequence[MtdProfile], channel: ChannelConfig) -> float:
    """
    Reference rate C_max: the closest MTD without shadowing and with the
    small-scale gain at its 99th percentile
    """
    if not population:
        raise ValueError("cannot derive a maximum rate for an empty population")
    closest = min(population, key=lambda profile: profile.distance_km)
    link = link_params(closest, channel)
    gain = 10 ** (-path_loss_db(link.distance_km) / 10) * P99_SMALL_SCALE_GAIN
    return rate(link, snr(link, gain))


def sample_rates(link: LinkParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Vectorized draw of `size` independent instantaneous rates of a link
    """
    small_scale = rng.exponential(1.0, size)
    shadowing_db = rng.normal(0.0, link.shadowing_sigma_db, size)
    gains = 10 ** (-(path_loss_db(link.distance_km) + shadowing_db) / 10) * small_scale
    noise_w = link.bandwidth_hz * dbm_to_watts(link.noise_psd_dbm_hz)
    snrs = dbm_to_watts(link.tx_power_dbm) * gains / noise_w
    rates: np.ndarray = link.bandwidth_hz * np.log2(1.0 + snrs)
    return rates
