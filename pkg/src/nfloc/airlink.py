"""Transmit power, receiver noise, and synthesis of beam-swept observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .channel import ChannelMatrix
from .codebooks import Codebook


@dataclass(frozen=True)
class LinkBudget:
    """Scalar link-level quantities.

    tx_power is in dBm, noise_figure in dB, noise_density in dBm/Hz,
    noise_bw in Hz (one pilot subcarrier).
    """

    tx_power: float = 20.0
    noise_figure: float = 10.0
    noise_density: float = -174.0
    noise_bw: float = 15e3

    @property
    def tx_power_mw(self) -> float:
        return 10.0 ** (self.tx_power / 10.0)


def noise_power(lb: LinkBudget) -> float:
    """Receiver noise power over one pilot subcarrier, in dBm."""
    return lb.noise_density + 10.0 * np.log10(lb.noise_bw) + lb.noise_figure


def noise_power_mw(lb: LinkBudget) -> float:
    return 10.0 ** (noise_power(lb) / 10.0)


@dataclass(frozen=True, eq=False)
class RxGrid:
    """User-side observations, one row per beam, one column per subcarrier."""

    y: np.ndarray    # (n_beams, n_subcarriers) complex
    scheme_tag: str  # codebook scheme that produced it
    seed: int        # noise seed, reproduces the grid exactly
    noise_power_mw: float = 0.0  # per-entry noise power behind y; 0 when noiseless


def synthesize_rx(
    channel: ChannelMatrix,
    book: Codebook,
    lb: LinkBudget,
    seed: int,
    noiseless: bool = False,
) -> RxGrid:
    """Beam-swept downlink observations sqrt(P) F^H H + Z.

    Z entries are i.i.d. circular complex Gaussian with variance equal to the
    per-subcarrier noise power; noiseless=True drops them (zero-noise limit).
    """
    if channel.entries.shape[0] != book.matrix.shape[0]:
        raise DimensionMismatch(
            f"channel has {channel.entries.shape[0]} elements, "
            f"codebook has {book.matrix.shape[0]}"
        )
    signal = np.sqrt(lb.tx_power_mw) * (book.matrix.conj().T @ channel.entries)
    floor = 0.0
    if not noiseless:
        rng = np.random.default_rng(seed)
        floor = noise_power_mw(lb)
        sigma = np.sqrt(floor / 2.0)
        noise = sigma * (
            rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)
        )
        signal = signal + noise
    return RxGrid(y=signal, scheme_tag=book.scheme_tag, seed=int(seed), noise_power_mw=floor)


def snr_at(channel: ChannelMatrix, book: Codebook, lb: LinkBudget) -> float:
    """Best-beam SNR in dB: max over beams of the subcarrier-mean P|f^H h|^2/sigma^2."""
    if channel.entries.shape[0] != book.matrix.shape[0]:
        raise DimensionMismatch("channel and codebook element counts differ")
    g = np.abs(book.matrix.conj().T @ channel.entries) ** 2
    best = float(np.max(g.mean(axis=1)))
    return 10.0 * np.log10(lb.tx_power_mw * best / noise_power_mw(lb))
