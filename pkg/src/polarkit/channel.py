"""BPSK transmission over AWGN or flat Rayleigh fading, and channel LLRs.

Eb/N0 accounting includes the code rate: noise variance per real
dimension is sigma^2 = 1 / (2 * rate * 10^(ebn0_db/10)).  Rayleigh gains
have unit second moment and are assumed known to the receiver.  Channel
LLRs use the convention ell = ln P(y|c=0) / P(y|c=1) and are clamped to
+-LLR_MAX before entering the decoders.
"""

from dataclasses import dataclass

import numpy as np

from .logdomain import LLR_MAX


@dataclass
class ChannelCfg:
    kind: str = "awgn"
    ebn0_db: float = 0.0
    rate: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("awgn", "rayleigh"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def noise_var(self):
        """Per-dimension noise variance; 0 for an infinite-Eb/N0 override."""
        snr = 10.0 ** (self.ebn0_db / 10.0)
        if np.isinf(snr):
            return 0.0
        return 1.0 / (2.0 * self.rate * snr)


@dataclass
class Observation:
    y: np.ndarray
    fade: np.ndarray


def transmit(c, cfg, rng):
    """Map codeword bits to x = 1 - 2c and push through the channel."""
    c = np.asarray(c)
    x = 1.0 - 2.0 * c.astype(np.float64)
    if cfg.kind == "rayleigh":
        # unit second moment: E[h^2] = 2 * scale^2 = 1
        fade = rng.rayleigh(scale=np.sqrt(0.5), size=x.shape)
    else:
        fade = np.ones_like(x)
    sigma = np.sqrt(cfg.noise_var)
    y = fade * x + sigma * rng.standard_normal(x.shape)
    return Observation(y=y, fade=fade)


def channel_llr(obs, cfg):
    """Per-symbol LLRs 2*fade*y/sigma^2, clamped to +-LLR_MAX."""
    var = cfg.noise_var
    z = obs.fade * obs.y
    if var == 0.0:
        return np.sign(z) * LLR_MAX
    return np.clip(2.0 * z / var, -LLR_MAX, LLR_MAX)
