"""Precision bounds for estimating a parameter encoded in noisy quantum channels."""
from .bounds import (
    BoundResult,
    ce_asymptotic,
    ce_finite,
    channel_qfi,
    cs_bound,
    enhancement,
    extended_qfi,
    qs_bound,
    rld_bound,
)
from .channels import ChoiPair, ParamChannel, catalog, choi, load_channel, random_channel, save_channel, tensor
from .errors import QMetroError
from .fisher import StatePair, purification_qfi, qfi
from .frequency import FreqResult, freq_bound, freq_closed
from .oracle import NChannelInstance, optimize_input

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "ChoiPair",
    "FreqResult",
    "NChannelInstance",
    "ParamChannel",
    "QMetroError",
    "StatePair",
    "catalog",
    "ce_asymptotic",
    "ce_finite",
    "channel_qfi",
    "choi",
    "cs_bound",
    "enhancement",
    "extended_qfi",
    "freq_bound",
    "freq_closed",
    "load_channel",
    "optimize_input",
    "purification_qfi",
    "qfi",
    "qs_bound",
    "random_channel",
    "rld_bound",
    "save_channel",
    "tensor",
]
