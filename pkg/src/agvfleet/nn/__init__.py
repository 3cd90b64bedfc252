"""Minimal dense/recurrent network engine with exact analytic gradients."""

from .birnn import BiRnnCache, BiRnnSpec, birnn_backward, birnn_forward, birnn_init, birnn_layout
from .checkpoint import CheckpointError, load_network, save_network
from .mlp import MlpCache, MlpSpec, mlp_backward, mlp_forward, mlp_init, mlp_layout
from .optim import AdamConfig, adam_step, soft_update
from .params import NetworkParams, ParamLayout

__all__ = [
    "BiRnnCache",
    "BiRnnSpec",
    "birnn_backward",
    "birnn_forward",
    "birnn_init",
    "birnn_layout",
    "CheckpointError",
    "load_network",
    "save_network",
    "MlpCache",
    "MlpSpec",
    "mlp_backward",
    "mlp_forward",
    "mlp_init",
    "mlp_layout",
    "AdamConfig",
    "adam_step",
    "soft_update",
    "NetworkParams",
    "ParamLayout",
]
