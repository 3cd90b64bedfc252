"""Adam with bias correction and Polyak soft target updates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import NetworkParams

__all__ = ["AdamConfig", "adam_step", "soft_update"]


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_step(
    params: NetworkParams,
    grads: NetworkParams | np.ndarray,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> NetworkParams:
    """One bias-corrected Adam update in place.

    m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2;
    theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
    with t counting updates from 1. Moments live on ``params``.
    """
    g = grads.flat if isinstance(grads, NetworkParams) else np.asarray(grads)
    if g.shape != params.flat.shape:
        raise ValueError(f"gradient shape {g.shape} != parameter shape {params.flat.shape}")
    params.adam_t += 1
    t = params.adam_t
    params.adam_m *= beta1
    params.adam_m += (1.0 - beta1) * g
    params.adam_v *= beta2
    params.adam_v += (1.0 - beta2) * g * g
    m_hat = params.adam_m / (1.0 - beta1**t)
    v_hat = params.adam_v / (1.0 - beta2**t)
    params.flat -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params


def soft_update(target: NetworkParams, online: NetworkParams, tau: float) -> NetworkParams:
    """Polyak tracking in place: target <- tau*online + (1-tau)*target."""
    if target.flat.shape != online.flat.shape:
        raise ValueError("target and online parameter vectors differ in shape")
    target.flat *= 1.0 - tau
    target.flat += tau * online.flat
    return target
