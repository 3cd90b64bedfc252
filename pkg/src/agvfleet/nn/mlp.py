"""Fully connected network with ReLU hidden layers and exact backward pass."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import NetworkParams, ParamLayout

__all__ = ["MlpSpec", "mlp_layout", "mlp_init", "mlp_forward", "mlp_backward", "MlpCache"]


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths (input, hidden..., output) plus the output activation.

    Hidden activations are ReLU. The output activation is "tanh" for actors
    (action components live in (-1, 1)) or "identity" for critics.
    """

    widths: tuple[int, ...]
    output_activation: str = "identity"

    def __post_init__(self) -> None:
        if len(self.widths) < 3:
            raise ValueError("need at least one hidden layer")
        if any(w < 1 for w in self.widths):
            raise ValueError("layer widths must be positive")
        if self.output_activation not in ("tanh", "identity"):
            raise ValueError("output_activation must be 'tanh' or 'identity'")

    @property
    def n_layers(self) -> int:
        return len(self.widths) - 1

    @property
    def input_width(self) -> int:
        return self.widths[0]

    @property
    def output_width(self) -> int:
        return self.widths[-1]


def mlp_layout(spec: MlpSpec) -> ParamLayout:
    entries = []
    for k in range(spec.n_layers):
        entries.append((f"w{k}", (spec.widths[k], spec.widths[k + 1])))
        entries.append((f"b{k}", (spec.widths[k + 1],)))
    return ParamLayout.of(entries)


def mlp_init(spec: MlpSpec, rng: np.random.Generator) -> NetworkParams:
    """Uniform fan-in initialization: entries in +-1/sqrt(fan_in)."""
    params = NetworkParams(mlp_layout(spec))
    for k in range(spec.n_layers):
        bound = 1.0 / np.sqrt(spec.widths[k])
        params[f"w{k}"][:] = rng.uniform(-bound, bound, size=params[f"w{k}"].shape)
        params[f"b{k}"][:] = rng.uniform(-bound, bound, size=params[f"b{k}"].shape)
    return params


@dataclass
class MlpCache:
    """Activations recorded by a forward pass, sufficient for exact backward."""

    spec: MlpSpec
    inputs: list[np.ndarray]   # layer inputs, inputs[k] feeds layer k
    pre_acts: list[np.ndarray]  # affine outputs z_k before activation
    output: np.ndarray


def mlp_forward(
    spec: MlpSpec, params: NetworkParams, x: np.ndarray
) -> tuple[np.ndarray, MlpCache]:
    """Batched forward pass; x has shape (batch, input_width)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.input_width:
        raise ValueError(f"expected input of shape (batch, {spec.input_width}), got {x.shape}")
    inputs = []
    pre_acts = []
    h = x
    for k in range(spec.n_layers):
        inputs.append(h)
        z = h @ params[f"w{k}"] + params[f"b{k}"]
        pre_acts.append(z)
        if k < spec.n_layers - 1:
            h = np.maximum(z, 0.0)
        elif spec.output_activation == "tanh":
            h = np.tanh(z)
        else:
            h = z
    return h, MlpCache(spec, inputs, pre_acts, h)


def mlp_backward(
    cache: MlpCache, params: NetworkParams, d_output: np.ndarray
) -> tuple[np.ndarray, NetworkParams]:
    """Exact reverse-mode gradients from an upstream output gradient.

    Returns (gradient w.r.t. the input batch, parameter gradients in a
    layout-aligned container).
    """
    spec = cache.spec
    grads = params.grad_like()
    d = np.asarray(d_output, dtype=np.float64)
    if d.shape != cache.output.shape:
        raise ValueError(f"output gradient shape {d.shape} != {cache.output.shape}")
    for k in reversed(range(spec.n_layers)):
        if k == spec.n_layers - 1:
            if spec.output_activation == "tanh":
                dz = d * (1.0 - cache.output**2)
            else:
                dz = d
        else:
            dz = d * (cache.pre_acts[k] > 0.0)
        grads[f"w{k}"][:] = cache.inputs[k].T @ dz
        grads[f"b{k}"][:] = dz.sum(axis=0)
        d = dz @ params[f"w{k}"].T
    return d, grads
