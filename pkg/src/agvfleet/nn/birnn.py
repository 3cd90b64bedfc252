"""Bidirectional recurrent network over the agent sequence, parameters shared.

Per agent: a 4-layer fully connected encoder feeds two vanilla tanh
recurrences — one running over agents in index order, one in reverse — and a
4-layer fully connected decoder consumes the concatenated hidden states of
both directions. All layers are shared across sequence positions, so the
parameter count does not depend on the number of agents. The backward pass
is exact backprop through time over the agent axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import NetworkParams, ParamLayout

__all__ = ["BiRnnSpec", "birnn_layout", "birnn_init", "birnn_forward", "birnn_backward", "BiRnnCache"]

_N_ENC = 4
_N_DEC = 4


@dataclass(frozen=True)
class BiRnnSpec:
    """Widths of the encoder stack, recurrent state, and decoder stack."""

    input_width: int
    output_width: int
    output_activation: str = "identity"
    encoder_width: int = 64
    hidden_width: int = 64
    decoder_width: int = 64

    def __post_init__(self) -> None:
        if min(self.input_width, self.output_width, self.encoder_width,
               self.hidden_width, self.decoder_width) < 1:
            raise ValueError("all widths must be positive")
        if self.output_activation not in ("tanh", "identity"):
            raise ValueError("output_activation must be 'tanh' or 'identity'")

    def encoder_widths(self) -> tuple[int, ...]:
        return (self.input_width,) + (self.encoder_width,) * _N_ENC

    def decoder_widths(self) -> tuple[int, ...]:
        return (2 * self.hidden_width,) + (self.decoder_width,) * (_N_DEC - 1) + (self.output_width,)


def birnn_layout(spec: BiRnnSpec) -> ParamLayout:
    entries: list[tuple[str, tuple[int, ...]]] = []
    enc = spec.encoder_widths()
    for k in range(_N_ENC):
        entries.append((f"enc_w{k}", (enc[k], enc[k + 1])))
        entries.append((f"enc_b{k}", (enc[k + 1],)))
    for tag in ("fwd", "bwd"):
        entries.append((f"u_{tag}", (spec.encoder_width, spec.hidden_width)))
        entries.append((f"w_{tag}", (spec.hidden_width, spec.hidden_width)))
        entries.append((f"b_{tag}", (spec.hidden_width,)))
    dec = spec.decoder_widths()
    for k in range(_N_DEC):
        entries.append((f"dec_w{k}", (dec[k], dec[k + 1])))
        entries.append((f"dec_b{k}", (dec[k + 1],)))
    return ParamLayout.of(entries)


def birnn_init(spec: BiRnnSpec, rng: np.random.Generator) -> NetworkParams:
    """Uniform fan-in initialization for every weight matrix and bias."""
    params = NetworkParams(birnn_layout(spec))
    for name, shape in params.layout.entries:
        if name.startswith("b") or name.startswith(("enc_b", "dec_b")):
            fan_in = _bias_fan_in(spec, name)
        else:
            fan_in = shape[0]
        bound = 1.0 / np.sqrt(fan_in)
        params[name][:] = rng.uniform(-bound, bound, size=shape)
    return params


def _bias_fan_in(spec: BiRnnSpec, name: str) -> int:
    enc = spec.encoder_widths()
    dec = spec.decoder_widths()
    if name.startswith("enc_b"):
        return enc[int(name[-1])]
    if name.startswith("dec_b"):
        return dec[int(name[-1])]
    return spec.hidden_width  # recurrent biases


@dataclass
class BiRnnCache:
    """Forward-pass activations needed for exact backprop through time."""

    spec: BiRnnSpec
    batch: int
    n_seq: int
    enc_inputs: list[np.ndarray]
    enc_pre: list[np.ndarray]
    encoded: np.ndarray     # (B, n, E)
    h_fwd: np.ndarray       # (B, n, H)
    h_bwd: np.ndarray       # (B, n, H)
    dec_inputs: list[np.ndarray]
    dec_pre: list[np.ndarray]
    output: np.ndarray      # (B, n, out)


def birnn_forward(
    spec: BiRnnSpec, params: NetworkParams, x: np.ndarray
) -> tuple[np.ndarray, BiRnnCache]:
    """Forward pass over a batch of agent sequences, x shape (batch, n, input)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != spec.input_width:
        raise ValueError(f"expected input (batch, n, {spec.input_width}), got {x.shape}")
    batch, n, _ = x.shape

    h = x.reshape(batch * n, spec.input_width)
    enc_inputs, enc_pre = [], []
    for k in range(_N_ENC):
        enc_inputs.append(h)
        z = h @ params[f"enc_w{k}"] + params[f"enc_b{k}"]
        enc_pre.append(z)
        h = np.maximum(z, 0.0)
    encoded = h.reshape(batch, n, spec.encoder_width)

    hid = spec.hidden_width
    h_fwd = np.empty((batch, n, hid))
    prev = np.zeros((batch, hid))
    for t in range(n):
        prev = np.tanh(encoded[:, t] @ params["u_fwd"] + prev @ params["w_fwd"] + params["b_fwd"])
        h_fwd[:, t] = prev
    h_bwd = np.empty((batch, n, hid))
    prev = np.zeros((batch, hid))
    for t in reversed(range(n)):
        prev = np.tanh(encoded[:, t] @ params["u_bwd"] + prev @ params["w_bwd"] + params["b_bwd"])
        h_bwd[:, t] = prev

    h = np.concatenate([h_fwd, h_bwd], axis=2).reshape(batch * n, 2 * hid)
    dec_inputs, dec_pre = [], []
    for k in range(_N_DEC):
        dec_inputs.append(h)
        z = h @ params[f"dec_w{k}"] + params[f"dec_b{k}"]
        dec_pre.append(z)
        if k < _N_DEC - 1:
            h = np.maximum(z, 0.0)
        elif spec.output_activation == "tanh":
            h = np.tanh(z)
        else:
            h = z
    output = h.reshape(batch, n, spec.output_width)
    return output, BiRnnCache(
        spec, batch, n, enc_inputs, enc_pre, encoded, h_fwd, h_bwd,
        dec_inputs, dec_pre, output,
    )


def birnn_backward(
    cache: BiRnnCache, params: NetworkParams, d_output: np.ndarray
) -> tuple[np.ndarray, NetworkParams]:
    """Exact gradients for a (batch, n, output)-shaped upstream gradient.

    Shared parameters accumulate across sequence positions. Returns
    (gradient w.r.t. the input, parameter gradients).
    """
    spec = cache.spec
    batch, n = cache.batch, cache.n_seq
    hid = spec.hidden_width
    grads = params.grad_like()

    d = np.asarray(d_output, dtype=np.float64)
    if d.shape != cache.output.shape:
        raise ValueError(f"output gradient shape {d.shape} != {cache.output.shape}")
    d = d.reshape(batch * n, spec.output_width)

    flat_out = cache.output.reshape(batch * n, spec.output_width)
    for k in reversed(range(_N_DEC)):
        if k == _N_DEC - 1:
            dz = d * (1.0 - flat_out**2) if spec.output_activation == "tanh" else d
        else:
            dz = d * (cache.dec_pre[k] > 0.0)
        grads[f"dec_w{k}"][:] += cache.dec_inputs[k].T @ dz
        grads[f"dec_b{k}"][:] += dz.sum(axis=0)
        d = dz @ params[f"dec_w{k}"].T
    d_states = d.reshape(batch, n, 2 * hid)
    d_hf, d_hb = d_states[:, :, :hid], d_states[:, :, hid:]

    d_encoded = np.zeros_like(cache.encoded)
    carry = np.zeros((batch, hid))
    for t in reversed(range(n)):
        dh = d_hf[:, t] + carry
        dz = dh * (1.0 - cache.h_fwd[:, t] ** 2)
        h_prev = cache.h_fwd[:, t - 1] if t > 0 else np.zeros((batch, hid))
        grads["u_fwd"][:] += cache.encoded[:, t].T @ dz
        grads["w_fwd"][:] += h_prev.T @ dz
        grads["b_fwd"][:] += dz.sum(axis=0)
        d_encoded[:, t] += dz @ params["u_fwd"].T
        carry = dz @ params["w_fwd"].T
    carry = np.zeros((batch, hid))
    for t in range(n):
        dh = d_hb[:, t] + carry
        dz = dh * (1.0 - cache.h_bwd[:, t] ** 2)
        h_next = cache.h_bwd[:, t + 1] if t < n - 1 else np.zeros((batch, hid))
        grads["u_bwd"][:] += cache.encoded[:, t].T @ dz
        grads["w_bwd"][:] += h_next.T @ dz
        grads["b_bwd"][:] += dz.sum(axis=0)
        d_encoded[:, t] += dz @ params["u_bwd"].T
        carry = dz @ params["w_bwd"].T

    d = d_encoded.reshape(batch * n, spec.encoder_width)
    for k in reversed(range(_N_ENC)):
        dz = d * (cache.enc_pre[k] > 0.0)
        grads[f"enc_w{k}"][:] += cache.enc_inputs[k].T @ dz
        grads[f"enc_b{k}"][:] += dz.sum(axis=0)
        d = dz @ params[f"enc_w{k}"].T
    return d.reshape(batch, n, spec.input_width), grads
