"""Symmetric fully-connected autoencoder with hand-derived gradients.

The network applies M nonlinear layers (M even): the first M/2 form the
encoder, whose final output is the low-dimensional code, and the last M/2
form the decoder producing the reconstruction.  Layer m computes
``z_m = g_m(W_m z_{m-1} + b_m)`` with ``W_m`` of shape
``(dims[m], dims[m-1])``.  Batches are row-major: one sample per row, so the
batch form of a layer is ``Z_m = g_m(Z_{m-1} W_m^T + b_m)``.

Gradients of the joint loss (reconstruction + weighted intra-class distance
of the codes + L2 regularizer) are computed by two backward recursions: a
reconstruction signal flowing from the output layer through every layer, and
a cluster-constraint signal that is injected at the code layer and flows
only through the encoder.  The constraint signal is structurally zero for
decoder layers, represented as ``None``.  Cluster assignments and centers
are treated as constants here; they are updated elsewhere in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import ActivationKind, apply, derivative
from .linalg import ShapeMismatchError
from .seeding import substream


@dataclass
class NetworkParams:
    """Layer widths, weights, biases, and activation choices."""

    dims: list[int]
    weights: list[np.ndarray]          # weights[i] maps layer i to layer i+1
    biases: list[np.ndarray]
    enc_activation: ActivationKind
    dec_activation: ActivationKind

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def code_dim(self) -> int:
        return self.dims[len(self.dims) // 2]

    def layer_activation(self, m: int) -> ActivationKind:
        """Activation of 1-indexed layer m (encoder half vs decoder half)."""
        return self.enc_activation if m <= self.num_layers // 2 else self.dec_activation


@dataclass
class ForwardTrace:
    """Per-layer pre-activations and activations for one batch.

    activations[0] is the input batch, activations[m] the output of layer m;
    pre_activations[m-1] is the affine input to layer m.
    """

    pre_activations: list[np.ndarray]
    activations: list[np.ndarray]

    @property
    def code(self) -> np.ndarray:
        return self.activations[len(self.pre_activations) // 2]

    @property
    def reconstruction(self) -> np.ndarray:
        return self.activations[-1]


@dataclass
class Gradients:
    d_weights: list[np.ndarray]
    d_biases: list[np.ndarray]


def mirror_dims(encoder_dims: list[int]) -> list[int]:
    """Expand encoder widths [D, d1, ..., dk] to the full symmetric net."""
    if len(encoder_dims) < 2:
        raise ValueError("need at least an input width and one encoder width")
    return list(encoder_dims) + list(reversed(encoder_dims[:-1]))


def validate_dims(dims: list[int]) -> None:
    m = len(dims) - 1
    if m < 2 or m % 2 != 0:
        raise ValueError(f"layer count must be even and >= 2, got M={m}")
    if any(d < 1 for d in dims):
        raise ValueError(f"layer widths must be positive, got {dims}")
    if dims[0] != dims[-1]:
        raise ValueError(
            f"input and output widths must match, got {dims[0]} vs {dims[-1]}"
        )
    half = m // 2
    for i in range(1, half + 1):
        if dims[i] > dims[i - 1]:
            raise ValueError(
                f"encoder widths must be non-increasing, got {dims[:half + 1]}"
            )
    for j in range(half + 1, m + 1):
        if dims[j] < dims[j - 1]:
            raise ValueError(
                f"decoder widths must be non-decreasing, got {dims[half:]}"
            )


def init(
    dims: list[int],
    enc_activation: ActivationKind,
    dec_activation: ActivationKind,
    seed: int,
) -> NetworkParams:
    """Fan-based uniform weight init, zero biases, deterministic from seed."""
    validate_dims(dims)
    rng = substream(seed, "init")
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(list(dims), weights, biases, enc_activation, dec_activation)


def forward(params: NetworkParams, batch: np.ndarray) -> ForwardTrace:
    if batch.ndim != 2 or batch.shape[1] != params.dims[0]:
        raise ShapeMismatchError(
            f"forward: batch of shape {batch.shape} does not match input "
            f"width {params.dims[0]}"
        )
    pre, acts = [], [batch]
    z = batch
    for m, (w, b) in enumerate(zip(params.weights, params.biases), start=1):
        y = z @ w.T + b
        z = apply(params.layer_activation(m), y)
        pre.append(y)
        acts.append(z)
    return ForwardTrace(pre, acts)


def reconstruction_deltas(params: NetworkParams, trace: ForwardTrace) -> list[np.ndarray]:
    """Backward signal of the reconstruction error, one N x dims[m] array per layer."""
    m_total = params.num_layers
    z, y = trace.activations, trace.pre_activations
    deltas: list[np.ndarray] = [None] * m_total  # type: ignore[list-item]
    deltas[m_total - 1] = -(z[0] - z[m_total]) * derivative(
        params.layer_activation(m_total), y[m_total - 1]
    )
    for m in range(m_total - 1, 0, -1):
        deltas[m - 1] = (deltas[m] @ params.weights[m]) * derivative(
            params.layer_activation(m), y[m - 1]
        )
    return deltas


def constraint_deltas(
    params: NetworkParams,
    trace: ForwardTrace,
    assignments: np.ndarray,
    centers: np.ndarray,
) -> list:
    """Backward signal of the intra-class distance term.

    Injected at the code layer as (code - assigned center) scaled by the
    activation derivative, then propagated through the encoder only.
    Decoder entries are structurally zero and returned as None.
    """
    m_total = params.num_layers
    half = m_total // 2
    z, y = trace.activations, trace.pre_activations
    n = z[0].shape[0]
    if assignments.shape[0] != n or assignments.shape[1] != centers.shape[1]:
        raise ShapeMismatchError(
            f"constraint_deltas: assignments {assignments.shape} do not match "
            f"batch size {n} and centers {centers.shape}"
        )
    if centers.shape[0] != params.code_dim:
        raise ShapeMismatchError(
            f"constraint_deltas: centers {centers.shape} do not match code "
            f"width {params.code_dim}"
        )
    lams: list = [None] * m_total
    lams[half - 1] = (z[half] - assignments @ centers.T) * derivative(
        params.enc_activation, y[half - 1]
    )
    for m in range(half - 1, 0, -1):
        lams[m - 1] = (lams[m] @ params.weights[m]) * derivative(
            params.enc_activation, y[m - 1]
        )
    return lams


def backward(
    params: NetworkParams,
    trace: ForwardTrace,
    assignments: np.ndarray | None,
    centers: np.ndarray | None,
    lambda1: float,
    lambda2: float,
) -> Gradients:
    """Gradients of the joint loss summed over the batch.

    The loss is the half-scaled sum of squared reconstruction errors, plus
    lambda1/2 times the squared distance of each code to its assigned
    center, plus lambda2/2 times the squared norms of all weights and
    biases.  The regularizer contributes once per call, not per sample.
    With lambda1 == 0 the constraint path is skipped entirely and
    assignments/centers may be None.
    """
    deltas = reconstruction_deltas(params, trace)
    lams = None
    if lambda1 != 0.0:
        if assignments is None or centers is None:
            raise ValueError("backward: lambda1 != 0 requires assignments and centers")
        lams = constraint_deltas(params, trace, assignments, centers)
    d_weights, d_biases = [], []
    for m in range(1, params.num_layers + 1):
        err = deltas[m - 1]
        if lams is not None and lams[m - 1] is not None:
            err = err + lambda1 * lams[m - 1]
        d_weights.append(err.T @ trace.activations[m - 1] + lambda2 * params.weights[m - 1])
        d_biases.append(err.sum(axis=0) + lambda2 * params.biases[m - 1])
    return Gradients(d_weights, d_biases)


def apply_update(params: NetworkParams, grads: Gradients, lr: float) -> None:
    """One gradient-descent step, in place."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    for w, dw in zip(params.weights, grads.d_weights):
        w -= lr * dw
    for b, db in zip(params.biases, grads.d_biases):
        b -= lr * db
