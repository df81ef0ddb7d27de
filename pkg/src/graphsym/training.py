"""Training of graph-property classifiers with the quantum natural gradient.

The model maps a graph to its graph state, runs the circuit, and reads out
the mean magnetization (1/n) sum_i Z_i, an observable invariant under both
full and cyclic qubit relabelings, so the symmetric templates are exactly
invariant models.  Classification is by sign, with a configurable
near-zero band that counts as a miss.

Gradients and the Fubini-Study metric come from the same set of exact
derivative states; the update is

    theta <- theta - lr * solve(metric + reg * I, grad)

via a symmetric positive-definite solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .ansatz import ANSATZ_KINDS, CircuitIR, build_ansatz
from .graphs import Dataset, Graph, GraphSample
from .simulator import (
    apply_circuit,
    evolve_with_derivatives,
    expectation_mean_z,
    mean_z_weights,
    prepare_graph_state,
    prepare_graph_states,
)

__all__ = [
    "TrainConfig",
    "MetricTensor",
    "RunRecord",
    "NaturalGradientError",
    "NEAR_ZERO",
    "predict",
    "predict_batch",
    "loss_mse",
    "gradient",
    "fubini_study_metric",
    "qng_step",
    "classify",
    "classify_batch",
    "accuracy",
    "near_zero_fraction",
    "train_run",
    "aggregate_seeds",
]

NEAR_ZERO = 0

DEFAULT_SEEDS = tuple(range(10))


class NaturalGradientError(RuntimeError):
    """Raised when the regularized metric solve fails."""


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    metric_regularizer: float = 1e-3
    epochs: int = 50
    train_per_epoch: int = 100
    minibatch: int = 10
    near_zero_epsilon: float = 0.01
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    block_diagonal_metric: bool = False

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.metric_regularizer < 0:
            raise ValueError("metric_regularizer must be nonnegative")
        if self.epochs < 1 or self.train_per_epoch < 1:
            raise ValueError("epochs and train_per_epoch must be positive")
        if self.train_per_epoch % self.minibatch:
            raise ValueError("minibatch must divide train_per_epoch")
        if self.near_zero_epsilon < 0:
            raise ValueError("near_zero_epsilon must be nonnegative")


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric positive-semidefinite parameter-space metric."""

    entries: np.ndarray

    @property
    def n_params(self) -> int:
        return self.entries.shape[0]


@dataclass
class RunRecord:
    """Per-epoch statistics of one (ansatz, seed) training run."""

    seed: int
    ansatz_kind: str
    loss: np.ndarray = field(default_factory=lambda: np.array([]))
    train_acc: np.ndarray = field(default_factory=lambda: np.array([]))
    val_acc: np.ndarray = field(default_factory=lambda: np.array([]))
    near_zero_frac: np.ndarray = field(default_factory=lambda: np.array([]))

    @property
    def n_epochs(self) -> int:
        return len(self.val_acc)


def predict(circuit: CircuitIR, params: Sequence[float], g: Graph) -> float:
    """Mean-magnetization readout of the circuit on the graph's state."""
    if circuit.n_qubits != g.n:
        raise ValueError(f"graph has {g.n} nodes, circuit wants {circuit.n_qubits}")
    state = apply_circuit(circuit, params, prepare_graph_state(g))
    return float(expectation_mean_z(state))


def predict_batch(
    circuit: CircuitIR, params: Sequence[float], states: np.ndarray
) -> np.ndarray:
    """Readout for a batch of prepared input states, shape (..., 2^n)."""
    return np.asarray(expectation_mean_z(apply_circuit(circuit, params, states)))


def loss_mse(predictions: Sequence[float], labels: Sequence[float]) -> float:
    """Mean squared error between readouts and +-1 labels."""
    preds = np.asarray(predictions, dtype=float)
    ys = np.asarray(labels, dtype=float)
    if preds.shape != ys.shape:
        raise ValueError("predictions and labels must have equal length")
    if preds.size == 0:
        raise ValueError("empty batch")
    return float(np.mean((preds - ys) ** 2))


def _readout_overlaps(
    circuit: CircuitIR, params: Sequence[float], states: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Shared forward pass: psi, derivative states, readouts, d readout / d theta.

    ``states`` has shape (B, 2^n); returns derivs transposed to (B, P, 2^n)
    and dpred with shape (B, P).
    """
    psi, derivs = evolve_with_derivatives(circuit, params, states)
    weighted = psi * mean_z_weights(circuit.n_qubits)
    derivs_b = derivs.transpose(1, 0, 2)  # (B, P, D)
    preds = np.asarray(expectation_mean_z(psi))
    # d<O>/d theta_j = 2 Re <d_j psi | O | psi>
    dpred = 2.0 * (derivs_b.conj() @ weighted[:, :, None])[..., 0].real
    return psi, derivs_b, preds, dpred


def _metric_from_derivs(psi: np.ndarray, derivs_b: np.ndarray) -> np.ndarray:
    """Batch-mean Fubini-Study metric from derivative states."""
    gram = (derivs_b.conj() @ derivs_b.swapaxes(1, 2)).real  # (B, P, P)
    overlap = (derivs_b.conj() @ psi[:, :, None])[..., 0]  # (B, P)
    correction = (overlap[:, :, None] * overlap.conj()[:, None, :]).real
    return (gram - correction).mean(axis=0)


def gradient(
    circuit: CircuitIR, params: Sequence[float], batch: Sequence[GraphSample]
) -> np.ndarray:
    """Exact gradient of the minibatch MSE loss."""
    states = prepare_graph_states([s.graph for s in batch])
    labels = np.array([s.label for s in batch], dtype=float)
    _, _, preds, dpred = _readout_overlaps(circuit, params, states)
    return (2.0 / len(batch)) * (dpred.T @ (preds - labels))


def fubini_study_metric(
    circuit: CircuitIR, params: Sequence[float], input_state: np.ndarray
) -> MetricTensor:
    """Fubini-Study metric g_jk = Re(<d_j psi|d_k psi> - <d_j psi|psi><psi|d_k psi>).

    Accepts a single state or a batch (leading axis); the batch metric is
    the mean of the per-input metrics.
    """
    states = np.asarray(input_state, dtype=complex)
    if states.ndim == 1:
        states = states[None, :]
    psi, derivs = evolve_with_derivatives(circuit, params, states)
    return MetricTensor(_metric_from_derivs(psi, derivs.transpose(1, 0, 2)))


def _layer_block_mask(circuit: CircuitIR) -> np.ndarray:
    mask = np.zeros((circuit.n_params, circuit.n_params))
    for start, stop in circuit.layer_spans:
        mask[start:stop, start:stop] = 1.0
    return mask


def qng_step(
    params: np.ndarray,
    grad: np.ndarray,
    metric: MetricTensor | np.ndarray,
    config: TrainConfig,
) -> np.ndarray:
    """One natural-gradient update through an SPD solve of metric + reg*I."""
    entries = metric.entries if isinstance(metric, MetricTensor) else np.asarray(metric)
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if entries.shape != (params.size, params.size) or grad.shape != params.shape:
        raise ValueError("parameter, gradient and metric shapes disagree")
    system = entries + config.metric_regularizer * np.eye(params.size)
    try:
        factor = scipy.linalg.cho_factor(system, check_finite=False)
        step = scipy.linalg.cho_solve(factor, grad, check_finite=False)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise NaturalGradientError(
            f"metric solve failed (regularizer={config.metric_regularizer})"
        ) from exc
    return params - config.learning_rate * step


def classify(prediction: float, epsilon: float = 0.01) -> int:
    """Three-way sign classification: +1, -1, or NEAR_ZERO inside the band."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if prediction > epsilon:
        return 1
    if prediction < -epsilon:
        return -1
    return NEAR_ZERO


def classify_batch(predictions: np.ndarray, epsilon: float = 0.01) -> np.ndarray:
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    preds = np.asarray(predictions)
    return np.where(preds > epsilon, 1, np.where(preds < -epsilon, -1, NEAR_ZERO))


def accuracy(predictions: np.ndarray, labels: np.ndarray, epsilon: float) -> float:
    """Fraction classified to the true label; near-zero outputs count as wrong."""
    return float(np.mean(classify_batch(predictions, epsilon) == np.asarray(labels)))


def near_zero_fraction(predictions: np.ndarray, epsilon: float) -> float:
    return float(np.mean(classify_batch(predictions, epsilon) == NEAR_ZERO))


def train_run(
    ansatz_kind: str,
    property_name: str,
    dataset: Dataset,
    config: TrainConfig,
    seed: int,
) -> RunRecord:
    """One full training run, deterministic given the seed.

    Parameters start uniform in (-0.1, 0.1).  Each epoch reshuffles the
    training pool, takes one natural-gradient step per minibatch, then
    scores the training pool and the validation remainder.
    """
    config.validate()
    if ansatz_kind not in ANSATZ_KINDS:
        raise ValueError(f"unknown ansatz kind {ansatz_kind!r}")
    if dataset.property != property_name:
        raise ValueError(
            f"dataset was built for {dataset.property!r}, not {property_name!r}"
        )
    if len(dataset.samples) <= config.train_per_epoch:
        raise ValueError("dataset leaves no validation remainder")
    n = dataset.n
    circuit = build_ansatz(ansatz_kind, n)
    rng = np.random.default_rng(seed)
    params = rng.uniform(-0.1, 0.1, circuit.n_params)

    train_samples = dataset.samples[: config.train_per_epoch]
    val_samples = dataset.samples[config.train_per_epoch :]
    train_states = prepare_graph_states([s.graph for s in train_samples])
    train_labels = np.array([s.label for s in train_samples], dtype=float)
    val_states = prepare_graph_states([s.graph for s in val_samples])
    val_labels = np.array([s.label for s in val_samples], dtype=float)

    block_mask = _layer_block_mask(circuit) if config.block_diagonal_metric else None
    eps = config.near_zero_epsilon
    losses, train_accs, val_accs, near_fracs = [], [], [], []
    for _ in range(config.epochs):
        order = rng.permutation(config.train_per_epoch)
        for start in range(0, config.train_per_epoch, config.minibatch):
            chunk = order[start : start + config.minibatch]
            states = train_states[chunk]
            labels = train_labels[chunk]
            psi, derivs_b, preds, dpred = _readout_overlaps(circuit, params, states)
            grad = (2.0 / len(chunk)) * (dpred.T @ (preds - labels))
            entries = _metric_from_derivs(psi, derivs_b)
            if block_mask is not None:
                entries = entries * block_mask
            params = qng_step(params, grad, MetricTensor(entries), config)
        train_preds = predict_batch(circuit, params, train_states)
        val_preds = predict_batch(circuit, params, val_states)
        losses.append(loss_mse(train_preds, train_labels))
        train_accs.append(accuracy(train_preds, train_labels, eps))
        val_accs.append(accuracy(val_preds, val_labels, eps))
        near_fracs.append(near_zero_fraction(val_preds, eps))
    return RunRecord(
        seed=seed,
        ansatz_kind=ansatz_kind,
        loss=np.array(losses),
        train_acc=np.array(train_accs),
        val_acc=np.array(val_accs),
        near_zero_frac=np.array(near_fracs),
    )


def aggregate_seeds(records: Sequence[RunRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Per-epoch mean validation accuracy and normal-approximation 95% half-width."""
    if len(records) < 2:
        raise ValueError("aggregation needs at least two runs")
    epochs = records[0].n_epochs
    if any(r.n_epochs != epochs for r in records):
        raise ValueError("all runs must have the same epoch count")
    table = np.stack([r.val_acc for r in records])  # (seeds, epochs)
    mean = table.mean(axis=0)
    ci95 = 1.96 * table.std(axis=0, ddof=1) / np.sqrt(len(records))
    return mean, ci95
