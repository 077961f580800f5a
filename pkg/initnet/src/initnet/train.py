"""Training loop, checkpointing, and accuracy reporting."""

from __future__ import annotations

import dataclasses

import numpy as np
import torch
from torch import nn

from .data import CANONICAL_FUNCTIONS, Limits, Sample
from .encoding import encode_sample, program_indices
from .model import InitNet


@dataclasses.dataclass(frozen=True)
class Hyper:
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 5e-4
    embed_size: int = 64
    hidden_size: int = 256
    val_fraction: float = 0.1
    top_k: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")


@dataclasses.dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    token_accuracy: float
    token_top_k: float
    sequence_top_k: float


@dataclasses.dataclass
class TrainResult:
    model: InitNet
    limits: Limits
    steps: int
    history: list[EpochStats]
    best_epoch: int


def encode_dataset(samples: list[Sample], limits: Limits) -> tuple[torch.Tensor, torch.Tensor]:
    """Token and label tensors for a fixed-length, fixed-m dataset."""
    if not samples:
        raise ValueError("no samples to encode")
    steps = samples[0].length
    m = len(samples[0].observed)
    for i, s in enumerate(samples):
        if s.length != steps:
            raise ValueError(
                f"sample {i} has length {s.length}; this model expects {steps}")
        if len(s.observed) != m:
            raise ValueError(
                f"sample {i} has {len(s.observed)} observed examples; expected {m}")
    tokens = torch.from_numpy(
        np.stack([encode_sample(s, limits) for s in samples]))
    labels = torch.tensor([program_indices(s.program) for s in samples],
                          dtype=torch.long)
    return tokens, labels


def _batches(n: int, batch_size: int, order=None):
    idx = np.arange(n) if order is None else order
    for lo in range(0, n, batch_size):
        yield idx[lo:lo + batch_size]


@torch.no_grad()
def _evaluate(model: InitNet, tokens: torch.Tensor, labels: torch.Tensor,
              batch_size: int, k: int) -> tuple[float, dict]:
    """Teacher-forced validation loss plus greedy-decode accuracies."""
    model.eval()
    steps = labels.shape[1]
    ce = nn.CrossEntropyLoss(reduction="sum")
    total_loss = 0.0
    logits_all = []
    for idx in _batches(len(tokens), batch_size):
        toks, labs = tokens[idx], labels[idx]
        forced = model(toks, steps, teacher=labs)
        total_loss += float(ce(forced.reshape(-1, model.num_functions),
                               labs.reshape(-1)))
        logits_all.append(model(toks, steps))
    metrics = accuracies_from_logits(torch.cat(logits_all), labels, k)
    return total_loss / labels.numel(), metrics


def accuracies_from_logits(logits: torch.Tensor, labels: torch.Tensor, k: int) -> dict:
    """Token accuracy, token top-k, and sequence top-k for (N, T, n) logits."""
    top1 = logits.argmax(dim=2)
    token_acc = float((top1 == labels).float().mean())
    ranked = logits.topk(k, dim=2).indices  # (N, T, k)
    in_topk = (ranked == labels.unsqueeze(2)).any(dim=2)  # (N, T)
    token_topk = float(in_topk.float().mean())
    seq_topk = float(in_topk.all(dim=1).float().mean())
    return {"token_accuracy": token_acc,
            f"token_top_{k}": token_topk,
            f"sequence_top_{k}": seq_topk}


def train(samples: list[Sample], limits: Limits, hyper: Hyper) -> TrainResult:
    """Train on a 9:1 split, keeping the lowest-validation-loss epoch."""
    if not samples:
        raise ValueError("cannot train on an empty dataset")
    torch.manual_seed(hyper.seed)
    rng = np.random.default_rng(hyper.seed)

    tokens, labels = encode_dataset(samples, limits)
    steps = labels.shape[1]
    order = rng.permutation(len(samples))
    n_val = max(1, int(round(len(samples) * hyper.val_fraction)))
    if n_val >= len(samples):
        raise ValueError("dataset too small to split")
    val_idx, train_idx = order[:n_val], order[n_val:]

    model = InitNet(num_tokens=limits.num_values + 1,
                    embed_size=hyper.embed_size, hidden_size=hyper.hidden_size)
    optimizer = torch.optim.Adam(model.parameters(), lr=hyper.learning_rate)
    ce = nn.CrossEntropyLoss()

    history: list[EpochStats] = []
    best_epoch = 0
    best_val = float("inf")
    best_state = None
    for epoch in range(1, hyper.epochs + 1):
        model.train()
        epoch_order = train_idx[rng.permutation(len(train_idx))]
        running = 0.0
        seen = 0
        for idx in _batches(len(train_idx), hyper.batch_size, epoch_order):
            toks, labs = tokens[idx], labels[idx]
            optimizer.zero_grad()
            logits = model(toks, steps, teacher=labs)
            loss = ce(logits.reshape(-1, model.num_functions), labs.reshape(-1))
            loss.backward()
            optimizer.step()
            running += loss.item() * len(idx)
            seen += len(idx)
        val_loss, metrics = _evaluate(model, tokens[val_idx], labels[val_idx],
                                      hyper.batch_size, hyper.top_k)
        history.append(EpochStats(
            epoch=epoch, train_loss=running / seen, val_loss=val_loss,
            token_accuracy=metrics["token_accuracy"],
            token_top_k=metrics[f"token_top_{hyper.top_k}"],
            sequence_top_k=metrics[f"sequence_top_{hyper.top_k}"]))
        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
    model.load_state_dict(best_state)
    model.eval()
    return TrainResult(model=model, limits=limits, steps=steps,
                       history=history, best_epoch=best_epoch)


def report_accuracies(model: InitNet, samples: list[Sample], limits: Limits,
                      k: int = 5, batch_size: int = 32) -> dict:
    """Greedy-decode accuracy metrics over a labeled dataset."""
    tokens, labels = encode_dataset(samples, limits)
    model.eval()
    logits_all = []
    with torch.no_grad():
        for idx in _batches(len(tokens), batch_size):
            logits_all.append(model(tokens[idx], labels.shape[1]))
    return accuracies_from_logits(torch.cat(logits_all), labels, k)


def save_checkpoint(path, result: TrainResult) -> None:
    torch.save({
        "state_dict": result.model.state_dict(),
        "num_tokens": result.model.num_tokens,
        "num_functions": result.model.num_functions,
        "embed_size": result.model.embed_size,
        "hidden_size": result.model.hidden_size,
        "steps": result.steps,
        "limits": dataclasses.asdict(result.limits),
        "functions": CANONICAL_FUNCTIONS,
        "best_epoch": result.best_epoch,
        "history": [dataclasses.asdict(e) for e in result.history],
    }, path)


def load_checkpoint(path) -> tuple[InitNet, Limits, int]:
    """Restore (model, limits, steps) from a checkpoint file."""
    payload = torch.load(path, weights_only=True)
    if payload.get("functions") != CANONICAL_FUNCTIONS:
        raise ValueError(f"{path}: checkpoint uses a different function set")
    model = InitNet(num_tokens=payload["num_tokens"],
                    num_functions=payload["num_functions"],
                    embed_size=payload["embed_size"],
                    hidden_size=payload["hidden_size"])
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, Limits(**payload["limits"]), payload["steps"]
