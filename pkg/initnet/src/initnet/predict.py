"""Logit prediction and export in the synthesizer's interchange format."""

from __future__ import annotations

import numpy as np
import torch

from .data import Limits, Sample, write_logits_file
from .encoding import encode_sample
from .model import InitNet


@torch.no_grad()
def predict_logits(model: InitNet, sample: Sample, limits: Limits) -> np.ndarray:
    """Greedy-decoded (T, n) logits pooled over the sample's examples."""
    model.eval()
    tokens = torch.from_numpy(encode_sample(sample, limits)).unsqueeze(0)
    logits = model(tokens, sample.length)
    return logits.squeeze(0).numpy().astype(np.float64)


def export_logits(model: InitNet, samples: list[Sample], limits: Limits,
                  path) -> None:
    """One logit record per sample, aligned with the dataset order."""
    write_logits_file([predict_logits(model, s, limits) for s in samples], path)
