"""Neural initializer for the gradient synthesizer.

Trains an attention-based sequence-to-sequence network to predict, from a
sample's I/O examples, per-step function logits that seed the synthesizer's
first descent.  Talks to the synthesizer only through its file formats
(datasets in, logit files out) and its command line.
"""

from .data import CANONICAL_FUNCTIONS, Limits, Sample, read_dataset, write_logits_file
from .encoding import encode_pair, encode_sample, encode_value, program_indices
from .model import InitNet
from .predict import export_logits, predict_logits
from .train import Hyper, load_checkpoint, report_accuracies, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_FUNCTIONS",
    "Hyper",
    "InitNet",
    "Limits",
    "Sample",
    "encode_pair",
    "encode_sample",
    "encode_value",
    "export_logits",
    "load_checkpoint",
    "predict_logits",
    "program_indices",
    "read_dataset",
    "report_accuracies",
    "save_checkpoint",
    "train",
    "write_logits_file",
    "__version__",
]
