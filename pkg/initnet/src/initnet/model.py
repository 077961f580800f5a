"""Attention-based encoder/decoder over example token sequences.

Each of a sample's m example sequences runs through an embedding and a
bidirectional recurrent encoder.  A unidirectional recurrent decoder
starts from a zero state — it sees the encoder only through attention —
and emits one function distribution per program step.  The m per-example
logits are averaged into a single (T, n) matrix per sample, both for the
training loss and for export.
"""

from __future__ import annotations

import torch
from torch import nn

from .data import CANONICAL_FUNCTIONS


class InitNet(nn.Module):
    def __init__(self, num_tokens: int, num_functions: int = len(CANONICAL_FUNCTIONS),
                 embed_size: int = 64, hidden_size: int = 256):
        super().__init__()
        self.num_tokens = num_tokens
        self.num_functions = num_functions
        self.embed_size = embed_size
        self.hidden_size = hidden_size
        self.start_token = num_functions

        self.token_embed = nn.Embedding(num_tokens, embed_size)
        self.encoder = nn.GRU(embed_size, hidden_size, batch_first=True,
                              bidirectional=True)
        self.func_embed = nn.Embedding(num_functions + 1, embed_size)
        self.decoder = nn.GRUCell(embed_size + 2 * hidden_size, hidden_size)
        self.attn_query = nn.Linear(hidden_size, 2 * hidden_size)
        self.out = nn.Linear(hidden_size + 2 * hidden_size, num_functions)

    def forward(self, tokens: torch.Tensor, steps: int,
                teacher: torch.Tensor | None = None) -> torch.Tensor:
        """Pooled per-step logits for a batch of samples.

        tokens: (batch, m, seq) int64.  teacher: (batch, steps) int64 labels
        fed as the previous token (teacher forcing); without it the pooled
        argmax is fed back (greedy decoding).  Returns (batch, steps, n).
        """
        if tokens.dim() != 3:
            raise ValueError(f"expected (batch, examples, seq) tokens, got {tuple(tokens.shape)}")
        batch, m, seq = tokens.shape
        flat = tokens.reshape(batch * m, seq)
        enc, _ = self.encoder(self.token_embed(flat))  # (B*m, seq, 2H)

        h = enc.new_zeros((batch * m, self.hidden_size))
        prev = torch.full((batch,), self.start_token, dtype=torch.long,
                          device=tokens.device)
        scale = (2 * self.hidden_size) ** 0.5
        pooled_steps = []
        for t in range(steps):
            query = self.attn_query(h).unsqueeze(2)  # (B*m, 2H, 1)
            weights = torch.softmax(enc.bmm(query) / scale, dim=1)  # (B*m, seq, 1)
            context = (weights * enc).sum(dim=1)  # (B*m, 2H)
            prev_embed = self.func_embed(prev).repeat_interleave(m, dim=0)
            h = self.decoder(torch.cat([prev_embed, context], dim=1), h)
            logits = self.out(torch.cat([h, context], dim=1))  # (B*m, n)
            pooled = logits.reshape(batch, m, self.num_functions).mean(dim=1)
            pooled_steps.append(pooled)
            if teacher is not None:
                prev = teacher[:, t]
            else:
                prev = pooled.argmax(dim=1)
        return torch.stack(pooled_steps, dim=1)
