"""BI-AWGN channel: each F_{2^r} symbol is sent as r BPSK bits (bit 0 -> +1)."""

from __future__ import annotations

import math

import numpy as np

from .gf import FieldTable


def noise_sigma(ebn0_db: float, rate: float) -> float:
    """sigma with sigma^2 = 1 / (2 * rate * Eb/N0); 0 for an infinite Eb/N0."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def symbol_signs(field: FieldTable) -> np.ndarray:
    """(q, r) BPSK amplitudes of each element's binary coordinates."""
    if field.p != 2:
        raise ValueError("the BI-AWGN mapping requires a characteristic-2 field")
    return 1.0 - 2.0 * field.digits.astype(np.float64)


def modulate(codeword, field: FieldTable) -> np.ndarray:
    return symbol_signs(field)[np.asarray(codeword, dtype=np.int64)]


def bit_llrs(received: np.ndarray, sigma: float) -> np.ndarray:
    """log p(b=0 | y) / p(b=1 | y) = 2 y / sigma^2."""
    return 2.0 * np.asarray(received) / sigma**2


def symbol_probs_from_received(received: np.ndarray, field: FieldTable, sigma: float) -> np.ndarray:
    """Posterior symbol probabilities (N, q) under a uniform prior."""
    S = symbol_signs(field)
    logp = (np.asarray(received) @ S.T) / sigma**2  # sum_b y_b s_b(a) / sigma^2
    logp -= logp.max(axis=-1, keepdims=True)
    p = np.exp(logp)
    return p / p.sum(axis=-1, keepdims=True)


def bi_awgn_symbol_probs(codeword, field: FieldTable, ebn0_db: float, rate: float, rng: np.random.Generator):
    """Transmit ``codeword`` and return per-symbol probability vectors (N, q)."""
    x = modulate(codeword, field)
    sigma = noise_sigma(ebn0_db, rate)
    if sigma == 0.0:
        p = np.zeros((len(x), field.q))
        p[np.arange(len(x)), np.asarray(codeword, dtype=np.int64)] = 1.0
        return p
    y = x + sigma * rng.standard_normal(x.shape)
    return symbol_probs_from_received(y, field, sigma)
