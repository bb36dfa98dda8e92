"""Shapley value estimation with the kernel (weighted regression) method.

Absent features are marginalized over a background dataset: the value of
a coalition S is the mean model output over background rows with the
coalition's features replaced by the query point's values. When the full
2^n coalition space fits the evaluation budget the regression runs over
every proper coalition with exact Shapley-kernel weights and therefore
returns exact Shapley values; otherwise coalitions are sampled from the
kernel distribution. Either way the efficiency identity

    sum(phi) = f(x) - mean f(background)

holds exactly, because the constraint is eliminated algebraically rather
than fitted.
"""

from __future__ import annotations

import math

import numpy as np

from . import AttributionVector, ExplainError, scalar_output

_CHUNK_ROWS = 131072


def _coalition_values(model, x, background, Z) -> np.ndarray:
    """v(S) for each coalition row of Z (boolean m x n)."""
    m = Z.shape[0]
    B = background.shape[0]
    values = np.empty(m)
    per_chunk = max(1, _CHUNK_ROWS // B)
    for start in range(0, m, per_chunk):
        chunk = Z[start:start + per_chunk]
        hybrid = np.repeat(background[None, :, :], chunk.shape[0], axis=0)
        mask = chunk[:, None, :]
        hybrid = np.where(mask, x[None, None, :], hybrid)
        out = scalar_output(model, hybrid.reshape(-1, x.shape[0]))
        values[start:start + per_chunk] = out.reshape(chunk.shape[0], B).mean(axis=1)
    return values


def _solve_constrained_wls(Z, y, w, delta) -> np.ndarray:
    """Minimize sum w_i (Z_i . phi - y_i)^2 subject to sum(phi) = delta.

    The last coefficient is substituted out via the constraint, making
    efficiency exact by construction.
    """
    n = Z.shape[1]
    if n == 1:
        return np.array([delta])
    zn = Z[:, -1].astype(np.float64)
    A = Z[:, :-1].astype(np.float64) - zn[:, None]
    b = y - zn * delta
    sw = np.sqrt(w)
    sol, *_ = np.linalg.lstsq(A * sw[:, None], b * sw, rcond=None)
    return np.append(sol, delta - sol.sum())


def _all_coalitions(n: int) -> np.ndarray:
    ints = np.arange(1, 2 ** n - 1, dtype=np.uint64)
    bits = (ints[:, None] >> np.arange(n, dtype=np.uint64)) & 1
    return bits.astype(bool)


def _kernel_weight(n: int, s: np.ndarray) -> np.ndarray:
    comb = np.array([math.comb(n, int(k)) for k in s], dtype=np.float64)
    return (n - 1) / (comb * s * (n - s))


def _sample_coalitions(n: int, m: int, rng) -> np.ndarray:
    """Draw m coalitions from the Shapley-kernel size distribution, in
    complementary pairs for variance reduction."""
    sizes = np.arange(1, n)
    p = (n - 1) / (sizes * (n - sizes))
    p = p / p.sum()
    Z = np.zeros((m, n), dtype=bool)
    i = 0
    while i < m:
        s = int(rng.choice(sizes, p=p))
        members = rng.choice(n, size=s, replace=False)
        Z[i, members] = True
        i += 1
        if i < m:
            Z[i] = ~Z[i - 1]
            i += 1
    return Z


def kernel_shap(model, x, background, budget: int = 2048,
                seed: int = 0) -> AttributionVector:
    """Shapley attribution of the model output at x.

    ``budget`` caps the number of coalition evaluations. With
    2^n <= budget every coalition is enumerated (exact values); otherwise
    budget - 2 coalitions are sampled (the empty and full coalitions are
    always evaluated for the efficiency constraint).
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    if background.shape[0] == 0:
        raise ExplainError("background must be non-empty")
    if background.shape[1] != x.shape[0]:
        raise ExplainError("background and x disagree on feature count")
    n = x.shape[0]

    v_empty = float(scalar_output(model, background).mean())
    v_full = float(scalar_output(model, x.reshape(1, -1))[0])
    delta = v_full - v_empty
    if n == 1:
        return AttributionVector(np.array([delta]), np.zeros(1), method="shap")

    exact = 2 ** n <= budget
    if exact:
        Z = _all_coalitions(n)
        w = _kernel_weight(n, Z.sum(axis=1))
    else:
        if budget < n + 2:
            raise ExplainError("sampling budget must be at least n_features + 2")
        rng = np.random.default_rng(seed)
        Z = _sample_coalitions(n, budget - 2, rng)
        w = np.ones(Z.shape[0])

    y = _coalition_values(model, x, background, Z) - v_empty
    phi = _solve_constrained_wls(Z, y, w, delta)
    return AttributionVector(phi, np.zeros(n), method="shap",
                             flags=() if exact else ("sampled",))
