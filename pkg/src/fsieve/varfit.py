"""Yule-Walker vector autoregressions for score series.

Conventions: ``acov.gammas[h] = n^-1 sum_{t=1}^{n-h} xi_t xi_{t+h}^T`` (divisor
n, so the block Toeplitz matrix is positive semidefinite and the fitted
model is stable) and the model is ``xi_t = sum_j A[j-1] xi_{t-j} + e_t``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from fsieve.fpca import DiagnosticWarning

MAX_CONDITION = 1e12
STABILITY_TOL = 1e-10
DEFAULT_DELTA = 1e-5
MAX_PSI_TERMS = 10_000


class SingularSystemError(np.linalg.LinAlgError):
    pass


class UnstableModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AutocovSet:
    gammas: np.ndarray  # (p + 1, m, m)
    n: int

    @property
    def order(self) -> int:
        return self.gammas.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.gammas.shape[1]


@dataclass(frozen=True, eq=False)
class VarModel:
    """Fitted VAR(p): coefficients ``A`` (p, m, m), innovation covariance, residual pool.

    ``sigma_e`` is the covariance of the centered residual pool (divisor = pool
    size), i.e. the exact innovation covariance of the resampling scheme.
    ``start`` holds the first p observed score vectors used to seed simulation.
    """

    A: np.ndarray
    sigma_e: np.ndarray
    residual_pool: np.ndarray
    start: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.sigma_e.shape[0]

    def companion(self) -> np.ndarray:
        return companion_matrix(self.A, self.dim)

    def spectral_radius(self) -> float:
        if self.p == 0 or self.dim == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.companion()))))

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0 + STABILITY_TOL


def companion_matrix(A: np.ndarray, m: int) -> np.ndarray:
    p = A.shape[0]
    F = np.zeros((m * p, m * p))
    if p == 0:
        return F
    F[:m, :] = np.concatenate(list(A), axis=1)
    F[m:, :-m] = np.eye(m * (p - 1))
    return F


def autocovariances(scores: np.ndarray, p: int) -> AutocovSet:
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    n, m = scores.shape
    if not 0 <= p < n:
        raise ValueError(f"need 0 <= p < n, got p={p}, n={n}")
    gammas = np.empty((p + 1, m, m))
    for h in range(p + 1):
        gammas[h] = scores[: n - h].T @ scores[h:] / n
    return AutocovSet(gammas, n)


def _block_toeplitz(acov: AutocovSet, p: int) -> np.ndarray:
    # block (j, k) holds E[xi_{t-j} xi_{t-k}^T] = R(k - j), R(h) = gammas[h]^T, R(-h) = gammas[h]
    m = acov.dim
    G = np.empty((m * p, m * p))
    for j in range(p):
        for k in range(p):
            h = k - j
            block = acov.gammas[h].T if h >= 0 else acov.gammas[-h]
            G[j * m : (j + 1) * m, k * m : (k + 1) * m] = block
    return G


def yule_walker_coefficients(acov: AutocovSet, p: int) -> np.ndarray:
    """Solve ``[A_1 ... A_p] G = [R(1) ... R(p)]`` for the coefficient matrices."""
    if p > acov.order:
        raise ValueError(f"autocovariances only go up to lag {acov.order}, need {p}")
    m = acov.dim
    if p == 0 or m == 0:
        return np.zeros((p, m, m))
    G = _block_toeplitz(acov, p)
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystemError(
            f"block Toeplitz matrix of size {m * p} (m={m}, p={p}) is singular "
            f"(condition number {cond:.3g})"
        )
    rhs = np.concatenate([acov.gammas[h].T for h in range(1, p + 1)], axis=1)
    # A G = rhs  <=>  G^T A^T = rhs^T ; G is symmetric
    stacked = linalg.solve(G, rhs.T, assume_a="sym").T
    return np.stack([stacked[:, j * m : (j + 1) * m] for j in range(p)])


def raw_residuals(scores: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``e_t = xi_t - sum_j A_j xi_{t-j}`` for t = p+1, ..., n (uncentered)."""
    scores = np.asarray(scores, dtype=float)
    p = A.shape[0]
    n, m = scores.shape
    if A.shape[1:] != (m, m):
        raise ValueError(f"model dimension {A.shape[1]} does not match scores dimension {m}")
    e = scores[p:].copy()
    for j in range(1, p + 1):
        e -= scores[p - j : n - j] @ A[j - 1].T
    return e


def residuals(scores: np.ndarray, model: VarModel | np.ndarray) -> np.ndarray:
    """Centered residual pool ``e_t - mean(e)``, t = p+1, ..., n."""
    A = model.A if isinstance(model, VarModel) else np.asarray(model)
    e = raw_residuals(scores, A)
    return e - e.mean(axis=0) if e.shape[0] else e


def yule_walker(acov: AutocovSet, p: int, scores: np.ndarray | None = None) -> VarModel:
    """Fit a VAR(p) from autocovariances.

    With ``scores`` the innovation covariance and residual pool come from the
    time-domain residuals of those scores; without them the closed form
    ``Gamma_0 - sum_j A_j R(j)^T`` is used and the pool is left empty.
    """
    A = yule_walker_coefficients(acov, p)
    m = acov.dim
    if scores is not None:
        scores = np.asarray(scores, dtype=float).reshape(-1, m)
        pool = residuals(scores, A)
        sigma = pool.T @ pool / pool.shape[0] if pool.shape[0] else np.zeros((m, m))
        start = scores[:p].copy()
    else:
        sigma = acov.gammas[0].copy()
        for j in range(1, p + 1):
            sigma -= A[j - 1] @ acov.gammas[j]
        pool = np.zeros((0, m))
        start = np.zeros((p, m))
    sigma = (sigma + sigma.T) / 2
    model = VarModel(A, sigma, pool, start)
    if not model.is_stable():
        warnings.warn(
            f"Yule-Walker fit is not stable (spectral radius {model.spectral_radius():.6g})",
            DiagnosticWarning,
            stacklevel=2,
        )
    return model


def fit_var(scores: np.ndarray, p: int) -> VarModel:
    scores = np.asarray(scores, dtype=float)
    return yule_walker(autocovariances(scores, p), p, scores)


def psi_weights(A: np.ndarray, count: int) -> np.ndarray:
    """MA(infinity) coefficients ``Psi_0 = I, Psi_j = sum_k A_k Psi_{j-k}``, j < count."""
    p, m, _ = A.shape
    psi = np.zeros((count, m, m))
    if count == 0:
        return psi
    psi[0] = np.eye(m)
    for j in range(1, count):
        for k in range(1, min(j, p) + 1):
            psi[j] += A[k - 1] @ psi[j - k]
    return psi


def stationary_covariance(model: VarModel) -> np.ndarray:
    """Exact lag-0 covariance ``sum_j Psi_j Sigma Psi_j^T`` via the companion Lyapunov equation."""
    _require_stable(model)
    m, p = model.dim, model.p
    if p == 0 or m == 0:
        return model.sigma_e.copy()
    F = model.companion()
    Q = np.zeros_like(F)
    Q[:m, :m] = model.sigma_e
    big = linalg.solve_discrete_lyapunov(F, Q)
    g0 = big[:m, :m]
    return (g0 + g0.T) / 2


def _require_stable(model: VarModel) -> None:
    if not model.is_stable():
        raise UnstableModelError(
            f"VAR model is unstable (spectral radius {model.spectral_radius():.6g})"
        )


def truncation_horizon(model: VarModel, delta: float = DEFAULT_DELTA) -> int:
    """Smallest S with ``||Gamma(0) - sum_{j<=S} Psi_j Sigma Psi_j^T||_F < delta``."""
    target = stationary_covariance(model)
    m, p = model.dim, model.p
    partial = np.zeros((m, m))
    psi_hist = [np.eye(m)]
    for s in range(MAX_PSI_TERMS):
        if s > 0:
            nxt = np.zeros((m, m))
            for k in range(1, min(s, p) + 1):
                nxt += model.A[k - 1] @ psi_hist[s - k]
            psi_hist.append(nxt)
        psi = psi_hist[s]
        partial += psi @ model.sigma_e @ psi.T
        if np.linalg.norm(target - partial) < delta:
            return s
    raise UnstableModelError(f"Psi series did not converge within {MAX_PSI_TERMS} terms")


def burn_in_length(model: VarModel, delta: float = DEFAULT_DELTA) -> int:
    """Number of initial simulated values to discard: ``max(S, 2p)``."""
    return max(truncation_horizon(model, delta), 2 * model.p)


def draw_innovations(
    model: VarModel,
    shape: tuple[int, ...],
    rng: np.random.Generator,
    source: str = "resample",
) -> np.ndarray:
    m = model.dim
    if source == "resample":
        pool = model.residual_pool
        if pool.shape[0] == 0:
            raise ValueError("cannot resample from an empty residual pool")
        return pool[rng.integers(0, pool.shape[0], size=shape)]
    if source == "gaussian":
        return rng.multivariate_normal(np.zeros(m), model.sigma_e, size=shape, method="eigh")
    raise ValueError(f"unknown innovation source {source!r}")


def run_recursion(A: np.ndarray, start: np.ndarray, innovations: np.ndarray) -> np.ndarray:
    """Iterate ``x_t = sum_j A_j x_{t-j} + e_t`` over axis -2 of ``innovations``.

    ``start`` has shape (..., p, m) (oldest first) and broadcasts against the
    leading axes of ``innovations`` (..., N, m). Returns (..., N, m).
    """
    p = A.shape[0]
    N, m = innovations.shape[-2:]
    lead = innovations.shape[:-2]
    out = np.empty_like(innovations)
    if p == 0:
        out[...] = innovations
        return out
    # state holds [x_{t-1}, ..., x_{t-p}] flattened
    hist = np.broadcast_to(start, lead + (p, m))[..., ::-1, :]
    state = np.array(hist.reshape(lead + (p * m,)), dtype=float)  # writable copy
    stacked_T = np.concatenate(list(A), axis=1).T  # (p m, m)
    for t in range(N):
        x = state @ stacked_T + innovations[..., t, :]
        out[..., t, :] = x
        if p > 1:
            state[..., m:] = state[..., :-m].copy()
        state[..., :m] = x
    return out


def simulate(
    model: VarModel,
    n: int,
    rng: np.random.Generator,
    *,
    source: str = "resample",
    start: np.ndarray | None = None,
    burn_in: int | None = None,
    batch: int | None = None,
) -> np.ndarray:
    """Simulate ``n`` score vectors after discarding a burn-in segment.

    Returns shape (n, m), or (batch, n, m) when ``batch`` is given; batched
    paths share the start values but draw independent innovations.
    """
    _require_stable(model)
    p, m = model.p, model.dim
    start = model.start if start is None else np.asarray(start, dtype=float)
    if start.shape[0] < p:
        raise ValueError(f"need at least {p} start rows, got {start.shape[0]}")
    start = start[:p].reshape(p, m)
    L = burn_in_length(model) if burn_in is None else burn_in
    lead = () if batch is None else (batch,)
    e = draw_innovations(model, lead + (L + n,), rng, source)
    path = run_recursion(model.A, start, e)
    return path[..., L:, :]


def dump_model(model: VarModel, path: str | Path) -> None:
    """Write coefficient, covariance and residual blocks as plain CSV text."""
    lines = [f"# VAR p={model.p} m={model.dim}"]
    for j, Aj in enumerate(model.A, start=1):
        lines.append(f"A {j}")
        lines.extend(",".join(f"{v:.17g}" for v in row) for row in Aj)
    lines.append("Sigma")
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in model.sigma_e)
    for t, row in enumerate(model.residual_pool, start=model.p + 1):
        lines.append(f"residual {t}")
        lines.append(",".join(f"{v:.17g}" for v in row))
    lines.append("start")
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in model.start)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path: str | Path) -> VarModel:
    blocks: dict[str, list[list[float]]] = {}
    current = None
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        head = line.split(",")[0]
        if head.startswith(("A ", "residual ")) or head in ("Sigma", "start"):
            current = head
            blocks[current] = []
            continue
        blocks[current].append([float(v) for v in line.split(",")])
    sigma = np.array(blocks["Sigma"])
    m = sigma.shape[0]
    A_keys = sorted((k for k in blocks if k.startswith("A ")), key=lambda k: int(k.split()[1]))
    A = np.array([blocks[k] for k in A_keys]).reshape(len(A_keys), m, m)
    r_keys = sorted(
        (k for k in blocks if k.startswith("residual ")), key=lambda k: int(k.split()[1])
    )
    pool = np.array([blocks[k][0] for k in r_keys]).reshape(len(r_keys), m)
    start = np.array(blocks.get("start", [])).reshape(-1, m)
    return VarModel(A, sigma, pool, start)
