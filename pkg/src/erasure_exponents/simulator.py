"""Monte Carlo estimates of erasure and undetected-error probabilities.

Each trial draws a message uniformly, sends its codeword through the DMC
and runs the optimal threshold decoder

    accept m  iff  P(y|x_m) / sum_{m' != m} P(y|x_m') >= e^{nT},

recording a correct decision, an undetected error (E2) or an erasure;
E1 is the union of the last two. Trials come in fixed chunks of
``CHUNK`` so the result does not depend on how many workers run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from . import kernels
from .ensemble import Ensemble
from .errors import BudgetExceeded, DomainError, InvalidThreshold, RateOutOfRange

CHUNK = 4096
ERASE = -1
LETTER_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class Codebook:
    n: int
    M: int
    words: np.ndarray  # (M, n) input letters
    seed: int


def _rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, stream)."""
    key = np.array([seed % 2**64, stream % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def codebook_size(n: int, R: float) -> int:
    return int(round(math.exp(n * R)))


def sample_codebook(ens: Ensemble, n: int, R: float, seed: int, budget: int = LETTER_BUDGET) -> Codebook:
    if n < 1:
        raise DomainError(f"block length must be >= 1, got {n}")
    if R < 0:
        raise RateOutOfRange(f"rate must be >= 0, got {R}")
    if n * R > math.log(budget) + 1.0:
        raise BudgetExceeded(f"e^(nR) = e^{n * R:g} codewords exceed the letter budget {budget}")
    M = codebook_size(n, R)
    if M < 2:
        raise RateOutOfRange(f"round(e^(nR)) = {M}; need at least two codewords")
    if n * M > budget:
        raise BudgetExceeded(f"codebook needs n*M = {n * M} letters, budget is {budget}")
    rng = _rng(seed, 0)
    words = rng.choice(ens.n_inputs, size=(M, n), p=ens.input_dist).astype(np.int32)
    words.setflags(write=False)
    return Codebook(n=n, M=M, words=words, seed=seed)


def loglik_table(ens: Ensemble, cb: Codebook) -> np.ndarray:
    """W[i, b, m] = ln P(b | x_m[i])."""
    return np.ascontiguousarray(ens.log_channel[cb.words.T].transpose(0, 2, 1))


def decode(ens: Ensemble, cb: Codebook, y, T: float) -> int:
    """Index of the decoded message, or ``ERASE``."""
    if T < 0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T}")
    ys = np.ascontiguousarray(np.asarray(y, dtype=np.int32).reshape(1, cb.n))
    return int(kernels.decode_batch(loglik_table(ens, cb), ys, cb.n * T)[0])


def transmit(ens: Ensemble, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Pass input letters (any shape) through the channel."""
    cdf = np.cumsum(ens.channel, axis=1)[:, :-1]
    u = rng.random(x.shape)
    return (u[..., None] >= cdf[x]).sum(axis=-1).astype(np.int32)


@dataclass(frozen=True)
class SimResult:
    n: int
    R: float
    T: float
    seed: int
    codebooks: int
    trials: int
    count_e1: int
    count_e2: int
    count_erase: int
    p_e1: float
    p_e2: float
    p_r0: float
    ci_e1: tuple[float, float]
    ci_e2: tuple[float, float]
    ci_r0: tuple[float, float]
    empirical_exponents: dict = field(default_factory=dict)
    backend: str = ""

    def to_dict(self) -> dict:
        from dataclasses import asdict
        return asdict(self)


def _wilson(k: int, trials: int) -> tuple[float, float]:
    ci = binomtest(k, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _exponent(k: int, trials: int, n: int) -> dict:
    if k == 0:
        # nothing observed: only a one-sided statement is possible
        return {"value": math.log(trials) / n, "one_sided": True}
    return {"value": -math.log(k / trials) / n, "one_sided": False}


def _backend_name(decoder) -> str:
    if decoder is kernels.decode_batch:
        return kernels.BACKEND
    if decoder is kernels.fallback_decode_batch:
        return "python"
    return "custom"


def _run_chunk(ens, tables, cb_words, M, n, T, seed, c, size, decoder):
    k = c % len(tables)
    rng = _rng(seed, c)
    msgs = rng.integers(0, M, size=size)
    ys = transmit(ens, cb_words[k][msgs], rng)
    dec = decoder(tables[k], ys, n * T)
    erase = int(np.count_nonzero(dec == ERASE))
    wrong = int(np.count_nonzero((dec != ERASE) & (dec != msgs)))
    return wrong, erase


def run(ens: Ensemble, n: int, R: float, T: float, trials: int, seed: int = 0,
        codebooks_per_run: int = 32, workers: int = 1, budget: int = LETTER_BUDGET,
        decoder=None) -> SimResult:
    """Estimate Pr{E1}, Pr{E2}, Pr{R0} over random codes.

    Chunk ``c`` (``CHUNK`` trials) uses codebook ``c mod codebooks_per_run``
    and its own Philox stream keyed by ``(seed, c)``; codebook ``k`` is
    drawn from a seed derived from ``(seed, k)``. Raising ``T`` with
    everything else fixed replays the same channel outputs.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if codebooks_per_run < 1:
        raise DomainError("codebooks_per_run must be >= 1")
    if T < 0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T}")
    decoder = decoder or kernels.decode_batch
    n_chunks = -(-trials // CHUNK)
    n_books = min(codebooks_per_run, n_chunks)
    books = []
    for k in range(n_books):
        cb_seed = int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0])
        books.append(sample_codebook(ens, n, R, cb_seed, budget))
    tables = [loglik_table(ens, cb) for cb in books]
    words = [cb.words for cb in books]
    M = books[0].M

    sizes = [min(CHUNK, trials - c * CHUNK) for c in range(n_chunks)]
    args = [(ens, tables, words, M, n, T, seed, c, sizes[c], decoder) for c in range(n_chunks)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        parts = [_run_chunk(*a) for a in args]
    e2 = sum(p[0] for p in parts)
    erase = sum(p[1] for p in parts)
    e1 = e2 + erase
    return SimResult(
        n=n, R=R, T=T, seed=seed, codebooks=codebooks_per_run, trials=trials,
        count_e1=e1, count_e2=e2, count_erase=erase,
        p_e1=e1 / trials, p_e2=e2 / trials, p_r0=erase / trials,
        ci_e1=_wilson(e1, trials), ci_e2=_wilson(e2, trials), ci_r0=_wilson(erase, trials),
        empirical_exponents={"e1": _exponent(e1, trials, n), "e2": _exponent(e2, trials, n),
                             "r0": _exponent(erase, trials, n)},
        backend=_backend_name(decoder),
    )
