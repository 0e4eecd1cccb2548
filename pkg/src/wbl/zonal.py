"""Zonal polynomials and the matrix-argument 0F1 hypergeometric series.

Zonal polynomials are computed in the monomial symmetric basis via the
classical eigenfunction recurrence: with ``rho(kappa) = sum_i k_i (k_i - i)``,
the coefficients of ``C_kappa = sum_{lambda <= kappa} c[kappa][lambda] m_lambda``
satisfy

    c[kappa][lambda] = sum_{mu} ((l_i + t) - (l_j - t)) / (rho_kappa - rho_lambda)
                       * c[kappa][mu]

where ``mu`` runs over partitions obtained from ``lambda`` by moving ``t``
units from part ``j`` to an earlier part ``i`` subject to ``mu <= kappa`` in
dominance order.  The leading coefficient comes from the hook-product
normalization that makes the degree-k polynomials sum to ``(tr m)^k``.

Coefficients depend only on the partition (not on the matrix dimension) and
are cached per degree.  Evaluation happens on eigenvalues, so at desk scale
(n <= 10, degree <= 60) the whole series costs microseconds after warm-up.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError

Partition = tuple[int, ...]


@lru_cache(maxsize=None)
def partitions(k: int, max_parts: int) -> tuple[Partition, ...]:
    """All partitions of ``k`` with at most ``max_parts`` parts,
    in decreasing lexicographic order (a linear extension of dominance)."""
    if k == 0:
        return ((),)
    out: list[Partition] = []

    def rec(remaining: int, largest: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(largest, remaining), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(k, k, ())
    out.sort(reverse=True)
    return tuple(out)


def _dominated(lam: Partition, kap: Partition) -> bool:
    """True iff lam <= kap in dominance order (same weight assumed)."""
    acc_l = acc_k = 0
    for i in range(max(len(lam), len(kap))):
        acc_l += lam[i] if i < len(lam) else 0
        acc_k += kap[i] if i < len(kap) else 0
        if acc_l > acc_k:
            return False
    return True


def _rho(p: Partition) -> int:
    return sum(part * (part - i - 1) for i, part in enumerate(p))


def _conjugate(p: Partition) -> Partition:
    if not p:
        return ()
    return tuple(sum(1 for part in p if part > j) for j in range(p[0]))


def _leading_coeff(kap: Partition) -> float:
    """Coefficient of ``m_kappa`` in ``C_kappa``: 2^k k! / prod(2a(s)+l(s)+2)
    over the cells ``s`` of the diagram (arm a, leg l)."""
    k = sum(kap)
    conj = _conjugate(kap)
    denom = 1.0
    for i, row in enumerate(kap):
        for j in range(row):
            arm = row - (j + 1)
            leg = conj[j] - (i + 1)
            denom *= 2.0 * arm + leg + 2.0
    return 2.0**k * math.factorial(k) / denom


@lru_cache(maxsize=None)
def zonal_coefficients(k: int, max_parts: int) -> dict:
    """Monomial-basis coefficients of every zonal polynomial of degree k.

    Returns ``{kappa: {lambda: coeff}}`` restricted to partitions with at
    most ``max_parts`` parts (all that can be non-zero on that many
    eigenvalues).
    """
    parts = partitions(k, max_parts)
    table: dict[Partition, dict[Partition, float]] = {}
    for kap in parts:
        rho_k = _rho(kap)
        coeffs: dict[Partition, float] = {kap: _leading_coeff(kap)}
        for lam in parts:  # decreasing lex order: dominating mu come first
            if lam == kap or not _dominated(lam, kap):
                continue
            total = 0.0
            padded = lam + (0,)
            p = len(padded)
            for j in range(1, p):
                lj = padded[j]
                if lj == 0:
                    continue
                for i in range(j):
                    li = padded[i]
                    for t in range(1, lj + 1):
                        new = list(padded)
                        new[i] = li + t
                        new[j] = lj - t
                        mu = tuple(sorted((x for x in new if x > 0), reverse=True))
                        if len(mu) > max_parts or mu == lam:
                            continue
                        cmu = coeffs.get(mu)
                        if cmu is None or not _dominated(mu, kap):
                            continue
                        total += ((li + t) - (lj - t)) * cmu
            denom = rho_k - _rho(lam)
            if denom != 0 and total != 0.0:
                coeffs[lam] = total / denom
        table[kap] = coeffs
    return table


def _monomial_values(k: int, powers: np.ndarray, max_parts: int) -> dict:
    """Values of the monomial symmetric polynomials m_lambda of degree k
    at the eigenvalues whose power table is ``powers[i, j] = x_i**j``."""
    import itertools

    n = powers.shape[0]
    vals: dict[Partition, float] = {}
    idx = range(n)
    for lam in partitions(k, max_parts):
        padded = lam + (0,) * (n - len(lam))
        total = 0.0
        for perm in set(itertools.permutations(padded)):
            term = 1.0
            for i, e in zip(idx, perm):
                if e:
                    term *= powers[i, e]
            total += term
        vals[lam] = total
    return vals


def zonal_values(k: int, eigenvalues) -> dict:
    """Evaluate every degree-k zonal polynomial at the given eigenvalues."""
    x = np.asarray(eigenvalues, dtype=float)
    n = x.size
    max_deg = max(k, 1)
    powers = np.empty((n, max_deg + 1))
    powers[:, 0] = 1.0
    for j in range(1, max_deg + 1):
        powers[:, j] = powers[:, j - 1] * x
    mono = _monomial_values(k, powers, n)
    table = zonal_coefficients(k, n)
    return {
        kap: sum(c * mono[lam] for lam, c in coeffs.items())
        for kap, coeffs in table.items()
    }


def gen_pochhammer(b: float, kap: Partition) -> float:
    """Generalized Pochhammer symbol prod_i (b - (i-1)/2)_{k_i}."""
    out = 1.0
    for i, part in enumerate(kap):
        base = b - 0.5 * i
        for j in range(part):
            out *= base + j
    return out


def hyp0f1_eigenvalues(
    b: float,
    eigenvalues,
    max_degree: int = 60,
    rel_tol: float = 1e-10,
) -> tuple[float, float]:
    """Truncated zonal series for 0F1(b; m) on the eigenvalues of m.

    Returns ``(value, estimate)`` where ``estimate`` is the relative
    magnitude of the last degree summed.  Raises :class:`ConvergenceError`
    when the estimate still exceeds ``rel_tol`` at ``max_degree``.
    """
    x = np.asarray(eigenvalues, dtype=float)
    n = x.size
    if b <= 0.5 * (n - 1):
        raise DomainError(f"0F1 parameter must exceed (n-1)/2 = {0.5*(n-1)}, got {b}")
    scale = np.abs(x).max(initial=0.0)
    if np.any(x < -1e-10 * max(scale, 1.0)):
        raise DomainError("0F1 argument must be positive semi-definite")
    x = np.maximum(x, 0.0)
    if scale == 0.0:
        return 1.0, 0.0

    total = 1.0
    k_fact = 1.0
    last_rel = np.inf
    quiet = 0
    with np.errstate(over="raise"):
        for k in range(1, max_degree + 1):
            k_fact *= k
            term = 0.0
            try:
                for kap, val in zonal_values(k, x).items():
                    term += val / gen_pochhammer(b, kap)
                term /= k_fact
            except FloatingPointError:
                term = np.inf
            if not np.isfinite(term):
                raise ConvergenceError(
                    f"0F1 series overflowed at degree {k} "
                    f"(argument trace {x.sum():.3e} too large)",
                    estimate=np.inf,
                )
            total += term
            last_rel = abs(term) / max(abs(total), 1e-300)
            quiet = quiet + 1 if last_rel <= rel_tol else 0
            if quiet >= 2:
                return total, last_rel
    raise ConvergenceError(
        f"0F1 series not converged at degree {max_degree}: "
        f"last relative term {last_rel:.3e} > rel_tol {rel_tol:.1e}",
        estimate=last_rel,
    )
