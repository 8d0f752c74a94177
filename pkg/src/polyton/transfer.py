"""Moving a matching from a graphon to a cut-close graphon.

Given a step graphon ``W``, a matching ``m`` in it and ``eps > 0``,
:func:`plan_transfer` fixes a chain of constants ending in ``delta``.  For
any ``U`` with ``cut_norm(U - W) < delta``, :func:`transfer_matching`
builds a matching ``m_U`` in ``U`` with ``cut_norm(m_U - m) < eps``:

1. average ``W`` and ``m`` over an equal-measure partition ``Omega_1..k``;
2. mark the block pairs where those averages are poor approximations (set A);
3. ``t = (m_ij / W_ij) * U`` on pairs outside A with ``W_ij >= r``, else 0;
4. zero the rows (B1) and columns (B2) where ``t`` has noticeably more
   degree than ``m``, then scale by ``1 / (1 + 2 sqrt(eps_t))``.

Here ``eps_t`` is the intermediate tolerance.  Its square root is generally
irrational; every formula uses one rational upper bound ``sigma`` on it,
which makes each inequality the construction relies on hold with room to
spare (see :func:`plan_transfer`).

Step inputs are constant on each ``Omega_i x Omega_j``, so the averages
are exact and the pipeline itself runs on the coarsest partition refining
``W``, ``m`` and ``U``; the equal-measure partition is only materialised to
compute A and ``k``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    ONE,
    ZERO,
    StepCover,
    StepGraphon,
    StepKernel,
    ValidationError,
    as_rational,
    common_partition,
    kernel_on,
    lcm_of_denominators,
    refine_graphon,
    sqrt_bounds,
)
from .cutnorm import cut_norm
from .matchings import degree_profile, is_matching

__all__ = [
    "TransferPlan",
    "TransferResult",
    "degree_profile",
    "equal_measure_refinement",
    "plan_transfer",
    "transfer_matching",
    "truncate_matching",
]

_SQRT_BITS = 128


def truncate_matching(m: StepKernel, eps=None) -> tuple[StepKernel, Fraction]:
    """Truncation level ``M`` and the truncated matching.

    A step matching is bounded, so truncating at its maximum changes nothing
    and the L1 gap is 0.  ``M = 0`` (zero matching) is raised to 1 so that
    later divisions are defined.
    """
    M = max(m.max_value(), ZERO)
    return m, (M if M > 0 else ONE)


def _partitions_of(obj) -> list[tuple[Fraction, ...]]:
    if isinstance(obj, StepKernel):
        return [obj.row_measures, obj.col_measures]
    if isinstance(obj, (StepGraphon, StepCover)):
        return [obj.measures]
    if isinstance(obj, (tuple, list)):
        return [tuple(as_rational(x) for x in obj)]
    raise TypeError(f"not a step object: {type(obj).__name__}")


def equal_measure_refinement(objects: Sequence, target_error=None) -> tuple[int, tuple[Fraction, ...], list[tuple[int, ...]]]:
    """Refine all inputs to ``k`` blocks of measure exactly ``1/k``.

    ``k`` is the least common denominator of the cut points of the common
    refinement.  Returns ``(k, measures, maps)`` where ``maps[p][i]`` is the
    block of the ``p``-th input partition containing block ``i`` (kernels
    contribute a row and a column partition, in that order).  Block means
    reproduce the inputs exactly, so any ``target_error`` is met.
    """
    parts = [p for obj in objects for p in _partitions_of(obj)]
    if not parts:
        return 1, (ONE,), []
    measures, _ = common_partition(*parts)
    k = lcm_of_denominators(measures)
    grid = (Fraction(1, k),) * k
    _, maps = common_partition(grid, *parts)
    return k, grid, [tuple(t[p + 1] for t in maps) for p in range(len(parts))]


@dataclass(frozen=True)
class TransferPlan:
    """Constants of the construction.

    ``sigma`` is a rational upper bound on ``sqrt(eps_tilde)`` within
    ``2**-128``; it stands in for the root everywhere.
    """

    eps: Fraction
    M: Fraction
    eps_tilde: Fraction
    sigma: Fraction
    s: Fraction
    r: Fraction
    eta: Fraction
    k: int
    delta: Fraction
    partition: tuple[Fraction, ...] = field(repr=False)

    def check(self) -> None:
        """Re-verify every defining relation exactly; raises AssertionError."""
        e = self.eps_tilde
        lo, hi = sqrt_bounds(e, _SQRT_BITS)
        assert lo <= self.sigma and self.sigma * self.sigma >= e, "sigma is not an upper bound on sqrt(eps_tilde)"
        assert 3 * e + 6 * self.sigma * self.M + 2 * e * self.sigma < self.eps / 2, "eps_tilde inequality fails"
        assert self.r == e * self.s / (4 * self.M), "r formula"
        assert self.eta == e / (2 * (1 + 2 * self.M + 2 * self.M / self.r)), "eta formula"
        assert self.delta == self.eta / (self.k * self.k), "delta formula"
        assert len(self.partition) == self.k and all(p == Fraction(1, self.k) for p in self.partition)
        assert 0 < self.delta <= self.eta <= e < self.eps, "constants are not decreasing"


def plan_transfer(W: StepGraphon, m: StepKernel, eps) -> TransferPlan:
    """Constants for ``W``, ``m`` and ``eps``.

    ``eps_tilde`` is the first of ``eps/8, eps/16, ...`` with
    ``3 e + 6 sigma M + 2 e sigma < eps/2``; using ``sigma >= sqrt(e)``
    makes this at least as strong as the inequality with the true root.
    ``s`` is the least positive value of ``W``; no part of ``W`` lies
    strictly between 0 and ``s``, so the small-values condition holds
    trivially.
    """
    eps = as_rational(eps, "eps")
    if eps <= 0:
        raise ValidationError(f"eps: must be positive, got {eps}", "eps")
    verdict = is_matching(m, W)
    if not verdict:
        raise ValidationError(f"m is not a matching in W: {verdict.reason}", "m")
    _, M = truncate_matching(m, eps)
    e = eps / 8
    while True:
        sigma = sqrt_bounds(e, _SQRT_BITS)[1]
        if 3 * e + 6 * sigma * M + 2 * e * sigma < eps / 2:
            break
        e /= 2
    positive = [v for row in W.values for v in row if v > 0]
    s = min(positive) if positive else ONE
    r = e * s / (4 * M)
    eta = e / (2 * (1 + 2 * M + 2 * M / r))
    k, grid, _ = equal_measure_refinement([W, m])
    plan = TransferPlan(eps, M, e, sigma, s, r, eta, k, eta / (k * k), grid)
    plan.check()
    return plan


@dataclass(frozen=True)
class TransferResult:
    """Output of :func:`transfer_matching`.

    ``B1``/``B2`` index blocks of ``m_U``'s partition; ``trimmed_measure``
    gives their measures.  ``claim_gap`` is ``cut_norm(t - m)``,
    ``input_gap`` is ``cut_norm(U - W)``.
    """

    m_U: StepKernel
    plan: TransferPlan
    B1: tuple[int, ...]
    B2: tuple[int, ...]
    trimmed_measure: tuple[Fraction, Fraction]
    bad_pairs: tuple[tuple[int, int], ...]
    input_gap: Fraction
    claim_gap: Fraction
    achieved_cut_error: Fraction
    valid: bool
    t: StepKernel = field(repr=False)


def _bad_pairs(plan: TransferPlan, W: StepGraphon, m: StepKernel) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` of the equal-measure partition with a poor block-mean fit.

    The fit is ``int_{Omega_i x Omega_j} |F - mean|`` compared with
    ``eta / k^2``.  The partition refines ``W`` and ``m``, so both are
    constant on every pair and the set is empty; it is still computed on the
    finest common partition rather than assumed.
    """
    k = plan.k
    grid = plan.partition
    measures, maps = common_partition(grid, W.measures, m.row_measures, m.col_measures)
    limit = plan.eta / (k * k)
    cell = [[[] for _ in range(k)] for _ in range(k)]
    for a, ta in enumerate(maps):
        for b, tb in enumerate(maps):
            cell[ta[0]][tb[0]].append((measures[a] * measures[b], W.values[ta[1]][tb[1]], m.values[ta[2]][tb[3]]))
    bad = []
    area = Fraction(1, k * k)
    for i in range(k):
        for j in range(k):
            pieces = cell[i][j]
            w_mean = sum((a * w for a, w, _ in pieces), ZERO) / area
            m_mean = sum((a * x for a, _, x in pieces), ZERO) / area
            w_dev = sum((a * abs(w - w_mean) for a, w, _ in pieces), ZERO)
            m_dev = sum((a * abs(x - m_mean) for a, _, x in pieces), ZERO)
            if w_dev > limit or m_dev > limit:
                bad.append((i, j))
    return bad


def transfer_matching(W: StepGraphon, m: StepKernel, U: StepGraphon, eps, plan: TransferPlan | None = None) -> TransferResult:
    """Build a matching in ``U`` that is cut-close to ``m``.

    If ``cut_norm(U - W) >= delta`` the construction still runs but the
    result is marked invalid and a warning is issued.  ``m_U`` is always a
    matching in ``U``; when the precondition holds the trimmed-measure bound,
    the ``cut_norm(t - m) <= eps_tilde`` bound and ``cut_norm(m_U - m) < eps``
    are asserted.
    """
    if plan is None:
        plan = plan_transfer(W, m, eps)
    elif not is_matching(m, W):
        raise ValidationError("m is not a matching in W", "m")
    eps = plan.eps
    m_t, M = truncate_matching(m, eps)
    input_gap = cut_norm(U.as_kernel() - W.as_kernel()).value
    close = input_gap < plan.delta
    if not close:
        warnings.warn(
            f"cut_norm(U - W) = {float(input_gap):.3g} is not below delta = {float(plan.delta):.3g};"
            " the construction runs but carries no guarantee",
            RuntimeWarning,
            stacklevel=2,
        )

    bad = _bad_pairs(plan, W, m_t)
    parts = [W.measures, m_t.row_measures, m_t.col_measures, U.measures]
    if bad:
        parts.append(plan.partition)
    measures, maps = common_partition(*parts)
    n = len(measures)
    w_of, r_of, c_of, u_of = ([t[p] for t in maps] for p in range(4))
    omega_of = [t[4] for t in maps] if bad else None
    bad_set = set(bad)
    Wr = refine_graphon(W, measures, w_of)
    Ur = refine_graphon(U, measures, u_of)
    mr = kernel_on(m_t, measures, r_of, c_of)

    # stage 3: rescaled copy of U where the mean of W is not too small
    t_vals = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            w = Wr.values[a][b]
            if w < plan.r or (bad and (omega_of[a], omega_of[b]) in bad_set):
                continue
            t_vals[a][b] = mr.values[a][b] / w * Ur.values[a][b]
    t = StepKernel(measures, measures, tuple(map(tuple, t_vals)))
    for a in range(n):
        for b in range(n):
            if t_vals[a][b] and not Ur.values[a][b]:
                raise RuntimeError("t is positive outside the support of U")

    # stage 4: trim rows/columns with excess degree, then scale down
    sigma = plan.sigma
    t_deg, m_deg = degree_profile(t), degree_profile(mr)
    B1 = tuple(a for a in range(n) if t_deg[a][0] > m_deg[a][0] + sigma)
    B2 = tuple(a for a in range(n) if t_deg[a][1] > m_deg[a][1] + sigma)
    trimmed = set(B1) | set(B2)
    scale = 1 / (1 + 2 * sigma)
    mu_vals = tuple(
        tuple(ZERO if a in trimmed or b in trimmed else scale * t_vals[a][b] for b in range(n)) for a in range(n)
    )
    m_U = StepKernel(measures, measures, mu_vals)

    verdict = is_matching(m_U, U)
    if not verdict:
        raise RuntimeError(f"m_U is not a matching in U: {verdict.reason} at {verdict.blocks}")
    for a, (out, inc) in enumerate(degree_profile(m_U)):
        if out + inc > 1:
            raise RuntimeError(f"degree of block {a} exceeds 1 after scaling")

    claim_gap = cut_norm(t - mr).value
    nu_b1 = sum((measures[a] for a in B1), ZERO)
    nu_b2 = sum((measures[a] for a in B2), ZERO)
    achieved = cut_norm(m_U - m).value
    valid = close
    if close:
        if claim_gap > plan.eps_tilde:
            raise RuntimeError(f"cut_norm(t - m) = {claim_gap} exceeds eps_tilde")
        if nu_b1 * nu_b1 >= plan.eps_tilde or nu_b2 * nu_b2 >= plan.eps_tilde:
            raise RuntimeError("trimmed sets are not smaller than sqrt(eps_tilde)")
        if achieved >= eps:
            raise RuntimeError(f"cut_norm(m_U - m) = {achieved} is not below eps = {eps}")
    return TransferResult(
        m_U=m_U,
        plan=plan,
        B1=B1,
        B2=B2,
        trimmed_measure=(nu_b1, nu_b2),
        bad_pairs=tuple(bad),
        input_gap=input_gap,
        claim_gap=claim_gap,
        achieved_cut_error=achieved,
        valid=valid,
        t=t,
    )
