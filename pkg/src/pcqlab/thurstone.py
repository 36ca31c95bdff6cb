"""Preference scaling: Case V maximum likelihood in just-objectionable
difference units, plus subject-resampling bootstrap intervals.

Scale values maximize sum c[i][j] * log Phi(sigma * (s_i - s_j)) with
sigma = Phi^-1(0.75), so a 1.0 difference means the better stimulus would
be preferred 75% of the time. One stimulus is anchored at exactly 0;
values are only comparable within one anchored group.

The optimizer is a deterministic ascent with backtracking line search
(damped Newton direction, gradient fallback, no stochastic restarts), so
identical inputs give identical output bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr
from scipy.stats import norm

from .errors import DomainError, IntegrityError, SchemaError
from .pairwise import NOT_SURE_SPLIT, PAIR_INIT, PairwiseTally

SIGMA = float(norm.ppf(0.75))
GRAD_TOL = 1e-8
MAX_ITERATIONS = 10_000
_LOG_SQRT_2PI = 0.5 * float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class JodScale:
    """Per-stimulus scale values with optional bootstrap intervals."""

    group: object
    anchor: str
    jod: dict[str, float]
    ci: dict[str, tuple[float, float]] | None = None

    def difference(self, a: str, b: str) -> float:
        return self.jod[a] - self.jod[b]


def _log_phi_ratio(z: np.ndarray) -> np.ndarray:
    # phi(z) / Phi(z), stable for very negative z.
    return np.exp(-0.5 * z * z - _LOG_SQRT_2PI - log_ndtr(z))


def _components(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _maximize(weights: np.ndarray, fixed: int, x0: np.ndarray | None = None) -> np.ndarray:
    """Scale values for one connected component; index ``fixed`` pinned at 0.

    Deterministic ascent with backtracking line search. The ascent
    direction is the damped Newton step of the log-likelihood (plain
    gradient ascent meets the same tolerance but needs thousands of
    iterations per bootstrap resample); it falls back to the raw gradient
    whenever the Hessian solve is unusable. Convergence is declared when
    the gradient max-norm over free coordinates drops below 1e-8.
    """
    n = weights.shape[0]
    rows, cols = np.nonzero(weights)
    w = weights[rows, cols]

    s = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    s[fixed] = 0.0
    free = np.array([i for i in range(n) if i != fixed], dtype=np.intp)
    if free.size == 0 or rows.size == 0:
        return s

    def objective(values: np.ndarray) -> float:
        z = SIGMA * (values[rows] - values[cols])
        return float(np.sum(w * log_ndtr(z)))

    def gradient_hessian(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = SIGMA * (values[rows] - values[cols])
        r = _log_phi_ratio(z)
        term = w * SIGMA * r
        g = np.zeros(n)
        np.add.at(g, rows, term)
        np.add.at(g, cols, -term)
        # d/dz [phi/Phi](z) = -r(z) * (z + r(z)), always negative
        curv = w * SIGMA * SIGMA * r * (z + r)
        h = np.zeros((n, n))
        np.add.at(h, (rows, rows), -curv)
        np.add.at(h, (cols, cols), -curv)
        np.add.at(h, (rows, cols), curv)
        np.add.at(h, (cols, rows), curv)
        return g, h

    obj = objective(s)
    if not np.isfinite(obj):
        raise IntegrityError("non-finite likelihood at the starting point")
    for _ in range(MAX_ITERATIONS):
        g, h = gradient_hessian(s)
        g_free = g[free]
        if float(np.max(np.abs(g_free))) < GRAD_TOL:
            break
        h_free = h[np.ix_(free, free)]
        direction = np.zeros(n)
        try:
            newton = np.linalg.solve(-h_free, g_free)
        except np.linalg.LinAlgError:
            newton = None
        if newton is not None and float(np.dot(newton, g_free)) > 0:
            direction[free] = newton
        else:
            direction[free] = g_free
        slope = float(np.dot(direction[free], g_free))
        step = 1.0
        while True:
            candidate = s + step * direction
            cand_obj = objective(candidate)
            if np.isfinite(cand_obj) and cand_obj >= obj + 1e-4 * step * slope:
                break
            step *= 0.5
            if step < 1e-18:
                raise IntegrityError("line search collapsed; likelihood not improvable")
        stalled = cand_obj == obj
        s, obj = candidate, cand_obj
        if stalled:
            # No representable likelihood improvement along the accepted
            # step: the remaining gradient is float noise, stop here.
            break
    return s


def thurstone_jod(tally: PairwiseTally, anchor: str,
                  _x0: dict[str, float] | None = None) -> JodScale:
    """Maximum-likelihood scale values anchored so ``anchor`` is 0.

    A disconnected comparison graph is scaled per component with a
    warning; components not containing the anchor pin their first
    stimulus at 0 instead.
    """
    if anchor not in tally.stimuli:
        raise SchemaError(f"anchor {anchor!r} is not in the tally")
    n = len(tally.stimuli)
    edges = [(tally.index(a), tally.index(b)) for a, b in tally.compared_pairs]
    comps = _components(n, edges)
    if len(comps) > 1:
        warnings.warn(
            f"comparison graph for {tally.group} has {len(comps)} disconnected "
            "components; scale values are only comparable within a component",
            stacklevel=2,
        )

    values = np.zeros(n)
    anchor_idx = tally.index(anchor)
    for comp in comps:
        comp = sorted(comp)
        fixed = anchor_idx if anchor_idx in comp else comp[0]
        sub = np.ix_(comp, comp)
        x0 = None
        if _x0 is not None:
            x0 = np.array([_x0.get(tally.stimuli[i], 0.0) for i in comp])
        solved = _maximize(tally.counts[sub], comp.index(fixed), x0)
        values[comp] = solved

    jod = {stim: float(values[i]) for i, stim in enumerate(tally.stimuli)}
    jod[anchor] = 0.0
    return JodScale(group=tally.group, anchor=anchor, jod=jod)


def bootstrap_jod(tally: PairwiseTally, anchor: str, iterations: int = 1000,
                  seed: int = 0) -> dict[str, tuple[float, float]] | None:
    """95% percentile intervals from subject resampling.

    Each iteration draws subjects with replacement (one deterministic RNG
    stream per (seed, iteration), so runs are schedule-independent),
    rebuilds the tally over the same compared pairs, rescales and
    re-anchors; the anchored stimulus always sits at 0 so its interval
    has zero width. Returns None (undefined marker) when fewer than two
    subjects voted.
    """
    if iterations < 1:
        raise DomainError("iterations must be positive")
    subjects = tally.subjects
    if len(subjects) < 2:
        return None
    n = len(tally.stimuli)
    index = {s: i for i, s in enumerate(tally.stimuli)}
    subject_pos = {s: k for k, s in enumerate(subjects)}

    # Per-subject count contributions; a resample's tally is the pair
    # initialization plus the sum over drawn subjects, identical to
    # rebuilding from the concatenated vote log.
    per_subject = np.zeros((len(subjects), n, n))
    for vote in tally.votes:
        k = subject_pos[vote.session]
        i, j = index[vote.left], index[vote.right]
        if vote.choice == "not_sure":
            per_subject[k, i, j] += NOT_SURE_SPLIT
            per_subject[k, j, i] += NOT_SURE_SPLIT
        else:
            wi = index[vote.winner]
            li = j if wi == i else i
            per_subject[k, wi, li] += 1.0
    init = np.zeros((n, n))
    for a, b in tally.compared_pairs:
        init[index[a], index[b]] = PAIR_INIT
        init[index[b], index[a]] = PAIR_INIT

    point = thurstone_jod(tally, anchor)
    samples = np.empty((iterations, n))
    for it in range(iterations):
        rng = np.random.default_rng([seed, it])
        chosen = rng.integers(0, len(subjects), size=len(subjects))
        counts = init + per_subject[chosen].sum(axis=0)
        resampled = PairwiseTally(group=tally.group, stimuli=list(tally.stimuli),
                                  counts=counts, not_sure_count={}, votes=[])
        scale = thurstone_jod(resampled, anchor, _x0=point.jod)
        samples[it] = [scale.jod[s] for s in tally.stimuli]

    lo = np.percentile(samples, 2.5, axis=0)
    hi = np.percentile(samples, 97.5, axis=0)
    ci = {stim: (float(lo[i]), float(hi[i])) for i, stim in enumerate(tally.stimuli)}
    ci[anchor] = (0.0, 0.0)
    return ci


def scale_with_ci(tally: PairwiseTally, anchor: str, iterations: int = 1000,
                  seed: int = 0) -> JodScale:
    scale = thurstone_jod(tally, anchor)
    ci = bootstrap_jod(tally, anchor, iterations=iterations, seed=seed)
    return JodScale(group=scale.group, anchor=anchor, jod=scale.jod, ci=ci)
