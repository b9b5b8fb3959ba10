"""Orbit iteration and convergence experiments on classes and currents.

Every verdict here is bound-qualified: "no periodic class" always means "none
found among the classes and iterates that were actually checked".
"""

import itertools
import math
import os
import random
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .automorphisms import compose, conjugate, identity, power, restrict
from .currents import (
    DEFAULT_WINDOW,
    from_class,
    lift,
    marked_letter_fraction,
    proj_distance,
)
from .errors import (
    BudgetExceeded,
    LengthCapExceeded,
    MarkedClassNotFixed,
    NotEmpiricallyAtoroidal,
    NotEmpiricallyAtoroidalOnA,
    RankMismatch,
)
from .words import CyclicWord, Word, enumerate_classes, random_cyclic_word

BUDGET_ENV = "FGADYN_BUDGET"
DEFAULT_SCAN_CAP = 10 ** 5


class Budget:
    """Work counter in letters produced; ``None`` means unlimited."""

    def __init__(self, limit=None):
        env = os.environ.get(BUDGET_ENV)
        if env:
            limit = int(float(env))
        self.limit = limit
        self.used = 0

    def charge(self, letters):
        self.used += int(letters)
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(self.limit)


def _as_budget(budget):
    return budget if isinstance(budget, Budget) else Budget(budget)


@dataclass
class ExperimentConfig:
    window: int = DEFAULT_WINDOW
    n_max: int = 25
    length_cap: int = 10 ** 8
    tol: float = 0.02
    seed: int = 0
    num_seeds: int = 5
    max_seed_len: int = 6
    marked_generator: Optional[int] = None
    scan_max_len: int = 4
    scan_iters: int = 10
    scan_length_cap: int = DEFAULT_SCAN_CAP
    budget: Optional[int] = None

    def __post_init__(self):
        for name in ("window", "length_cap", "num_seeds", "max_seed_len",
                     "scan_max_len", "scan_iters", "scan_length_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def snapshot(self):
        return dict(self.__dict__)


# -- orbits --------------------------------------------------------------------------

@dataclass
class OrbitStep:
    index: int
    digest: str
    length: int
    frequencies: object = None


@dataclass
class OrbitRecord:
    seed: CyclicWord
    steps: list
    verdict: str
    period: Optional[int] = None
    periodic_class: Optional[CyclicWord] = None


def orbit(phi, seed, K, length_cap=DEFAULT_SCAN_CAP, window=None, budget=None):
    """Iterate the class action up to K times, stopping at a verified return.

    The action on classes is a bijection, so the first repeated class is the
    seed itself; a digest hit is confirmed by exact comparison and by
    re-applying phi^p.
    """
    _check_rank(phi, seed)
    budget = _as_budget(budget)
    key = (len(seed), seed.digest())
    steps = []
    cur = seed
    for k in range(K + 1):
        freq = from_class(cur, window).frequencies() if window else None
        digest = cur.digest()
        steps.append(OrbitStep(k, digest, len(cur), freq))
        if k > 0 and (len(cur), digest) == key and cur == seed:
            if verify_period(phi, seed, k, length_cap):
                return OrbitRecord(seed, steps, "PeriodicFound", k, seed)
        if k == K:
            break
        try:
            nxt = phi.apply_class(cur, length_cap)
        except LengthCapExceeded:
            return OrbitRecord(seed, steps, "LengthCapExceeded")
        budget.charge(len(nxt))
        cur = nxt
    return OrbitRecord(seed, steps, "Completed")


def verify_period(phi, h, p, length_cap=None):
    """Direct check that p forward applications return h."""
    cur = h
    for _ in range(p):
        cur = phi.apply_class(cur, length_cap)
    return cur == h


# -- atoroidality scan -------------------------------------------------------------------

@dataclass
class AtoroidalVerdict:
    tag: str
    max_len: int
    iterations: int
    length_cap: int
    periodic_class: Optional[CyclicWord] = None
    period: Optional[int] = None
    periodic_classes: list = field(default_factory=list)
    single_primitive: Optional[bool] = None
    classes_checked: int = 0
    truncated: int = 0
    checked_bound: int = 0

    @property
    def found(self):
        return self.tag == "PeriodicClassFound"


def minimal_period(phi, h, K, length_cap=DEFAULT_SCAN_CAP, budget=None):
    """Least p <= K with phi^p(h) = h, searched by meeting in the middle.

    Forward iterates phi^i(h) and backward iterates phi^-j(h) are compared;
    a match means phi^(i+j)(h) = h because phi acts bijectively on classes.
    Returns ``(period_or_None, checked_bound)`` where every period up to
    ``checked_bound`` was covered: K when a period is found, less than K
    when the length cap stopped one of the legs.
    """
    budget = _as_budget(budget)
    fwd = [h]
    a_target = (K + 1) // 2
    while len(fwd) - 1 < a_target:
        try:
            nxt = phi.apply_class(fwd[-1], length_cap)
        except LengthCapExceeded:
            break
        budget.charge(len(nxt))
        fwd.append(nxt)
        if nxt == h:
            return len(fwd) - 1, K
    a_max = len(fwd) - 1
    by_len = {}
    for i, c in enumerate(fwd):
        by_len.setdefault(len(c), []).append(i)
    b_target = K - a_max
    best = None
    cur = h
    b_max = 0
    for j in range(1, b_target + 1):
        try:
            cur = phi.apply_class_inverse(cur, length_cap)
        except LengthCapExceeded:
            break
        budget.charge(len(cur))
        b_max = j
        for i in by_len.get(len(cur), ()):
            if i + j > 0 and fwd[i] == cur:
                if best is None or i + j < best:
                    best = i + j
        if best is not None and best <= j + 1:
            break
    if best is not None:
        return best, K
    return None, min(K, a_max + b_max)


def _single_primitive(classes):
    roots = set()
    for h in classes:
        r, _ = h.root()
        roots.add(min(r, r.inverse()))
    return len(roots) <= 1


def atoroidal_scan(phi, L, K, length_cap=DEFAULT_SCAN_CAP, stop_at_first=False, budget=None):
    """Look for a class of length <= L whose class is fixed by some phi^p, p <= K.

    Classes are taken modulo rotation and inversion, shortest first.  Found
    periods are re-verified by forward iteration.  Without ``stop_at_first``
    every class is examined so that ``periodic_classes`` is complete for
    these bounds.
    """
    if L < 1 or K < 1:
        raise ValueError("bounds must be positive")
    budget = _as_budget(budget)
    found = []
    checked = 0
    truncated = 0
    bound = K
    try:
        for h in enumerate_classes(phi.rank, L):
            checked += 1
            p, b = minimal_period(phi, h, K, length_cap, budget)
            if b < K:
                truncated += 1
                bound = min(bound, b)
            if p is not None:
                if not verify_period(phi, h, p):
                    raise AssertionError(f"period {p} of {h} failed re-verification")
                found.append((h, p))
                if stop_at_first:
                    break
    except BudgetExceeded as exc:
        exc.partial = _scan_verdict(L, K, length_cap, found, checked, truncated, bound)
        raise
    return _scan_verdict(L, K, length_cap, found, checked, truncated, bound)


def _scan_verdict(L, K, length_cap, found, checked, truncated, bound):
    if found:
        h, p = found[0]
        return AtoroidalVerdict(
            "PeriodicClassFound", L, K, length_cap, h, p,
            periodic_classes=found,
            single_primitive=_single_primitive([c for c, _ in found]),
            classes_checked=checked, truncated=truncated, checked_bound=bound,
        )
    return AtoroidalVerdict("NonePeriodicUpTo", L, K, length_cap,
                            classes_checked=checked, truncated=truncated, checked_bound=bound)


# -- north-south experiment ----------------------------------------------------------------

@dataclass
class SimplexEstimate:
    vertices: list
    window: int
    residual: Optional[float]
    pairwise: list = field(default_factory=list)


@dataclass
class SeedRun:
    seed: CyclicWord
    lengths: list
    frequencies: object
    residual: Optional[float]
    stability_gap: Optional[float]
    iterations: int
    capped: bool = False


@dataclass
class NSReport:
    forward: SimplexEstimate
    backward: SimplexEstimate
    forward_runs: list
    backward_runs: list
    scan: AtoroidalVerdict
    config: ExperimentConfig


def random_seeds(rank, count, max_len, rng, exclude=None):
    seeds = []
    guard = 0
    while len(seeds) < count:
        h = random_cyclic_word(rng, rank, max_len)
        guard += 1
        if exclude is not None and exclude(h) and guard < 100000:
            continue
        seeds.append(h)
    return seeds


def run_seed(phi, seed, n_max, window, length_cap, inverse=False, budget=None,
             keep_classes=False):
    """Iterate a seed n_max times, recording lengths and the Cauchy gap."""
    budget = _as_budget(budget)
    act = phi.apply_class_inverse if inverse else phi.apply_class
    cur = seed
    lengths = [len(seed)]
    prev_v = None
    v = from_class(seed, window)
    capped = False
    n_done = 0
    classes = [seed] if keep_classes else None
    for _ in range(n_max):
        try:
            nxt = act(cur, length_cap)
        except LengthCapExceeded:
            capped = True
            break
        budget.charge(len(nxt))
        cur = nxt
        prev_v, v = v, from_class(cur, window)
        lengths.append(len(cur))
        n_done += 1
        if keep_classes:
            classes.append(cur)
    residual = proj_distance(v, prev_v) if prev_v is not None else None
    gap = None
    if n_max > 0 and not capped:
        try:
            nxt = act(cur, length_cap)
            budget.charge(len(nxt))
            gap = proj_distance(from_class(nxt, window), v)
        except LengthCapExceeded:
            gap = None
    run = SeedRun(seed, lengths, v.frequencies(), residual, gap, n_done, capped)
    if keep_classes:
        run.classes = classes
    return run


def cluster(vectors, tol):
    """Greedy clustering: a vector joins the first cluster whose centre is within tol."""
    centres = []
    for fv in vectors:
        if not any(proj_distance(fv, c) < tol for c in centres):
            centres.append(fv)
    return centres


def _estimate(runs, window, tol):
    fvs = [r.frequencies for r in runs]
    pairwise = [[proj_distance(a, b) for b in fvs] for a in fvs]
    res = [r.residual for r in runs if r.residual is not None]
    return SimplexEstimate(cluster(fvs, tol), window, max(res) if res else None, pairwise)


def ns_experiment(phi, config=None, seeds=None, check_scan=True):
    """Forward and backward orbits of seed currents and their limit clusters."""
    config = config or ExperimentConfig()
    budget = Budget(config.budget)
    scan = None
    if check_scan:
        scan = atoroidal_scan(phi, config.scan_max_len, config.scan_iters,
                              config.scan_length_cap, stop_at_first=True, budget=budget)
        if scan.found:
            raise NotEmpiricallyAtoroidal(
                f"class {scan.periodic_class} has period {scan.period}", verdict=scan)
    if seeds is None:
        rng = random.Random(config.seed)
        seeds = random_seeds(phi.rank, config.num_seeds, config.max_seed_len, rng)
    fwd, bwd = [], []
    try:
        for h in seeds:
            fwd.append(run_seed(phi, h, config.n_max, config.window, config.length_cap,
                                budget=budget))
        for h in seeds:
            bwd.append(run_seed(phi, h, config.n_max, config.window, config.length_cap,
                                inverse=True, budget=budget))
    except BudgetExceeded as exc:
        exc.partial = {"forward_runs": fwd, "backward_runs": bwd}
        raise
    return NSReport(_estimate(fwd, config.window, config.tol),
                    _estimate(bwd, config.window, config.tol), fwd, bwd, scan, config)


# -- growth profile ------------------------------------------------------------------------

@dataclass
class GrowthProfile:
    seed: CyclicWord
    lengths: list
    ratio: float
    thresholds: dict


def fitted_ratio(lengths):
    """exp of the least-squares slope of log length over the last half of the series."""
    if len(lengths) < 2:
        return 1.0
    start = len(lengths) // 2
    ys = np.log(np.asarray(lengths[start:], dtype=float))
    if ys.size < 2:
        ys = np.log(np.asarray(lengths[-2:], dtype=float))
    xs = np.arange(ys.size, dtype=float)
    slope = np.polyfit(xs, ys, 1)[0]
    return float(math.exp(slope))


def growth_profile(phi, seed, n_max, thresholds=(2, 10, 100), length_cap=10 ** 8, budget=None):
    """Lengths |phi^n h| for n <= n_max, threshold crossings and a fitted ratio."""
    _check_rank(phi, seed)
    budget = _as_budget(budget)
    lengths = [len(seed)]
    cur = seed
    for _ in range(n_max):
        try:
            cur = phi.apply_class(cur, length_cap)
        except LengthCapExceeded as exc:
            exc.partial = lengths
            raise
        budget.charge(len(cur))
        lengths.append(len(cur))
    crossings = {}
    for c in thresholds:
        crossings[c] = next((n for n, x in enumerate(lengths) if x >= c * lengths[0]), None)
    return GrowthProfile(seed, lengths, fitted_ratio(lengths), crossings)


# -- generalized north-south experiment --------------------------------------------------------

@dataclass
class GNSSeed:
    seed: CyclicWord
    verdict: str
    forward_fraction: list
    backward_fraction: list
    forward_distance: list
    backward_distance: list
    cone: list


@dataclass
class GNSReport:
    marked_generator: int
    fixed_current_exact: bool
    restriction_scan: AtoroidalVerdict
    plus: SimplexEstimate
    minus: SimplexEstimate
    seeds: list
    counts: dict
    config: ExperimentConfig


def fixed_generator(phi):
    """Last generator whose class phi fixes, or None."""
    for i in range(phi.rank, 0, -1):
        x = CyclicWord(Word.generator(i, phi.rank))
        if phi.apply_class(x) == x:
            return i
    return None


def _min_distance(fv, estimate):
    return min(proj_distance(fv, c) for c in estimate.vertices)


def _nearest(fv, estimate):
    return min(estimate.vertices, key=lambda c: proj_distance(fv, c))


def gns_experiment(phi, config=None, seeds=None):
    """Forward/backward dichotomy for phi fixing a generator class, F_N = A * <g>."""
    config = config or ExperimentConfig(n_max=20, num_seeds=10)
    N = phi.rank
    g = config.marked_generator
    if g is None:
        g = fixed_generator(phi)
        if g is None:
            raise MarkedClassNotFixed("no generator class is fixed; pass a marked generator")
    gclass = CyclicWord(Word.generator(g, N))
    if phi.apply_class(gclass) != gclass:
        raise MarkedClassNotFixed(f"class of generator {g} is not fixed")
    others = [i for i in range(1, N + 1) if i != g]
    phi_a = restrict(phi, others)
    scan = atoroidal_scan(phi_a, config.scan_max_len, config.scan_iters,
                          config.scan_length_cap, stop_at_first=True)
    if scan.found:
        raise NotEmpiricallyAtoroidalOnA(
            f"restriction has periodic class {scan.periodic_class}", verdict=scan)
    eta_g = from_class(gclass, config.window)
    fixed_exact = bool(from_class(phi.apply_class(gclass), config.window) == eta_g)

    ns = ns_experiment(phi_a, replace(config, marked_generator=None), check_scan=False)
    mapping = {j + 1: others[j] for j in range(len(others))}
    plus = SimplexEstimate([lift(v, N, mapping) for v in ns.forward.vertices],
                           config.window, ns.forward.residual)
    minus = SimplexEstimate([lift(v, N, mapping) for v in ns.backward.vertices],
                            config.window, ns.backward.residual)
    f_g = eta_g.frequencies()

    if seeds is None:
        rng = random.Random(config.seed + 1)
        seeds = random_seeds(N, config.num_seeds, config.max_seed_len, rng,
                             exclude=lambda h: h.is_power_of(gclass))
    budget = Budget(config.budget)
    results = []
    for h in seeds:
        if h.is_power_of(gclass):
            raise ValueError("seeds must not be powers of the marked generator")
        fw = _fraction_run(phi.apply_class, h, g, config, budget)
        bw = _fraction_run(phi.apply_class_inverse, h, g, config, budget)
        d_plus = [_min_distance(fv, plus) for fv in fw[1]]
        d_minus = [_min_distance(fv, minus) for fv in bw[1]]
        cone = []
        for t, fv in zip(fw[0], fw[1]):
            target = f_g.combine(_nearest(fv, plus), t)
            cone.append((t, proj_distance(fv, target)))
        if d_plus[-1] < config.tol:
            verdict = "ForwardToPlus"
        elif d_minus[-1] < config.tol:
            verdict = "BackwardToMinus"
        else:
            verdict = "Inconclusive"
        results.append(GNSSeed(h, verdict, fw[0], bw[0], d_plus, d_minus, cone))
    counts = {k: sum(r.verdict == k for r in results)
              for k in ("ForwardToPlus", "BackwardToMinus", "Inconclusive")}
    return GNSReport(g, fixed_exact, scan, plus, minus, results, counts, config)


def _fraction_run(act, h, g, config, budget):
    fracs, fvs = [], []
    cur = h
    for k in range(config.n_max + 1):
        v = from_class(cur, config.window)
        fracs.append(marked_letter_fraction(v, g))
        fvs.append(v.frequencies())
        if k == config.n_max:
            break
        try:
            cur = act(cur, config.length_cap)
        except LengthCapExceeded:
            break
        budget.charge(len(cur))
    return fracs, fvs


# -- ping-pong and subgroups -------------------------------------------------------------------

def pingpong(phi, psi, m, n):
    """theta^m phi^n with theta = psi phi psi^-1."""
    if phi.rank != psi.rank:
        raise RankMismatch(f"ranks {phi.rank} and {psi.rank} differ")
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    theta = conjugate(phi, psi)
    out = compose(power(theta, m), power(phi, n))
    out.label = f"pingpong({phi.label or 'phi'},{psi.label or 'psi'},{m},{n})"
    return out


@dataclass
class SubgroupVerdict:
    tag: str
    product_len: int
    max_len: int
    iterations: int
    periodic_class: Optional[CyclicWord] = None
    orbit_size: Optional[int] = None
    orbit: list = field(default_factory=list)
    product: tuple = ()
    scan: Optional[AtoroidalVerdict] = None
    products_scanned: int = 0


def finite_orbit(generators, h, orbit_cap, length_cap, memo_infinite=None, budget=None):
    """Forward closure of h under the generators, or None if it outgrows the caps.

    A finite forward closure is permuted by every generator, so it is the
    orbit of the whole subgroup.  ``memo_infinite`` holds classes already
    known to outgrow the caps, which any closure containing them also does.
    """
    memo_infinite = memo_infinite if memo_infinite is not None else set()
    budget = _as_budget(budget)
    seen = {h}
    order = [h]
    for c in order:
        for phi in generators:
            try:
                img = phi.apply_class(c, length_cap)
            except LengthCapExceeded:
                memo_infinite.add(h)
                return None
            budget.charge(len(img))
            if img in memo_infinite:
                memo_infinite.add(h)
                return None
            if img not in seen:
                seen.add(img)
                order.append(img)
                if len(order) > orbit_cap:
                    memo_infinite.add(h)
                    return None
    return order


def reduced_products(num_generators, B):
    """Index words over generators and inverses, no letter next to its inverse."""
    letters = [(i, s) for i in range(num_generators) for s in (1, -1)]
    for n in range(1, B + 1):
        for word in itertools.product(letters, repeat=n):
            if any(a[0] == b[0] and a[1] == -b[1] for a, b in zip(word, word[1:])):
                continue
            yield word


def product_auto(generators, word):
    out = identity(generators[0].rank)
    for i, s in word:
        out = compose(out, generators[i] if s > 0 else generators[i].inverse())
    return out


def subgroup_scan(generators, B, L, K, orbit_cap=24, length_cap=DEFAULT_SCAN_CAP, budget=None):
    """Look for a finite class orbit, then for an empirically atoroidal product."""
    generators = list(generators)
    if not generators:
        raise ValueError("need at least one generator")
    rank = generators[0].rank
    if any(g.rank != rank for g in generators):
        raise RankMismatch("generators must share a rank")
    budget = _as_budget(budget)
    scanned = 0
    try:
        memo = set()
        for h in enumerate_classes(rank, L):
            orb = finite_orbit(generators, h, orbit_cap, length_cap, memo, budget)
            if orb is not None:
                return SubgroupVerdict("FiniteOrbitFound", B, L, K, h, len(orb), orb)
        for word in reduced_products(len(generators), B):
            prod = product_auto(generators, word)
            verdict = atoroidal_scan(prod, L, K, length_cap, stop_at_first=True, budget=budget)
            scanned += 1
            if not verdict.found:
                return SubgroupVerdict("EmpiricalAtoroidalFound", B, L, K, product=word,
                                       scan=verdict, products_scanned=scanned)
    except BudgetExceeded as exc:
        exc.partial = SubgroupVerdict("Inconclusive", B, L, K, products_scanned=scanned)
        raise
    return SubgroupVerdict("Inconclusive", B, L, K, products_scanned=scanned)


def _check_rank(phi, h):
    if phi.rank != h.rank:
        raise RankMismatch(f"automorphism of rank {phi.rank} on class of rank {h.rank}")
