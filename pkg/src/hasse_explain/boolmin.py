"""Exact two-level minimization (Quine-McCluskey primes + exact cover).

Minterms are tuples of 0/1, one entry per variable in ``variables`` order;
the string ``"10"`` is accepted as shorthand for ``(1, 0)``.  Every minterm
that is neither a target nor a non-target is a don't-care.

Internally a cube is a pair of ints ``(value, care)`` where bit ``i`` stands
for variable ``i``; ``care`` marks the fixed positions and ``value`` holds
their polarity (bits outside ``care`` are zero).
"""

from __future__ import annotations

import logging
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass

from .errors import ConflictingSpec, EmptyTargets, TooManyVariables, ValidationError

log = logging.getLogger(__name__)

DEFAULT_MAX_VARIABLES = 16
DEFAULT_SEARCH_BUDGET = 1 << 12
# Above this width the don't-care space makes tabular merging too slow.
TABULAR_MAX_WIDTH = 10

Minterm = tuple[int, ...]
Literal = tuple[int, bool]
Implicant = tuple[Literal, ...]
Cube = tuple[int, int]


def _coerce(m: Sequence[int] | str, width: int) -> Minterm:
    bits = tuple(int(c) for c in m) if isinstance(m, str) else tuple(int(b) for b in m)
    if len(bits) != width or any(b not in (0, 1) for b in bits):
        raise ValidationError(f"minterm {m!r} is not a 0/1 vector of width {width}")
    return bits


def _to_int(bits: Minterm) -> int:
    return sum(b << i for i, b in enumerate(bits))


@dataclass(frozen=True)
class BooleanSpec:
    variables: tuple[Hashable, ...]
    targets: frozenset[Minterm]
    non_targets: frozenset[Minterm]
    dropped: int = 0

    def __post_init__(self):
        width = len(self.variables)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "targets", frozenset(_coerce(m, width) for m in self.targets))
        object.__setattr__(self, "non_targets", frozenset(_coerce(m, width) for m in self.non_targets))
        if len(set(self.variables)) != width:
            raise ValidationError("duplicate variables")
        clash = self.targets & self.non_targets
        if clash:
            raise ConflictingSpec(f"{len(clash)} minterm(s) are both target and non-target")

    @classmethod
    def from_observations(
        cls,
        variables: Sequence[Hashable],
        targets: Iterable[Sequence[int] | str],
        non_targets: Iterable[Sequence[int] | str],
        *,
        on_conflict: str = "drop_both",
    ) -> BooleanSpec:
        """Build a spec from possibly overlapping observations.

        ``on_conflict`` chooses what happens to a minterm observed on both
        sides: ``"drop_both"`` removes it everywhere, ``"drop_non_targets"``
        keeps it as a target only.  The number of such minterms is stored in
        ``dropped``.
        """
        width = len(variables)
        t = {_coerce(m, width) for m in targets}
        f = {_coerce(m, width) for m in non_targets}
        clash = t & f
        if on_conflict == "drop_both":
            t -= clash
        elif on_conflict != "drop_non_targets":
            raise ValueError(f"unknown conflict policy {on_conflict!r}")
        f -= clash
        if clash:
            log.info("dropped %d indistinguishable observation(s)", len(clash))
        return cls(tuple(variables), frozenset(t), frozenset(f), len(clash))


@dataclass(frozen=True)
class Formula:
    """Disjunction of implicants; ``((),)`` is the constant true."""

    variables: tuple[Hashable, ...]
    implicants: tuple[Implicant, ...]
    approximate: bool = False

    @property
    def is_true(self) -> bool:
        return any(not imp for imp in self.implicants)

    @property
    def literal_count(self) -> int:
        return sum(len(imp) for imp in self.implicants)

    def evaluate(self, minterm: Sequence[int] | str) -> bool:
        bits = _coerce(minterm, len(self.variables))
        return any(all(bits[i] == int(pos) for i, pos in imp) for imp in self.implicants)

    def positive_variables(self) -> list[Hashable]:
        idx = sorted({i for imp in self.implicants for i, pos in imp if pos})
        return [self.variables[i] for i in idx]

    def negative_variables(self) -> list[Hashable]:
        idx = sorted({i for imp in self.implicants for i, pos in imp if not pos})
        return [self.variables[i] for i in idx]

    def __str__(self) -> str:
        if not self.implicants:
            return "false"
        if self.is_true:
            return "true"
        terms = [
            " ∧ ".join(("" if pos else "¬") + str(self.variables[i]) for i, pos in imp)
            for imp in self.implicants
        ]
        if len(terms) == 1:
            return terms[0]
        return " ∨ ".join(f"({t})" if "∧" in t else t for t in terms)


def _covers(cube: Cube, m: int) -> bool:
    value, care = cube
    return m & care == value


def _primes_tabular(n: int, on: Sequence[int], off: set[int]) -> set[Cube]:
    # classic pair merging; cubes here are (value, dont_care_mask)
    current = {(m, 0) for m in range(1 << n) if m not in off}
    primes: set[tuple[int, int]] = set()
    while current:
        merged = set()
        used = set()
        for value, dc in current:
            for i in range(n):
                b = 1 << i
                if (dc | value) & b:
                    continue
                partner = (value | b, dc)
                if partner in current:
                    merged.add((value, dc | b))
                    used.add((value, dc))
                    used.add(partner)
        primes |= current - used
        current = merged
    full = (1 << n) - 1
    cubes = {(value, full & ~dc) for value, dc in primes}
    return {c for c in cubes if any(_covers(c, t) for t in on)}


def _minimal_only(sets: Iterable[int]) -> list[int]:
    keep: list[int] = []
    for s in sorted(set(sets), key=lambda s: (s.bit_count(), s)):
        if not any(k & s == k for k in keep):
            keep.append(s)
    return keep


def _minimal_transversals(family: Iterable[int]) -> list[int]:
    """Minimal bit sets intersecting every member of ``family``."""
    trans = [0]
    for s in _minimal_only(family):
        nxt = set()
        for t in trans:
            if t & s:
                nxt.add(t)
                continue
            rest = s
            while rest:
                low = rest & -rest
                nxt.add(t | low)
                rest ^= low
        trans = _minimal_only(nxt)
    return trans


def _primes_expand(n: int, on: Sequence[int], off: set[int]) -> set[Cube]:
    # A cube through target t avoids every off-set point f iff its fixed
    # positions hit every difference mask t ^ f; primes are the minimal hits.
    primes: set[Cube] = set()
    for t in on:
        for care in _minimal_transversals(t ^ f for f in off):
            primes.add((t & care, care))
    return primes


def prime_implicants(
    n: int, on: Iterable[int], off: Iterable[int], method: str = "auto"
) -> list[Cube]:
    """Prime implicants covering at least one ``on`` minterm, everything
    outside ``off`` being allowed."""
    on = sorted(set(on))
    off = set(off)
    if method == "auto":
        method = "tabular" if n <= TABULAR_MAX_WIDTH else "expand"
    if method == "tabular":
        primes = _primes_tabular(n, on, off)
    elif method == "expand":
        primes = _primes_expand(n, on, off)
    else:
        raise ValueError(f"unknown prime generation method {method!r}")
    return sorted(primes, key=lambda c: (c[1].bit_count(), _cube_key(c, n)))


def _cube_key(cube: Cube, n: int) -> tuple:
    value, care = cube
    return tuple((i, 0 if value >> i & 1 else 1) for i in range(n) if care >> i & 1)


def _select_cover(primes: list[Cube], on: list[int], n: int, budget: int) -> tuple[list[Cube], bool]:
    """Cheapest prime cover by (count, literals, key); exact unless the
    branch-and-bound budget runs out.

    The cover table is first shrunk to its cyclic core by repeatedly taking
    essential primes and discarding dominated rows and columns.  Column
    dominance only drops a prime when another covers at least the same rows
    and is cheaper, or equally cheap with a smaller key, so the ranking of
    the optimum is preserved.
    """
    cov = [sum(1 << j for j, m in enumerate(on) if m & care == value) for value, care in primes]
    cost = [p[1].bit_count() for p in primes]
    keys = [_cube_key(p, n) for p in primes]
    order = {p: r for r, p in enumerate(sorted(range(len(primes)), key=lambda p: (cost[p], keys[p])))}
    by_row = [[p for p in range(len(primes)) if cov[p] >> j & 1] for j in range(len(on))]

    chosen: list[int] = []
    need = (1 << len(on)) - 1
    cols = set(range(len(primes)))

    def covering(j: int) -> list[int]:
        return [p for p in by_row[j] if p in cols]

    def rows(mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    changed = True
    while changed and need:
        changed = False
        for j in rows(need):
            if not need >> j & 1:
                continue
            cs = covering(j)
            if len(cs) == 1:
                p = cs[0]
                chosen.append(p)
                need &= ~cov[p]
                cols.discard(p)
                changed = True
        if not need:
            break
        cols = {p for p in cols if cov[p] & need}
        for p in sorted(cols, key=order.__getitem__, reverse=True):
            mine = cov[p] & need
            low = (mine & -mine).bit_length() - 1
            if any(q != p and order[q] < order[p] and mine & ~cov[q] == 0 for q in covering(low)):
                cols.discard(p)
                changed = True
        # rows with identical prime sets are covered together; keep the first
        seen: set[int] = set()
        for j in rows(need):
            colset = sum(1 << p for p in covering(j))
            if colset in seen:
                need &= ~(1 << j)
                changed = True
            seen.add(colset)

    if not need:
        return [primes[p] for p in chosen], False

    pool = sorted(cols, key=order.__getitem__)
    base_lits = sum(cost[p] for p in chosen)
    table = {j: [p for p in pool if cov[p] >> j & 1] for j in rows(need)}

    def rank(sel: list[int], lits: int) -> tuple:
        return (len(sel), lits, tuple(sorted(keys[p] for p in sel)))

    row_order = sorted(table, key=lambda j: (len(table[j]), j))
    row_cols = {j: sum(1 << p for p in table[j]) for j in table}
    row_cost = {j: min(cost[p] for p in table[j]) for j in table}

    def bound(unc: int) -> tuple[int, int]:
        # rows sharing no prime each need their own implicant
        taken = count = lits = 0
        for j in row_order:
            if unc >> j & 1 and not taken & row_cols[j]:
                taken |= row_cols[j]
                count += 1
                lits += row_cost[j]
        return count, lits

    # greedy incumbent
    sel = list(chosen)
    unc = need
    while unc:
        p = min(pool, key=lambda p: (-(cov[p] & unc).bit_count(), order[p]))
        sel.append(p)
        unc &= ~cov[p]
    best = rank(sel, sum(cost[p] for p in sel))
    best_sel = sel
    nodes = 0
    exhausted = False

    def search(unc: int, sel: list[int], lits: int) -> None:
        nonlocal best, best_sel, nodes, exhausted
        if nodes >= budget:
            exhausted = True
            return
        nodes += 1
        if not unc:
            r = rank(sel, lits)
            if r < best:
                best, best_sel = r, list(sel)
            return
        extra, extra_lits = bound(unc)
        if (len(sel) + extra, lits + extra_lits) > best[:2]:
            return
        j = next(j for j in row_order if unc >> j & 1)
        for p in sorted(table[j], key=lambda p: (-(cov[p] & unc).bit_count(), order[p])):
            sel.append(p)
            search(unc & ~cov[p], sel, lits + cost[p])
            sel.pop()

    search(need, list(chosen), base_lits)
    return [primes[p] for p in best_sel], exhausted


def minimize(
    spec: BooleanSpec,
    *,
    max_variables: int = DEFAULT_MAX_VARIABLES,
    budget: int = DEFAULT_SEARCH_BUDGET,
    method: str = "auto",
) -> Formula:
    """Smallest DNF that is true on every target and false on every non-target.

    Ranked by implicant count, then total literal count, then lexicographic
    implicant order.  When the cover search exceeds ``budget`` nodes the best
    cover found so far is returned with ``approximate=True``.
    """
    n = len(spec.variables)
    if n > max_variables:
        raise TooManyVariables(n, max_variables)
    if not spec.targets:
        raise EmptyTargets("nothing to separate: the target set is empty")
    if not spec.non_targets:
        return Formula(spec.variables, ((),))
    on = sorted(_to_int(t) for t in spec.targets)
    off = {_to_int(f) for f in spec.non_targets}
    primes = prime_implicants(n, on, off, method)
    cubes, approximate = _select_cover(primes, on, n, budget)
    if approximate:
        log.warning("cover search budget of %d nodes exhausted; result may not be minimal", budget)
    implicants = tuple(
        tuple((i, bool(value >> i & 1)) for i in range(n) if care >> i & 1)
        for value, care in sorted(cubes, key=lambda c: _cube_key(c, n))
    )
    return Formula(spec.variables, implicants, approximate)
