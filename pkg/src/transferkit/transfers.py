"""Transfer systems on a subgroup lattice: validation, completion, enumeration.

A transfer system is a reflexive, transitive relation on subgroups refining
containment and closed under conjugation and restriction. Only strict pairs
(K, H) with K < H are stored, as a bitmask over the lattice's strict-pair
index space; reflexive pairs are implicit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .groups import Group, SubgroupLattice, group_hash

ORACLE_PAIR_BOUND = 22


class NotRefining(ValueError):
    def __init__(self, k: int, h: int):
        self.pair = (k, h)
        super().__init__(f"pair (K={k}, H={h}) does not refine containment")


class SearchBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    axiom: str  # refinement | conjugation | restriction | transitivity
    pair: tuple[int, int]
    witness: tuple
    missing: Optional[tuple[int, int]] = None

    def describe(self) -> str:
        msg = f"{self.axiom} fails at pair {self.pair} with witness {self.witness}"
        if self.missing is not None:
            msg += f"; missing pair {self.missing}"
        return msg


class PairSpace:
    """Index space of strict subgroup pairs with precomputed closure data."""

    _cache: dict[int, "PairSpace"] = {}

    def __init__(self, lattice: SubgroupLattice):
        self.lattice = lattice
        n = len(lattice)
        self.pairs = [(k, h) for k in range(n) for h in range(n)
                      if k != h and lattice.leq[k][h]]
        self.pairs.sort()
        self.index = {p: i for i, p in enumerate(self.pairs)}
        self.count = len(self.pairs)
        self.conj_mask = []
        self.restr_mask = []
        g = lattice.group
        for (k, h) in self.pairs:
            cm = 0
            for a in g.elements():
                cm |= 1 << self.index[(lattice.conjugate(k, a), lattice.conjugate(h, a))]
            self.conj_mask.append(cm)
            rm = 0
            for l in lattice.subgroups_below(h):
                kl = lattice.meet(k, l)
                if kl != l:
                    rm |= 1 << self.index[(kl, l)]
            self.restr_mask.append(rm)

    @classmethod
    def of(cls, lattice: SubgroupLattice) -> "PairSpace":
        key = id(lattice)
        if key not in cls._cache:
            cls._cache[key] = cls(lattice)
        return cls._cache[key]

    def bits(self, mask: int) -> Iterable[int]:
        i = 0
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def close(self, mask: int) -> int:
        """Staged completion: conjugation, then restriction, then transitivity."""
        m1 = 0
        for p in self.bits(mask):
            m1 |= self.conj_mask[p]
        m2 = m1
        for p in self.bits(m1):
            m2 |= self.restr_mask[p]
        return self._transitive(m2)

    def _transitive(self, mask: int) -> int:
        n = len(self.lattice)
        succ = [0] * n  # succ[k] = bitmask over subgroup indices h with k -> h
        for p in self.bits(mask):
            k, h = self.pairs[p]
            succ[k] |= 1 << h
        changed = True
        while changed:
            changed = False
            for k in range(n):
                acc = succ[k]
                for h in self.bits(succ[k]):
                    acc |= succ[h]
                if acc != succ[k]:
                    succ[k] = acc
                    changed = True
        out = 0
        for k in range(n):
            for h in self.bits(succ[k]):
                out |= 1 << self.index[(k, h)]
        return out


class TransferSystem:
    """An immutable transfer system over a fixed subgroup lattice."""

    def __init__(self, lattice: SubgroupLattice, mask: int):
        self.lattice = lattice
        self.mask = mask
        self.space = PairSpace.of(lattice)

    def contains(self, k: int, h: int) -> bool:
        if k == h:
            return True
        idx = self.space.index.get((k, h))
        return idx is not None and (self.mask >> idx) & 1 == 1

    def strict_pairs(self) -> list[tuple[int, int]]:
        return [self.space.pairs[p] for p in self.space.bits(self.mask)]

    def top_sources(self) -> list[int]:
        """Subgroup indices K with K -> G, including G itself."""
        top = self.lattice.top
        out = [k for (k, h) in self.strict_pairs() if h == top]
        out.append(top)
        return sorted(out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TransferSystem)
                and self.lattice is other.lattice and self.mask == other.mask)

    def __hash__(self) -> int:
        return hash((id(self.lattice), self.mask))

    def __le__(self, other: "TransferSystem") -> bool:
        return self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        return f"TransferSystem({self.lattice.group.name}, pairs={self.strict_pairs()})"

    def to_json(self) -> dict:
        return {"group": self.lattice.group.name,
                "pairs": [list(p) for p in self.strict_pairs()]}


def _pairs_to_mask(lattice: SubgroupLattice, pairs: Iterable[Sequence[int]],
                   strict: bool = True) -> int:
    space = PairSpace.of(lattice)
    mask = 0
    for k, h in pairs:
        if k == h:
            continue  # reflexive pairs are implicit
        if (k, h) not in space.index:
            if strict:
                raise NotRefining(k, h)
            continue
        mask |= 1 << space.index[(k, h)]
    return mask


def from_pairs(lattice: SubgroupLattice, pairs: Iterable[Sequence[int]]) -> TransferSystem:
    """Wrap explicit pairs as a transfer system without completing or validating."""
    return TransferSystem(lattice, _pairs_to_mask(lattice, pairs))


def validate(lattice: SubgroupLattice, pairs: Iterable[Sequence[int]]) -> list[Violation]:
    """Check the transfer-system axioms; violations are data, not errors."""
    violations = []
    pair_set = set()
    for k, h in pairs:
        if k == h:
            continue
        if not lattice.leq[k][h]:
            violations.append(Violation("refinement", (k, h), (k, h)))
            continue
        pair_set.add((k, h))
    g = lattice.group
    for (k, h) in sorted(pair_set):
        for a in g.elements():
            ck, ch = lattice.conjugate(k, a), lattice.conjugate(h, a)
            if ck != ch and (ck, ch) not in pair_set:
                violations.append(Violation("conjugation", (k, h), (a,), (ck, ch)))
        for l in lattice.subgroups_below(h):
            kl = lattice.meet(k, l)
            if kl != l and (kl, l) not in pair_set:
                violations.append(Violation("restriction", (k, h), (l,), (kl, l)))
    for (a, b) in sorted(pair_set):
        for (b2, c) in sorted(pair_set):
            if b == b2 and a != c and (a, c) not in pair_set:
                violations.append(Violation("transitivity", (a, b), ((b2, c),), (a, c)))
    return violations


def rubin_complete(lattice: SubgroupLattice, pairs: Iterable[Sequence[int]]) -> TransferSystem:
    """Complete a containment-refining relation to a transfer system.

    Stages: close under conjugation, then under restriction, then take the
    reflexive-transitive closure. The result always validates.
    """
    mask = _pairs_to_mask(lattice, pairs, strict=True)
    return TransferSystem(lattice, PairSpace.of(lattice).close(mask))


def meet(t1: TransferSystem, t2: TransferSystem) -> TransferSystem:
    if t1.lattice is not t2.lattice:
        raise ValueError("transfer systems live on different lattices")
    return TransferSystem(t1.lattice, t1.mask & t2.mask)


def join(t1: TransferSystem, t2: TransferSystem) -> TransferSystem:
    if t1.lattice is not t2.lattice:
        raise ValueError("transfer systems live on different lattices")
    return TransferSystem(t1.lattice, t1.space.close(t1.mask | t2.mask))


def trivial_system(lattice: SubgroupLattice) -> TransferSystem:
    return TransferSystem(lattice, 0)


def complete_system(lattice: SubgroupLattice) -> TransferSystem:
    return TransferSystem(lattice, (1 << PairSpace.of(lattice).count) - 1)


# ---------------------------------------------------------------------------
# Enumeration

def _dfs_masks(space: PairSpace, start_depth: int, included: int, excluded: int,
               closed: int) -> list[int]:
    """All transfer-system masks extending the given include/exclude decisions."""
    out = []
    m = space.count

    def rec(i: int, closed_mask: int, excluded_mask: int):
        while i < m and ((closed_mask >> i) & 1 or (excluded_mask >> i) & 1):
            if (closed_mask >> i) & 1 and (excluded_mask >> i) & 1:
                return  # contradictory branch
            i += 1
        if i == m:
            out.append(closed_mask)
            return
        rec(i + 1, closed_mask, excluded_mask | (1 << i))
        grown = space.close(closed_mask | (1 << i))
        if grown & excluded_mask == 0:
            rec(i + 1, grown, excluded_mask)

    if closed & excluded:
        return out
    rec(start_depth, closed, excluded)
    return out


def _enumerate_masks(lattice: SubgroupLattice) -> list[int]:
    space = PairSpace.of(lattice)
    return sorted(_dfs_masks(space, 0, 0, 0, 0))


def _shard_worker(args) -> list[int]:
    group_json, prefix_bits, prefix_len = args
    from .groups import build_group
    lattice = build_group(group_json).lattice()
    space = PairSpace.of(lattice)
    included = 0
    excluded = 0
    for i in range(prefix_len):
        if (prefix_bits >> i) & 1:
            included |= 1 << i
        else:
            excluded |= 1 << i
    closed = space.close(included)
    if closed & excluded:
        return []
    return _dfs_masks(space, prefix_len, included, excluded, closed)


def enumerate_all(lattice: SubgroupLattice, jobs: int = 1,
                  cache_dir: Optional[str] = None) -> list[TransferSystem]:
    """Every transfer system on the lattice, sorted by relation bitmask.

    A constrained DFS over strict pairs with incremental closure pruning;
    results are cached to disk keyed by the group hash when a cache directory
    is given (or via TRANSFERKIT_CACHE).
    """
    cache_dir = cache_dir or os.environ.get("TRANSFERKIT_CACHE")
    cache_path = None
    if cache_dir:
        cache_path = os.path.join(cache_dir, f"tr-{group_hash(lattice.group)}.json")
        if os.path.exists(cache_path):
            with open(cache_path) as fh:
                payload = json.load(fh)
            if payload.get("pair_count") == PairSpace.of(lattice).count:
                return [TransferSystem(lattice, m) for m in payload["masks"]]
    if jobs > 1:
        import multiprocessing
        prefix_len = min(4, PairSpace.of(lattice).count)
        tasks = [(lattice.group.to_json(), bits, prefix_len)
                 for bits in range(1 << prefix_len)]
        with multiprocessing.Pool(jobs) as pool:
            shards = pool.map(_shard_worker, tasks)
        masks = sorted(m for shard in shards for m in shard)
    else:
        masks = _enumerate_masks(lattice)
    if cache_path:
        os.makedirs(cache_dir, exist_ok=True)
        payload = {"group_hash": group_hash(lattice.group),
                   "pair_count": PairSpace.of(lattice).count, "masks": masks}
        with open(cache_path, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
    return [TransferSystem(lattice, m) for m in masks]


def enumerate_oracle(lattice: SubgroupLattice) -> list[TransferSystem]:
    """Unpruned scan of all 2^pairs relations, keeping those that validate.

    Independent of the DFS enumerator; usable only for small pair spaces.
    """
    space = PairSpace.of(lattice)
    if space.count > ORACLE_PAIR_BOUND:
        raise SearchBoundExceeded(f"{space.count} strict pairs is beyond the oracle scan bound")
    out = []
    for mask in range(1 << space.count):
        pairs = [space.pairs[p] for p in space.bits(mask)]
        if not validate(lattice, pairs):
            out.append(TransferSystem(lattice, mask))
    return out


# ---------------------------------------------------------------------------
# Disk-likeness

def _derived_from_tops(t: TransferSystem) -> int:
    """Pairs (K' ∩ H, H) over all top-level sources K' and subgroups H."""
    lat = t.lattice
    space = t.space
    mask = 0
    for kp in t.top_sources():
        for h in range(len(lat)):
            k = lat.meet(kp, h)
            if k != h:
                mask |= 1 << space.index[(k, h)]
    return mask


def is_disklike(t: TransferSystem, debug: bool = False) -> bool:
    """Whether every pair K -> H arises as (K' ∩ H -> H) for a top-level K' -> G.

    A transfer system always contains all such intersected pairs (restriction
    closure); disk-likeness asks for the converse inclusion, equivalently that
    the system is generated by its transfers into the full group.
    """
    derived = _derived_from_tops(t)
    verdict = derived == t.mask
    if debug:
        regenerated = rubin_complete(t.lattice, [(k, t.lattice.top) for k in t.top_sources()
                                                 if k != t.lattice.top])
        assert (regenerated.mask == t.mask) == verdict, \
            "generation and intersection characterizations disagree"
    return verdict


def disklike_core(t: TransferSystem) -> TransferSystem:
    """The largest disk-like transfer system contained in t."""
    top = t.lattice.top
    return rubin_complete(t.lattice, [(k, top) for k in t.top_sources() if k != top])


def enumerate_disklike(lattice: SubgroupLattice, **kw) -> list[TransferSystem]:
    return [t for t in enumerate_all(lattice, **kw) if is_disklike(t)]


def covering_edges(systems: Sequence[TransferSystem]) -> list[tuple[int, int]]:
    """Hasse edges (transitive reduction) of the refinement order, by list index."""
    edges = []
    n = len(systems)
    for i in range(n):
        for j in range(n):
            if i == j or not systems[i] <= systems[j]:
                continue
            if not any(k != i and k != j and systems[i] <= systems[k] and systems[k] <= systems[j]
                       for k in range(n)):
                edges.append((i, j))
    return edges
