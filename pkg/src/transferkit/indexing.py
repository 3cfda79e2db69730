"""Indexing systems as views over transfer systems.

Membership of a finite H-set is decided orbitwise: every orbit stabilizer K
must carry a transfer K -> H. The heavy axiom verification works on orbit-class
count vectors; every decomposition table it consumes is computed once per
lattice through the actual G-set operations (restrict/induce/product/conjugate
followed by orbit decomposition).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .families import Family, NotDiskLike, phi, restrict_family
from .groups import Group, SubgroupGroup, SubgroupLattice
from .gsets import (GSet, conjugate_gset, equivariant_maps, induce, iso_test,
                    orbit_decompose, orbit_gset, product, restrict, trivial_gset)
from .transfers import TransferSystem, is_disklike


class NoWitness(RuntimeError):
    pass


def _parent_elems(group: Group) -> list[int]:
    """Element indices of ``group`` expressed in the root lattice's group."""
    elems = list(group.elements())
    g = group
    while isinstance(g, SubgroupGroup):
        elems = [g.embed[e] for e in elems]
        g = g.lattice_ref.group
    return elems


def _rebase(x: GSet, target: Group) -> GSet:
    """Re-express a G-set over a different realization of the same element set."""
    src_parent = _parent_elems(x.group)
    pos = {p: i for i, p in enumerate(src_parent)}
    tgt_parent = _parent_elems(target)
    action = [x.action[pos[p]] for p in tgt_parent]
    return GSet(target, x.size, action, based=x.based, check=False)


class HLevel:
    """Class data for finite H-sets at one subgroup of the root lattice."""

    def __init__(self, lattice: SubgroupLattice, h: int):
        self.lattice = lattice
        self.h = h
        self.group = lattice.subgroup_group(h)
        self.hlat = self.group.lattice()
        self.parent_of_local = {
            i: lattice.index_of_mask[self._parent_mask(i)]
            for i in range(len(self.hlat))
        }
        classes = []
        class_pos: dict[int, int] = {}
        for cls in self.hlat.conjugacy_classes:
            rep = min(self.parent_of_local[i] for i in cls)
            pos = len(classes)
            classes.append(rep)
            for i in cls:
                class_pos[self.parent_of_local[i]] = pos
        order = sorted(range(len(classes)), key=lambda c: classes[c])
        self.classes = [classes[c] for c in order]
        rank = {old: new for new, old in enumerate(order)}
        self.class_pos = {k: rank[v] for k, v in class_pos.items()}
        self.orbit_size = [self.group.order // lattice.subgroups[rep].size
                           for rep in self.classes]
        self.orbits = [self._orbit_for(rep) for rep in self.classes]

    def _parent_mask(self, local_sub: int) -> int:
        mask = 0
        for e in self.hlat.subgroups[local_sub].members():
            mask |= 1 << self.group.embed[e]
        return mask

    def _orbit_for(self, parent_rep: int) -> GSet:
        local_mask = 0
        for p in self.lattice.subgroups[parent_rep].members():
            local_mask |= 1 << self.group.local_of_parent[p]
        sub = self.hlat.subgroups[self.hlat.index_of_mask[local_mask]]
        return orbit_gset(self.group, sub)

    def vector_of(self, x: GSet) -> tuple[int, ...]:
        """Orbit-class counts of an H-set given over any realization of H."""
        if x.group is not self.group:
            x = _rebase(x, self.group)
        dec = orbit_decompose(x)
        counts = [0] * len(self.classes)
        for s in dec.stabilizers:
            counts[self.class_pos[self.parent_of_local[s]]] += 1
        return tuple(counts)

    def size_of(self, vec: Sequence[int]) -> int:
        return sum(n * self.orbit_size[c] for c, n in enumerate(vec))


class DecompositionTables:
    """Per-lattice cache of decompositions, each computed once via G-set ops."""

    _cache: dict[int, "DecompositionTables"] = {}

    def __init__(self, lattice: SubgroupLattice):
        self.lattice = lattice
        self._levels: dict[int, HLevel] = {}
        self._res: dict[tuple[int, int, int], tuple[int, ...]] = {}
        self._ind: dict[tuple[int, int, int], tuple[int, ...]] = {}
        self._prod: dict[tuple[int, int, int], tuple[int, ...]] = {}
        self._conj: dict[tuple[int, int, int], int] = {}

    @classmethod
    def of(cls, lattice: SubgroupLattice) -> "DecompositionTables":
        key = id(lattice)
        if key not in cls._cache:
            cls._cache[key] = cls(lattice)
        return cls._cache[key]

    def level(self, h: int) -> HLevel:
        if h not in self._levels:
            self._levels[h] = HLevel(self.lattice, h)
        return self._levels[h]

    def res_class(self, h: int, l: int, cls: int) -> tuple[int, ...]:
        """Decomposition of res_L^H of the class-``cls`` orbit, over L's classes."""
        key = (h, l, cls)
        if key not in self._res:
            hl = self.level(h)
            sub = hl.hlat.subgroups[self._local_sub(hl, l)]
            restricted = restrict(hl.orbits[cls], sub)
            self._res[key] = self.level(l).vector_of(restricted)
        return self._res[key]

    @staticmethod
    def _local_sub(hl: HLevel, parent_sub: int) -> int:
        mask = 0
        for p in hl.lattice.subgroups[parent_sub].members():
            mask |= 1 << hl.group.local_of_parent[p]
        return hl.hlat.index_of_mask[mask]

    def ind_class(self, k: int, h: int, cls: int) -> tuple[int, ...]:
        key = (k, h, cls)
        if key not in self._ind:
            induced = induce(self.level(k).orbits[cls], self.level(h).group)
            self._ind[key] = self.level(h).vector_of(induced)
        return self._ind[key]

    def prod_class(self, h: int, c1: int, c2: int) -> tuple[int, ...]:
        key = (h, min(c1, c2), max(c1, c2))
        if key not in self._prod:
            hl = self.level(h)
            self._prod[key] = hl.vector_of(product(hl.orbits[key[1]], hl.orbits[key[2]]))
        return self._prod[key]

    def conj_class(self, h: int, a: int, cls: int) -> tuple[int, int]:
        """Image (h', class') of an orbit class under conjugation by a parent element."""
        key = (h, a, cls)
        if key not in self._conj:
            hl = self.level(h)
            moved = conjugate_gset(hl.orbits[cls], a, self.lattice)
            h2 = self.lattice.conjugate(h, a)
            vec = self.level(h2).vector_of(moved)
            (c2,) = [c for c, n in enumerate(vec) if n]
            self._conj[key] = c2
        h2 = self.lattice.conjugate(h, a)
        return h2, self._conj[key]


class IndexingSystem:
    """Admissible finite H-sets of a transfer system, membership computed on demand."""

    def __init__(self, source: TransferSystem):
        self.source = source
        self.lattice = source.lattice
        self.tables = DecompositionTables.of(self.lattice)

    def h_index_of(self, group: Group) -> int:
        if group is self.lattice.group:
            return self.lattice.top
        if isinstance(group, SubgroupGroup) and group.lattice_ref is self.lattice:
            return group.subgroup_index
        raise ValueError("G-set does not act through this lattice")

    def admits_class(self, h: int, cls: int) -> bool:
        k = self.tables.level(h).classes[cls]
        return self.source.contains(k, h)

    def admits_vector(self, h: int, vec: Sequence[int]) -> bool:
        return all(n == 0 or self.admits_class(h, c) for c, n in enumerate(vec))

    def admits(self, t: GSet) -> tuple[bool, list[dict]]:
        """Orbitwise admissibility with a per-orbit witness list."""
        h = self.h_index_of(t.group)
        hl = self.tables.level(h)
        dec = orbit_decompose(_rebase(t, hl.group) if t.group is not hl.group else t)
        witnesses = []
        ok = True
        for orbit, stab in zip(dec.orbits, dec.stabilizers):
            if t.based and orbit == [0]:
                continue
            k = hl.parent_of_local[stab]
            rep = hl.classes[hl.class_pos[k]]
            good = self.source.contains(rep, h)
            ok = ok and good
            witnesses.append({"orbit": orbit, "stabilizer": k,
                              "transfer": [rep, h], "admitted": good})
        return ok, witnesses

    def level(self, h: int, size_bound: int) -> list[tuple[int, ...]]:
        """Iso classes of admissible H-sets up to the size bound, canonically sorted."""
        return _level_vectors(self.tables.level(h),
                              [c for c in range(len(self.tables.level(h).classes))
                               if self.admits_class(h, c)],
                              size_bound)


def _level_vectors(hl: HLevel, allowed: list[int], bound: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    counts = [0] * len(hl.classes)

    def rec(i: int, left: int):
        if i == len(allowed):
            out.append(tuple(counts))
            return
        c = allowed[i]
        size = hl.orbit_size[c]
        n = 0
        while n * size <= left:
            counts[c] = n
            rec(i + 1, left - n * size)
            n += 1
        counts[c] = 0

    rec(0, bound)
    return sorted(out, key=lambda v: (hl.size_of(v), v))


# ---------------------------------------------------------------------------
# Axiom verification

AXIOMS = ["I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8"]


def _vec_add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _vec_scale_add(acc: list[int], vec: Sequence[int], n: int) -> None:
    for i, v in enumerate(vec):
        acc[i] += n * v


def verify_axioms(ix, size_bound: int = 6) -> list[dict]:
    """Exhaustively check the indexing-system axioms up to the size bound.

    ``ix`` needs admits_class/admits_vector plus the source lattice; failures
    are reported with witnesses rather than raised.
    """
    lattice = ix.lattice
    tables = ix.tables
    report = {a: {"axiom": a, "status": "pass", "witness": None} for a in AXIOMS}

    def fail(axiom: str, witness: dict):
        if report[axiom]["status"] == "pass":
            report[axiom] = {"axiom": axiom, "status": "fail", "witness": witness}

    level_cache: dict[tuple, list[tuple[int, ...]]] = {}

    def level_of(h: int) -> list[tuple[int, ...]]:
        hl = tables.level(h)
        allowed = tuple(c for c in range(len(hl.classes)) if ix.admits_class(h, c))
        key = (h, allowed)
        if key not in level_cache:
            vectors = _level_vectors(hl, list(allowed), size_bound)
            # the predicate is authoritative: axiom premises quantify over what it admits
            level_cache[key] = [v for v in vectors if ix.admits_vector(h, v)]
        return level_cache[key]

    for h in range(len(lattice)):
        hl = tables.level(h)
        top_class = hl.class_pos[h]
        # (I1) disjoint unions of trivial orbits
        for n in range(size_bound + 1):
            vec = tuple(n if c == top_class else 0 for c in range(len(hl.classes)))
            if not ix.admits_vector(h, vec):
                fail("I1", {"H": h, "set": vec})
        # (I2) isomorphism invariance: admissibility only reads the orbit type
        for cls in range(len(hl.classes)):
            orb = hl.orbits[cls]
            rot = list(range(1, orb.size)) + [0]
            shuffled = GSet(orb.group, orb.size,
                            [tuple(rot[orb.action[a][rot.index(p)]] for p in range(orb.size))
                             for a in orb.group.elements()], check=False)
            if hl.vector_of(shuffled) != hl.vector_of(orb):
                fail("I2", {"H": h, "class": cls})
        subs = [l for l in lattice.subgroups_below(h)]
        lvl = level_of(h)
        for t in lvl:
            support = [c for c, n in enumerate(t) if n]
            # (I3) restriction to every subgroup
            for l in subs:
                acc = [0] * len(tables.level(l).classes)
                for c in support:
                    _vec_scale_add(acc, tables.res_class(h, l, c), t[c])
                if not ix.admits_vector(l, acc):
                    fail("I3", {"H": h, "set": t, "restricted_to": l, "image": tuple(acc)})
            # (I4) conjugation
            for a in lattice.group.elements():
                h2 = lattice.conjugate(h, a)
                acc = [0] * len(tables.level(h2).classes)
                for c in support:
                    _, c2 = tables.conj_class(h, a, c)
                    acc[c2] += t[c]
                if not ix.admits_vector(h2, acc):
                    fail("I4", {"H": h, "set": t, "element": a, "image": tuple(acc)})
            # (I5) subobjects
            for sub in _subvectors(t):
                if not ix.admits_vector(h, sub):
                    fail("I5", {"H": h, "set": t, "subset": sub})
        # (I6) coproducts
        for i, t in enumerate(lvl):
            st = hl.size_of(t)
            for s in lvl[i:]:
                if st + hl.size_of(s) > size_bound:
                    continue
                if not ix.admits_vector(h, _vec_add(t, s)):
                    fail("I6", {"H": h, "left": t, "right": s})
        # (I7) self-induction
        for k in subs:
            if k == h:
                continue
            if not ix.admits_class(h, hl.class_pos[k]):
                continue
            for t in level_of(k):
                acc = [0] * len(hl.classes)
                for c, n in enumerate(t):
                    if n:
                        _vec_scale_add(acc, tables.ind_class(k, h, c), n)
                if not ix.admits_vector(h, acc):
                    fail("I7", {"H": h, "K": k, "set": t, "induced": tuple(acc)})
        # (I8) cartesian products
        for i, t in enumerate(lvl):
            for s in lvl[i:]:
                acc = [0] * len(hl.classes)
                for c1, n1 in enumerate(t):
                    if not n1:
                        continue
                    for c2, n2 in enumerate(s):
                        if n2:
                            _vec_scale_add(acc, tables.prod_class(h, c1, c2), n1 * n2)
                if not ix.admits_vector(h, acc):
                    fail("I8", {"H": h, "left": t, "right": s, "product": tuple(acc)})
    return [report[a] for a in AXIOMS]


def _subvectors(vec: Sequence[int]) -> Iterable[tuple[int, ...]]:
    out = [()]
    for n in vec:
        out = [prefix + (i,) for prefix in out for i in range(n + 1)]
    return [v for v in out if v != tuple(vec)]


class CorruptedIndexingSystem(IndexingSystem):
    """Fault-injection wrapper: reports one designated single-orbit set inadmissible."""

    def __init__(self, source: TransferSystem, h: int, cls: int):
        super().__init__(source)
        self.dropped = (h, cls)

    def admits_vector(self, h: int, vec: Sequence[int]) -> bool:
        if h == self.dropped[0] and sum(vec) == 1 and vec[self.dropped[1]] == 1:
            return False
        return super().admits_vector(h, vec)


# ---------------------------------------------------------------------------
# Restriction identity and the disk-like embedding

def restriction_identity_check(ix: IndexingSystem, h: int, size_bound: int = 6,
                               permissive: bool = False) -> tuple[bool, Optional[dict]]:
    """Compare orbitwise admissibility at H against stabilizers lying in F_H.

    F is the top-source family of the source system; the two membership
    routes agree exactly when the source is disk-like.
    """
    if not permissive and not is_disklike(ix.source):
        raise NotDiskLike("restriction identity requires a disk-like source")
    fam = phi(ix.source, strict=not permissive)
    f_h = restrict_family(fam, h)
    hl = ix.tables.level(h)
    hlat = hl.hlat
    local_class = {}
    for c, rep in enumerate(hl.classes):
        mask = 0
        for p in ix.lattice.subgroups[rep].members():
            mask |= 1 << hl.group.local_of_parent[p]
        local_class[c] = hlat.index_of_mask[mask]
    fh_members = {m for cls_idx in f_h.members
                  for m in hlat.conjugacy_classes[hlat.class_of[cls_idx]]}
    for vec in _level_vectors(hl, list(range(len(hl.classes))), size_bound):
        via_admits = ix.admits_vector(h, vec)
        via_family = all(n == 0 or local_class[c] in fh_members
                         for c, n in enumerate(vec))
        if via_admits != via_family:
            return False, {"H": h, "set": vec, "admits": via_admits,
                           "family_route": via_family}
    return True, None


def embed_via_disklike(t: GSet, ix: IndexingSystem) -> tuple[GSet, list[int]]:
    """An admissible G-set t' with an injective H-map t -> res_H^G t'.

    Each orbit H/K picks the smallest K' with K' -> G and K' ∩ H = K and
    contributes the component G/K'. Returns (t', point map).
    """
    if not is_disklike(ix.source):
        raise NotDiskLike("the embedding needs a disk-like source")
    lattice = ix.lattice
    h = ix.h_index_of(t.group)
    ok, _ = ix.admits(t)
    if not ok:
        raise ValueError("the H-set is not admissible")
    hl = ix.tables.level(h)
    x = _rebase(t, hl.group) if t.group is not hl.group else t
    dec = orbit_decompose(x)
    tops = set(ix.source.top_sources())
    components: list[GSet] = []
    embedding = [-1] * t.size
    offset = 0
    hg = hl.group
    for orbit, stab in zip(dec.orbits, dec.stabilizers):
        k = hl.parent_of_local[stab]
        kprime = None
        for cand in sorted(tops, key=lambda c: (lattice.subgroups[c].size, c)):
            if lattice.meet(cand, h) == k:
                kprime = cand
                break
        if kprime is None:
            raise NoWitness(f"no top-level transfer meets subgroup {h} in {k}")
        comp = orbit_gset(lattice.group, lattice.subgroups[kprime])
        # the orbit point a.x0 lands on the coset (a K') inside G/K'
        reps, coset_of = _orbit_coset_index(lattice.group, lattice.subgroups[kprime])
        x0 = orbit[0]
        for a_local in hg.elements():
            p = x.action[a_local][x0]
            embedding[p] = offset + coset_of[hg.embed[a_local]]
        components.append(comp)
        offset += comp.size
    from .gsets import coproduct
    tprime = trivial_gset(lattice.group, 0)
    for comp in components:
        tprime = coproduct(tprime, comp)
    return tprime, embedding


def _orbit_coset_index(group: Group, sub) -> tuple[list[int], dict[int, int]]:
    from .gsets import _left_cosets
    return _left_cosets(group, sub.members())


# ---------------------------------------------------------------------------
# The category of admissible based G-sets

@dataclass
class GammaObject:
    """A based G-set together with its orbitwise admissibility witnesses."""

    gset: GSet
    system: IndexingSystem
    witnesses: list[dict]

    @classmethod
    def build(cls, gset: GSet, system: IndexingSystem) -> "GammaObject":
        if not gset.based:
            raise ValueError("objects here are based G-sets")
        ok, wit = system.admits(gset)
        if not ok:
            raise ValueError("underlying G-set is not admissible")
        return cls(gset, system, wit)


def gamma_hom(s: GammaObject, t: GammaObject) -> GSet:
    """All based maps s -> t as a based G-set under conjugation.

    Point 0 is the zero map; a map f is encoded by its value tuple on the
    nonbase points of s, giving (|t|)^(|s|-1) points in total.
    """
    if s.system is not t.system and s.system.source != t.system.source:
        raise ValueError("objects must share an indexing system")
    x, y = s.gset, t.gset
    g = x.group
    m = x.size - 1
    values = y.size
    size = values ** m

    def decode(idx: int) -> list[int]:
        vals = []
        for _ in range(m):
            vals.append(idx % values)
            idx //= values
        return vals

    def encode(vals: Sequence[int]) -> int:
        out = 0
        for v in reversed(vals):
            out = out * values + v
        return out

    zero = encode([0] * m)
    action = []
    for a in g.elements():
        inv = g.inv[a]
        perm = []
        for idx in range(size):
            vals = decode(idx)
            new = [y.action[a][vals[x.action[inv][p] - 1]] if x.action[inv][p] != 0 else 0
                   for p in range(1, x.size)]
            perm.append(encode(new))
        action.append(tuple(perm))
    # re-index so the zero map sits at the basepoint slot 0 (swap is an involution)
    swap = list(range(size))
    swap[0], swap[zero] = swap[zero], swap[0]
    action2 = [tuple(swap[action[a][swap[p]]] for p in range(size))
               for a in g.elements()]
    return GSet(g, size, action2, based=True, check=False)


def compose_hom_points(s: GSet, t: GSet, u: GSet, f_st: tuple[int, ...],
                       f_tu: tuple[int, ...]) -> tuple[int, ...]:
    """Composite of based maps given as value tuples on nonbase points."""
    out = []
    for p in range(1, s.size):
        q = f_st[p - 1]
        out.append(0 if q == 0 else f_tu[q - 1])
    return tuple(out)
