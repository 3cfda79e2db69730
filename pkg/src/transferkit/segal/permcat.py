"""Finite categories with optional G-action, and strict permutative structure.

Objects and morphisms are indices into tables. The tensor may be partial
(capped seeds such as truncated finite sets); all coherence axioms are
checked wherever every participating composite is defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from ..groups import Group
from ..gsets import GSet


class DiagramFailure(ValueError):
    """A required diagram does not commute; names the square and its objects."""

    def __init__(self, square: str, at):
        self.square = square
        self.at = at
        super().__init__(f"{square} fails at {at}")


class SizeBoundExceeded(ValueError):
    pass


class FinCategory:
    """A finite category as source/target/identity/composition tables."""

    def __init__(self, n_ob: int, src: Sequence[int], tgt: Sequence[int],
                 ident: Sequence[int], comp: dict[tuple[int, int], int],
                 group: Optional[Group] = None,
                 obj_act: Optional[Sequence[Sequence[int]]] = None,
                 mor_act: Optional[Sequence[Sequence[int]]] = None,
                 check: bool = True):
        self.n_ob = n_ob
        self.n_mor = len(src)
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.ident = tuple(ident)
        self.comp = dict(comp)
        self.group = group
        self.obj_act = tuple(tuple(p) for p in obj_act) if obj_act else None
        self.mor_act = tuple(tuple(p) for p in mor_act) if mor_act else None
        if check:
            self._validate()

    def compose(self, g: int, f: int) -> int:
        """g after f; defined when tgt(f) == src(g)."""
        return self.comp[(g, f)]

    def hom(self, a: int, b: int) -> list[int]:
        return [f for f in range(self.n_mor) if self.src[f] == a and self.tgt[f] == b]

    def is_iso(self, f: int) -> Optional[int]:
        """The two-sided inverse of f, if one exists."""
        for g in self.hom(self.tgt[f], self.src[f]):
            if (self.comp[(g, f)] == self.ident[self.src[f]]
                    and self.comp[(f, g)] == self.ident[self.tgt[f]]):
                return g
        return None

    def _validate(self) -> None:
        for x in range(self.n_ob):
            i = self.ident[x]
            if self.src[i] != x or self.tgt[i] != x:
                raise DiagramFailure("identity-endpoints", x)
        for f in range(self.n_mor):
            if self.comp[(self.ident[self.tgt[f]], f)] != f:
                raise DiagramFailure("left-unit", f)
            if self.comp[(f, self.ident[self.src[f]])] != f:
                raise DiagramFailure("right-unit", f)
        for (g, f), gf in self.comp.items():
            if self.tgt[f] != self.src[g]:
                raise DiagramFailure("composability", (g, f))
            if self.src[gf] != self.src[f] or self.tgt[gf] != self.tgt[g]:
                raise DiagramFailure("composite-endpoints", (g, f))
        by_src: dict[int, list[int]] = {}
        for f in range(self.n_mor):
            by_src.setdefault(self.src[f], []).append(f)
        for f in range(self.n_mor):
            for g in by_src.get(self.tgt[f], []):
                for h in by_src.get(self.tgt[g], []):
                    if self.comp[(h, self.comp[(g, f)])] != self.comp[(self.comp[(h, g)], f)]:
                        raise DiagramFailure("associativity", (h, g, f))
        if self.obj_act is not None:
            assert self.group is not None and self.mor_act is not None
            for a in self.group.elements():
                op, mp = self.obj_act[a], self.mor_act[a]
                for f in range(self.n_mor):
                    if self.src[mp[f]] != op[self.src[f]] or self.tgt[mp[f]] != op[self.tgt[f]]:
                        raise DiagramFailure("action-endpoints", (a, f))
                for x in range(self.n_ob):
                    if mp[self.ident[x]] != self.ident[op[x]]:
                        raise DiagramFailure("action-identity", (a, x))
                for (g, f), gf in self.comp.items():
                    if self.comp[(mp[g], mp[f])] != mp[gf]:
                        raise DiagramFailure("action-composition", (a, g, f))

    def act_obj(self, a: int, x: int) -> int:
        return self.obj_act[a][x] if self.obj_act else x

    def act_mor(self, a: int, f: int) -> int:
        return self.mor_act[a][f] if self.mor_act else f


class PermCat:
    """A strict permutative category over a FinCategory, tensor possibly partial."""

    def __init__(self, cat: FinCategory, unit: int,
                 tensor_ob: dict[tuple[int, int], int],
                 tensor_mor: dict[tuple[int, int], int],
                 beta: dict[tuple[int, int], int],
                 name: str = "A", check: bool = True):
        self.cat = cat
        self.unit = unit
        self.tensor_ob = dict(tensor_ob)
        self.tensor_mor = dict(tensor_mor)
        self.beta = dict(beta)
        self.name = name
        if check:
            self._validate()

    # -- tensor helpers ----------------------------------------------------
    def tob(self, a: int, b: int) -> Optional[int]:
        return self.tensor_ob.get((a, b))

    def tmor(self, f: int, g: int) -> Optional[int]:
        return self.tensor_mor.get((f, g))

    def fold_ob(self, objs: Sequence[int]) -> Optional[int]:
        acc = self.unit
        for x in objs:
            acc = self.tob(acc, x)
            if acc is None:
                return None
        return acc

    def fold_mor(self, mors: Sequence[int]) -> Optional[int]:
        acc = self.cat.ident[self.unit]
        for f in mors:
            acc = self.tmor(acc, f)
            if acc is None:
                return None
        return acc

    def _validate(self) -> None:
        cat = self.cat
        obs = range(cat.n_ob)
        for a in obs:
            if self.tob(a, self.unit) != a or self.tob(self.unit, a) != a:
                raise DiagramFailure("strict-unit-objects", a)
        for f in range(cat.n_mor):
            if (self.tmor(f, cat.ident[self.unit]) != f
                    or self.tmor(cat.ident[self.unit], f) != f):
                raise DiagramFailure("strict-unit-morphisms", f)
        for a in obs:
            for b in obs:
                ab = self.tob(a, b)
                if ab is None:
                    continue
                if self.tmor(cat.ident[a], cat.ident[b]) != cat.ident[ab]:
                    raise DiagramFailure("tensor-identities", (a, b))
                for c in obs:
                    left = self.tob(ab, c)
                    bc = self.tob(b, c)
                    right = self.tob(a, bc) if bc is not None else None
                    if left is not None and right is not None and left != right:
                        raise DiagramFailure("strict-associativity", (a, b, c))
        # functoriality of the tensor on composable pairs
        for (f, g), fg in self.tensor_mor.items():
            if (cat.src[fg] != self.tob(cat.src[f], cat.src[g])
                    or cat.tgt[fg] != self.tob(cat.tgt[f], cat.tgt[g])):
                raise DiagramFailure("tensor-endpoints", (f, g))
        for (f1, g1) in self.tensor_mor:
            for f2 in range(cat.n_mor):
                if cat.src[f2] != cat.tgt[f1]:
                    continue
                for g2 in range(cat.n_mor):
                    if cat.src[g2] != cat.tgt[g1]:
                        continue
                    lhs = self.tmor(cat.comp[(f2, f1)], cat.comp[(g2, g1)])
                    step = self.tmor(f2, g2)
                    if step is None or lhs is None:
                        continue
                    if lhs != cat.comp[(step, self.tmor(f1, g1))]:
                        raise DiagramFailure("tensor-interchange", (f1, g1, f2, g2))
        # twist axioms
        for (a, b), t in self.beta.items():
            ab = self.tob(a, b)
            ba = self.tob(b, a)
            if ab is None or ba is None or cat.src[t] != ab or cat.tgt[t] != ba:
                raise DiagramFailure("twist-endpoints", (a, b))
            if cat.comp[(self.beta[(b, a)], t)] != cat.ident[ab]:
                raise DiagramFailure("twist-involution", (a, b))
        for a in obs:
            if (a, self.unit) in self.beta and self.beta[(a, self.unit)] != cat.ident[a]:
                raise DiagramFailure("twist-unit-triangle", a)
        # naturality of the twist
        for (a, b), t in self.beta.items():
            for f in range(cat.n_mor):
                if cat.src[f] != a:
                    continue
                for g in range(cat.n_mor):
                    if cat.src[g] != b:
                        continue
                    fg = self.tmor(f, g)
                    gf = self.tmor(g, f)
                    t2 = self.beta.get((cat.tgt[f], cat.tgt[g]))
                    if fg is None or gf is None or t2 is None:
                        continue
                    if cat.comp[(t2, fg)] != cat.comp[(gf, t)]:
                        raise DiagramFailure("twist-naturality", (a, b, f, g))
        # hexagon, in the strict form b_{a⊕b,c} = (b_{a,c}⊕id_b) ∘ (id_a⊕b_{b,c})
        for a in obs:
            for b in obs:
                ab = self.tob(a, b)
                if ab is None:
                    continue
                for c in obs:
                    if self.tob(ab, c) is None:
                        continue
                    whole = self.beta.get((ab, c))
                    inner = self.tmor(self.cat.ident[a], self.beta.get((b, c), -1)) \
                        if (b, c) in self.beta else None
                    outer = self.tmor(self.beta.get((a, c), -1), self.cat.ident[b]) \
                        if (a, c) in self.beta else None
                    if whole is None or inner is None or outer is None:
                        continue
                    if cat.comp[(outer, inner)] != whole:
                        raise DiagramFailure("twist-hexagon", (a, b, c))
        # equivariance of the structure when an action is present
        if cat.obj_act is not None:
            for g in cat.group.elements():
                if cat.act_obj(g, self.unit) != self.unit:
                    raise DiagramFailure("action-unit", g)
                for (a, b), ab in self.tensor_ob.items():
                    if self.tob(cat.act_obj(g, a), cat.act_obj(g, b)) != cat.act_obj(g, ab):
                        raise DiagramFailure("action-tensor-objects", (g, a, b))
                for (f, h), fh in self.tensor_mor.items():
                    if self.tmor(cat.act_mor(g, f), cat.act_mor(g, h)) != cat.act_mor(g, fh):
                        raise DiagramFailure("action-tensor-morphisms", (g, f, h))
                for (a, b), t in self.beta.items():
                    if self.beta[(cat.act_obj(g, a), cat.act_obj(g, b))] != cat.act_mor(g, t):
                        raise DiagramFailure("action-twist", (g, a, b))

    # -- canonical permutation isomorphisms --------------------------------
    def perm_iso(self, objs: Sequence[int], positions: Sequence[int]) -> int:
        """The twist-built isomorphism from ⊕objs to the relabeled sum.

        ``positions[i]`` is the destination slot of the element at slot i; the
        iso is composed from adjacent transpositions in bubble-sort order.
        """
        cat = self.cat
        cur = list(objs)
        pos = list(positions)
        total = self.fold_ob(cur)
        if total is None:
            raise SizeBoundExceeded(f"undefined sum for objects {objs}")
        acc = cat.ident[total]
        changed = True
        while changed:
            changed = False
            for i in range(len(cur) - 1):
                if pos[i] > pos[i + 1]:
                    step = self._adjacent_swap(cur, i)
                    acc = cat.comp[(step, acc)]
                    cur[i], cur[i + 1] = cur[i + 1], cur[i]
                    pos[i], pos[i + 1] = pos[i + 1], pos[i]
                    changed = True
        return acc

    def _adjacent_swap(self, objs: list[int], i: int) -> int:
        cat = self.cat
        prefix = self.fold_ob(objs[:i])
        step = self.tmor(cat.ident[prefix], self.beta[(objs[i], objs[i + 1])])
        for x in objs[i + 2:]:
            step = self.tmor(step, cat.ident[x])
        return step

    def iso_pairs(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for f in range(self.cat.n_mor):
            if self.cat.is_iso(f) is not None:
                out.setdefault((self.cat.src[f], self.cat.tgt[f]), []).append(f)
        return out


# ---------------------------------------------------------------------------
# Norms

@dataclass
class Norm:
    """An external norm for a twisted based G-set, with untwistor components.

    ``ob_map``/``mor_map`` evaluate the norm on tuples; ``untwist`` gives the
    component at each object tuple, an isomorphism to the standard n-fold sum.
    """

    permcat: PermCat
    t: GSet  # based; the acting group and twisting permutations
    ob_map: Callable[[tuple[int, ...]], Optional[int]]
    mor_map: Callable[[tuple[int, ...]], Optional[int]]
    untwist: Callable[[tuple[int, ...]], Optional[int]]

    @property
    def n(self) -> int:
        return self.t.size - 1

    def sigma(self, g: int) -> list[int]:
        """The 0-based slot permutation of the group element g."""
        return [self.t.action[g][i + 1] - 1 for i in range(self.n)]


def standard_norm(permcat: PermCat, t: GSet) -> Norm:
    """The iterated-sum norm with identity untwistors."""

    def ob_map(objs: tuple[int, ...]) -> Optional[int]:
        return permcat.fold_ob(objs)

    def mor_map(mors: tuple[int, ...]) -> Optional[int]:
        return permcat.fold_mor(mors)

    def untwist(objs: tuple[int, ...]) -> Optional[int]:
        total = permcat.fold_ob(objs)
        return None if total is None else permcat.cat.ident[total]

    return Norm(permcat, t, ob_map, mor_map, untwist)


def normable_tuples(permcat: PermCat, norm: Norm) -> list[tuple[int, ...]]:
    """Object tuples on which the norm and all its subset sums are defined."""
    out = []
    n = norm.n
    for idx in range(permcat.cat.n_ob ** n):
        objs = []
        v = idx
        for _ in range(n):
            objs.append(v % permcat.cat.n_ob)
            v //= permcat.cat.n_ob
        objs = tuple(objs)
        if norm.ob_map(objs) is None or permcat.fold_ob(objs) is None:
            continue
        out.append(objs)
    return out


def validate_norm(norm: Norm) -> None:
    """Twisted equivariance and unit-normalization of the untwistors.

    Raises DiagramFailure at the first failing square.
    """
    pc = norm.permcat
    cat = pc.cat
    tuples = normable_tuples(pc, norm)
    unit = pc.unit
    n = norm.n
    # unit-normalization: unit-padded tuples collapse strictly, untwistor is id
    for objs in tuples:
        filled = [x for x in objs if x != unit]
        if len(filled) <= 1:
            expect = filled[0] if filled else unit
            if norm.ob_map(objs) != expect:
                raise DiagramFailure("unit-normalization-object", objs)
            if norm.untwist(objs) != cat.ident[expect]:
                raise DiagramFailure("unit-normalization", objs)
    # untwistor endpoints and invertibility, naturality on identity tuples
    for objs in tuples:
        v = norm.untwist(objs)
        if v is None or cat.src[v] != norm.ob_map(objs) or cat.tgt[v] != pc.fold_ob(objs):
            raise DiagramFailure("untwistor-endpoints", objs)
        if cat.is_iso(v) is None:
            raise DiagramFailure("untwistor-not-iso", objs)
    # naturality of the untwistor in each slot (single-morphism probes)
    for objs in tuples:
        for slot in range(n):
            a = objs[slot]
            for f in range(cat.n_mor):
                if cat.src[f] != a:
                    continue
                tgt_objs = objs[:slot] + (cat.tgt[f],) + objs[slot + 1:]
                if norm.ob_map(tgt_objs) is None:
                    continue
                mors = tuple(cat.ident[objs[i]] if i != slot else f for i in range(n))
                top = norm.mor_map(mors)
                bottom = pc.fold_mor(mors)
                if top is None or bottom is None:
                    continue
                lhs = cat.comp[(norm.untwist(tgt_objs), top)]
                rhs = cat.comp[(bottom, norm.untwist(objs))]
                if lhs != rhs:
                    raise DiagramFailure("untwistor-naturality", (objs, slot, f))
    # twisted equivariance
    g_elems = norm.t.group.elements()
    for g in g_elems:
        sigma = norm.sigma(g)
        inv_slot = [0] * n
        for i, v in enumerate(sigma):
            inv_slot[v] = i
        for objs in tuples:
            twisted = tuple(cat.act_obj(g, objs[inv_slot[i]]) for i in range(n))
            if norm.ob_map(twisted) != cat.act_obj(g, norm.ob_map(objs)):
                raise DiagramFailure("twisted-equivariance-objects", (g, objs))
            acted = cat.act_mor(g, norm.untwist(objs))
            vt = norm.untwist(twisted)
            if vt is None:
                raise DiagramFailure("twisted-equivariance", (g, objs))
            shuffle = pc.perm_iso([cat.act_obj(g, objs[inv_slot[i]]) for i in range(n)],
                                  inv_slot)
            if cat.comp[(shuffle, vt)] != acted:
                raise DiagramFailure("twisted-equivariance", (g, objs))
    return None


# ---------------------------------------------------------------------------
# Seeds

def discrete_monoid_seed(module) -> PermCat:
    """A finite abelian G-group as a discrete permutative category."""
    n = module.size
    src = list(range(n))
    tgt = list(range(n))
    ident = list(range(n))
    comp = {(i, i): i for i in range(n)}
    cat = FinCategory(n, src, tgt, ident, comp, group=module.group,
                      obj_act=module.action, mor_act=module.action)
    tensor_ob = {(a, b): module.add[a][b] for a in range(n) for b in range(n)}
    tensor_mor = {(a, b): module.add[a][b] for a in range(n) for b in range(n)}
    beta = {(a, b): module.add[a][b] for a in range(n) for b in range(n)}
    return PermCat(cat, module.zero, tensor_ob, tensor_mor, beta,
                   name=f"disc({module.name})")


def finite_sets_seed(cap: int = 3, group: Optional[Group] = None) -> PermCat:
    """Skeletal finite sets of size <= cap with bijections and block sums."""
    from ..groups import builtin_group
    group = group or builtin_group("C_1")
    mors = []  # (size, permutation tuple)
    for size in range(cap + 1):
        for perm in _permutations(size):
            mors.append((size, perm))
    index = {m: i for i, m in enumerate(mors)}
    src = [m[0] for m in mors]
    tgt = [m[0] for m in mors]
    ident = [index[(a, tuple(range(a)))] for a in range(cap + 1)]
    comp = {}
    for gi, (sg, pg) in enumerate(mors):
        for fi, (sf, pf) in enumerate(mors):
            if sf != sg:
                continue
            comp[(gi, fi)] = index[(sf, tuple(pg[pf[i]] for i in range(sf)))]
    n_ob = cap + 1
    obj_act = [list(range(n_ob))] * group.order
    mor_act = [list(range(len(mors)))] * group.order
    cat = FinCategory(n_ob, src, tgt, ident, comp, group=group,
                      obj_act=obj_act, mor_act=mor_act)
    tensor_ob = {(a, b): a + b for a in range(n_ob) for b in range(n_ob) if a + b <= cap}
    tensor_mor = {}
    for fi, (sf, pf) in enumerate(mors):
        for gi, (sg, pg) in enumerate(mors):
            if sf + sg > cap:
                continue
            block = tuple(list(pf) + [sf + x for x in pg])
            tensor_mor[(fi, gi)] = index[(sf + sg, block)]
    beta = {}
    for a in range(n_ob):
        for b in range(n_ob):
            if a + b > cap:
                continue
            perm = tuple([i + b for i in range(a)] + [i for i in range(b)])
            swap = [0] * (a + b)
            for i in range(a):
                swap[i] = b + i
            for i in range(b):
                swap[a + i] = i
            beta[(a, b)] = index[(a + b, tuple(swap))]
    return PermCat(cat, 0, tensor_ob, tensor_mor, beta, name=f"finset<={cap}")


def _permutations(n: int) -> list[tuple[int, ...]]:
    import itertools
    return [tuple(p) for p in itertools.permutations(range(n))]
