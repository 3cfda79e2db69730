"""Coherent-system categories over a permutative seed and the Segal certificate.

An object over the slot set {0..n-1} assigns to every subset s an object A_s
(A_empty is the unit) and to every ordered disjoint pair an isomorphism
a_{s,t}: A_s + A_t -> A_{s∪t} subject to unit, commutativity and associativity
constraints; morphisms are componentwise maps compatible with the a's.

The certificate realizes the projection-to-singletons functor, its section
built from the norms, and the connecting natural isomorphism, then checks all
of their defining squares and twisted equivariance by exhaustive table scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Callable, Optional, Sequence

from ..groups import Group
from ..gsets import GSet
from .permcat import (DiagramFailure, FinCategory, Norm, PermCat,
                      SizeBoundExceeded, normable_tuples, standard_norm,
                      validate_norm)

DEFAULT_LEVEL_BOUND = 3
DEFAULT_OBJECT_BOUND = 4


def subsets_of(n: int) -> list[frozenset[int]]:
    out = [frozenset(s for s in range(n) if (bits >> s) & 1) for bits in range(1 << n)]
    return sorted(out, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class SystemObject:
    """Subset-indexed objects with coherent gluing isomorphisms."""

    assign: tuple[int, ...]                 # objects, aligned with subsets_of(n)
    glue: tuple[int, ...]                   # morphisms, aligned with the ordered pair list

    def key(self) -> tuple:
        return (self.assign, self.glue)


class AbarCategory:
    """The category of coherent systems over a permutative seed at level n."""

    def __init__(self, permcat: PermCat, n: int,
                 level_bound: int = DEFAULT_LEVEL_BOUND,
                 object_bound: int = DEFAULT_OBJECT_BOUND):
        if n > level_bound or permcat.cat.n_ob > object_bound:
            raise SizeBoundExceeded(
                f"level {n} over {permcat.cat.n_ob} objects exceeds the configured bound")
        self.permcat = permcat
        self.n = n
        self.subsets = subsets_of(n)
        self.sub_index = {s: i for i, s in enumerate(self.subsets)}
        self.pair_list = [(s, t) for s in self.subsets for t in self.subsets
                          if s and t and not (s & t)]
        self.pair_index = {p: i for i, p in enumerate(self.pair_list)}
        self.objects = self._enumerate_objects()
        self.object_index = {x.key(): i for i, x in enumerate(self.objects)}
        self.morphisms, self.mor_index = self._enumerate_morphisms()
        self.cat = self._assemble()

    # -- object access ------------------------------------------------------
    def a_of(self, x: SystemObject, s: frozenset, t: frozenset) -> int:
        """The gluing morphism A_s + A_t -> A_{s∪t}, with empty cases strict."""
        if not s and not t:
            return self.permcat.cat.ident[self.permcat.unit]
        if not s:
            return self.permcat.cat.ident[x.assign[self.sub_index[t]]]
        if not t:
            return self.permcat.cat.ident[x.assign[self.sub_index[s]]]
        return x.glue[self.pair_index[(s, t)]]

    def obj_at(self, x: SystemObject, s: frozenset) -> int:
        return x.assign[self.sub_index[s]]

    # -- enumeration ----------------------------------------------------------
    def _enumerate_objects(self) -> list[SystemObject]:
        pc = self.permcat
        cat = pc.cat
        unit = pc.unit
        iso_sets: dict[tuple[int, int], list[int]] = {}
        for f in range(cat.n_mor):
            if cat.is_iso(f) is not None:
                iso_sets.setdefault((cat.src[f], cat.tgt[f]), []).append(f)
        nonempty = [s for s in self.subsets if s]
        free_pairs = [(s, t) for (s, t) in self.pair_list
                      if self.sub_index[s] < self.sub_index[t]]
        out: list[SystemObject] = []

        def assign_rec(i: int, assign: dict[frozenset, int]):
            if i == len(nonempty):
                self._glue_rec(assign, free_pairs, iso_sets, out)
                return
            s = nonempty[i]
            if len(s) == 1:
                for a in range(cat.n_ob):
                    assign[s] = a
                    assign_rec(i + 1, assign)
                del assign[s]
                return
            split = max(s)
            rest = s - {split}
            base = pc.tob(assign[rest], assign[frozenset({split})])
            if base is None:
                return
            for a in range(cat.n_ob):
                if (base, a) in iso_sets:
                    assign[s] = a
                    assign_rec(i + 1, assign)
                    del assign[s]

        assign_rec(0, {frozenset(): unit})
        out.sort(key=lambda x: x.key())
        return out

    def _glue_rec(self, assign: dict[frozenset, int], free_pairs, iso_sets, out):
        pc = self.permcat
        cat = pc.cat
        candidates = []
        for (s, t) in free_pairs:
            st = pc.tob(assign[s], assign[t])
            if st is None:
                return
            isos = iso_sets.get((st, assign[s | t]), [])
            if not isos:
                return
            candidates.append(isos)
        total = 1
        for c in candidates:
            total *= len(c)
            if total > 2 * 10 ** 6:
                raise SizeBoundExceeded("gluing-isomorphism search space too large")
        assign_vec = tuple(assign[s] for s in self.subsets)
        for combo in iproduct(*candidates):
            glue = [0] * len(self.pair_list)
            for (s, t), iso in zip(free_pairs, combo):
                glue[self.pair_index[(s, t)]] = iso
                flipped = cat.comp[(iso, pc.beta[(assign[t], assign[s])])]
                glue[self.pair_index[(t, s)]] = flipped
            x = SystemObject(assign_vec, tuple(glue))
            if self._coherent(x):
                out.append(x)

    def _coherent(self, x: SystemObject) -> bool:
        pc = self.permcat
        cat = pc.cat
        nonempty = [s for s in self.subsets if s]
        for r in nonempty:
            for s in nonempty:
                if r & s:
                    continue
                for t in nonempty:
                    if (r | s) & t:
                        continue
                    left = cat.comp[(self.a_of(x, r | s, t),
                                     pc.tmor(self.a_of(x, r, s),
                                             cat.ident[self.obj_at(x, t)]))]
                    right = cat.comp[(self.a_of(x, r, s | t),
                                      pc.tmor(cat.ident[self.obj_at(x, r)],
                                              self.a_of(x, s, t)))]
                    if left != right:
                        return False
        return True

    def _enumerate_morphisms(self):
        pc = self.permcat
        cat = pc.cat
        singles = [frozenset({i}) for i in range(self.n)]
        morphisms: list[tuple[int, int, tuple[int, ...]]] = []
        index: dict[tuple, int] = {}
        for xi, x in enumerate(self.objects):
            for yi, y in enumerate(self.objects):
                pools = [cat.hom(self.obj_at(x, s), self.obj_at(y, s)) for s in singles]
                if any(not p for p in pools):
                    continue
                for combo in iproduct(*pools):
                    alpha = self._derive_alpha(x, y, combo)
                    if alpha is not None:
                        morphisms.append((xi, yi, alpha))
        morphisms.sort()
        index = {m: i for i, m in enumerate(morphisms)}
        return morphisms, index

    def _derive_alpha(self, x: SystemObject, y: SystemObject,
                      singles_alpha: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Extend singleton components over all subsets and check every square."""
        pc = self.permcat
        cat = pc.cat
        alpha: dict[frozenset, int] = {frozenset(): cat.ident[pc.unit]}
        for i, f in enumerate(singles_alpha):
            alpha[frozenset({i})] = f
        for s in self.subsets:
            if len(s) < 2:
                continue
            split = max(s)
            rest = s - {split}
            a_x = self.a_of(x, rest, frozenset({split}))
            a_y = self.a_of(y, rest, frozenset({split}))
            inv = cat.is_iso(a_x)
            body = pc.tmor(alpha[rest], alpha[frozenset({split})])
            if body is None:
                return None
            alpha[s] = cat.comp[(a_y, cat.comp[(body, inv)])]
        for (s, t) in self.pair_list:
            lhs = cat.comp[(alpha[s | t], self.a_of(x, s, t))]
            body = pc.tmor(alpha[s], alpha[t])
            if body is None:
                return None
            rhs = cat.comp[(self.a_of(y, s, t), body)]
            if lhs != rhs:
                return None
        return tuple(alpha[s] for s in self.subsets)

    def _assemble(self) -> FinCategory:
        cat = self.permcat.cat
        src = [m[0] for m in self.morphisms]
        tgt = [m[1] for m in self.morphisms]
        ident = []
        for xi, x in enumerate(self.objects):
            key = (xi, xi, tuple(cat.ident[a] for a in x.assign))
            ident.append(self.mor_index[key])
        comp = {}
        by_src: dict[int, list[int]] = {}
        for i, m in enumerate(self.morphisms):
            by_src.setdefault(m[0], []).append(i)
        for fi, (xa, xb, fal) in enumerate(self.morphisms):
            for gi in by_src.get(xb, []):
                (_, xc, gal) = self.morphisms[gi]
                composite = tuple(cat.comp[(g, f)] for f, g in zip(fal, gal))
                comp[(gi, fi)] = self.mor_index[(xa, xc, composite)]
        return FinCategory(len(self.objects), src, tgt, ident, comp, check=False)

    # -- functoriality over based maps ---------------------------------------
    def induced_object(self, target: "AbarCategory", phi: Sequence[int],
                       xi: int) -> int:
        """Push a system along a based map; phi[j] is the image of point j+1."""
        x = self.objects[xi]
        assign = []
        glue = [0] * len(target.pair_list)
        preimage = {}
        for u in target.subsets:
            pre = frozenset(j for j in range(self.n) if phi[j] != 0 and (phi[j] - 1) in u)
            preimage[u] = pre
            assign.append(self.obj_at(x, pre))
        for (u, v) in target.pair_list:
            glue[target.pair_index[(u, v)]] = self.a_of(x, preimage[u], preimage[v])
        return target.object_index[SystemObject(tuple(assign), tuple(glue)).key()]

    def induced_morphism(self, target: "AbarCategory", phi: Sequence[int],
                         mi: int) -> int:
        xi, yi, alpha = self.morphisms[mi]
        out = []
        for u in target.subsets:
            pre = frozenset(j for j in range(self.n) if phi[j] != 0 and (phi[j] - 1) in u)
            out.append(alpha[self.sub_index[pre]])
        return target.mor_index[(self.induced_object(target, phi, xi),
                                 self.induced_object(target, phi, yi), tuple(out))]

    # -- twisted actions -------------------------------------------------------
    def twisted_action(self, t: GSet) -> tuple[list[list[int]], list[list[int]]]:
        """Object and morphism action tables of the twisted structure for t."""
        pc = self.permcat
        cat = pc.cat
        group = t.group
        obj_tables = []
        mor_tables = []
        for g in group.elements():
            inv = group.inv[g]
            slot = [t.action[inv][i + 1] - 1 for i in range(self.n)]  # sigma(g)^{-1}
            obj_map = []
            for x in self.objects:
                assign = []
                glue = [0] * len(self.pair_list)
                for s in self.subsets:
                    moved = frozenset(slot[i] for i in s)
                    assign.append(cat.act_obj(g, self.obj_at(x, moved)))
                for (s, u) in self.pair_list:
                    ms = frozenset(slot[i] for i in s)
                    mu = frozenset(slot[i] for i in u)
                    glue[self.pair_index[(s, u)]] = cat.act_mor(g, self.a_of(x, ms, mu))
                obj_map.append(self.object_index[SystemObject(tuple(assign), tuple(glue)).key()])
            mor_map = []
            for (xi, yi, alpha) in self.morphisms:
                moved = tuple(cat.act_mor(g, alpha[self.sub_index[frozenset(slot[i] for i in s)]])
                              for s in self.subsets)
                mor_map.append(self.mor_index[(obj_map[xi], obj_map[yi], moved)])
            obj_tables.append(obj_map)
            mor_tables.append(mor_map)
        return obj_tables, mor_tables


def build_Abar(permcat: PermCat, n: int, **kw) -> AbarCategory:
    """All coherent systems and their componentwise morphisms at level n."""
    return AbarCategory(permcat, n, **kw)


# ---------------------------------------------------------------------------
# The equivalence certificate

def _kappa(objs: Sequence[int], s: frozenset, unit: int) -> tuple[int, ...]:
    return tuple(objs[i] if i in s else unit for i in range(len(objs)))


def _reduced(objs: Sequence[int], s: frozenset) -> tuple[list[int], list[int]]:
    """Nonunit slots of a kappa tuple: the object list and their slot indices."""
    idx = sorted(s)
    return [objs[i] for i in idx], idx


class Equivalence:
    """Projection-to-singletons data over a built system category."""

    def __init__(self, abar: AbarCategory, norm: Norm):
        self.abar = abar
        self.norm = norm
        self.pc = abar.permcat
        self.cat = self.pc.cat
        self.grid = [objs for objs in normable_tuples(self.pc, norm)]
        self.grid_index = {o: i for i, o in enumerate(self.grid)}

    # delta: systems -> tuples
    def delta_obj(self, xi: int) -> tuple[int, ...]:
        x = self.abar.objects[xi]
        return tuple(self.abar.obj_at(x, frozenset({i})) for i in range(self.abar.n))

    def delta_mor(self, mi: int) -> tuple[int, ...]:
        _, _, alpha = self.abar.morphisms[mi]
        return tuple(alpha[self.abar.sub_index[frozenset({i})]] for i in range(self.abar.n))

    # nu: tuples -> systems
    def nu_glue(self, objs: Sequence[int], s: frozenset, t: frozenset) -> int:
        pc, cat, norm = self.pc, self.cat, self.norm
        vs = norm.untwist(_kappa(objs, s, pc.unit))
        vt = norm.untwist(_kappa(objs, t, pc.unit))
        vst = norm.untwist(_kappa(objs, s | t, pc.unit))
        shuffle = self._shuffle(objs, s, t)
        body = cat.comp[(shuffle, pc.tmor(vs, vt))]
        return cat.comp[(cat.is_iso(vst), body)]

    def _shuffle(self, objs: Sequence[int], s: frozenset, t: frozenset) -> int:
        ls, is_ = _reduced(objs, s)
        lt, it_ = _reduced(objs, t)
        union = sorted(s | t)
        rank = {i: p for p, i in enumerate(union)}
        positions = [rank[i] for i in is_] + [rank[i] for i in it_]
        return self.pc.perm_iso(ls + lt, positions)

    def nu_obj(self, objs: tuple[int, ...]) -> int:
        abar = self.abar
        assign = [self.norm.ob_map(_kappa(objs, s, self.pc.unit)) for s in abar.subsets]
        glue = [0] * len(abar.pair_list)
        for (s, t) in abar.pair_list:
            glue[abar.pair_index[(s, t)]] = self.nu_glue(objs, s, t)
        return abar.object_index[SystemObject(tuple(assign), tuple(glue)).key()]

    def nu_mor(self, src: tuple[int, ...], tgt: tuple[int, ...],
               mors: tuple[int, ...]) -> int:
        abar = self.abar
        comps = tuple(self.norm.mor_map(
            tuple(mors[i] if i in s else self.cat.ident[self.pc.unit]
                  for i in range(abar.n)))
            for s in abar.subsets)
        return abar.mor_index[(self.nu_obj(src), self.nu_obj(tgt), comps)]

    # eta: the connecting components, built inductively
    def eta_components(self, xi: int, use_min_split: bool = False) -> dict[frozenset, int]:
        abar, pc, cat, norm = self.abar, self.pc, self.cat, self.norm
        x = abar.objects[xi]
        objs = self.delta_obj(xi)
        eta: dict[frozenset, int] = {frozenset(): cat.ident[pc.unit]}
        for i in range(abar.n):
            eta[frozenset({i})] = cat.ident[objs[i]]
        for s in abar.subsets:
            if len(s) < 2:
                continue
            split = min(s) if use_min_split else max(s)
            rest = s - {split}
            step1 = cat.is_iso(self.abar.a_of(x, rest, frozenset({split})))
            step2 = pc.tmor(eta[rest], cat.ident[objs[split]])
            vr = norm.untwist(_kappa(objs, rest, pc.unit))
            vs = norm.untwist(_kappa(objs, s, pc.unit))
            shuffle = self._shuffle(objs, rest, frozenset({split}))
            step3 = cat.comp[(cat.is_iso(vs), cat.comp[(shuffle, pc.tmor(vr, cat.ident[objs[split]]))])]
            eta[s] = cat.comp[(step3, cat.comp[(step2, step1)])]
        return eta


def certify_equivalence(permcat: PermCat, t: GSet, norm: Optional[Norm] = None,
                        **abar_kw) -> dict:
    """Build the system category and certify the singleton-projection equivalence.

    Checks, by exhaustive table scans: the untwistor axioms for the given
    twisted set, strict right-invertibility of the projection, that every
    connecting component is an isomorphism natural in the system, and twisted
    G-equivariance of all three pieces. Raises DiagramFailure on the first
    failing square; returns per-check pass counts.
    """
    if not t.based:
        raise ValueError("the twisting set must be based")
    n = t.size - 1
    norm = norm or standard_norm(permcat, t)
    validate_norm(norm)
    abar = build_Abar(permcat, n, **abar_kw)
    eq = Equivalence(abar, norm)
    cat = abar.cat
    pcat = permcat.cat
    counts = {"objects": len(abar.objects), "morphisms": len(abar.morphisms),
              "grid": len(eq.grid)}

    # delta respects identities/composition by construction (componentwise);
    # check delta∘nu = Id strictly on the normable grid
    for objs in eq.grid:
        if eq.delta_obj(eq.nu_obj(objs)) != objs:
            raise DiagramFailure("projection-section-objects", objs)
    counts["delta_nu_objects"] = len(eq.grid)
    checked = 0
    for src in eq.grid:
        pools = [[f for f in range(pcat.n_mor) if pcat.src[f] == src[i]]
                 for i in range(n)]
        for combo in iproduct(*pools):
            tgt = tuple(pcat.tgt[f] for f in combo)
            if tgt not in eq.grid_index:
                continue
            mi = eq.nu_mor(src, tgt, combo)
            if eq.delta_mor(mi) != combo:
                raise DiagramFailure("projection-section-morphisms", (src, combo))
            checked += 1
    counts["delta_nu_morphisms"] = checked

    # eta: isomorphism components, membership as a genuine system morphism,
    # naturality against every morphism
    etas = []
    for xi in range(len(abar.objects)):
        eta = eq.eta_components(xi)
        nd_xi = eq.nu_obj(eq.delta_obj(xi))
        key = (xi, nd_xi, tuple(eta[s] for s in abar.subsets))
        if key not in abar.mor_index:
            raise DiagramFailure("eta-source-target", xi)
        for s in abar.subsets:
            if pcat.is_iso(eta[s]) is None:
                raise DiagramFailure("eta-not-iso", (xi, s))
        etas.append(eta)
    counts["eta_components"] = sum(len(e) for e in etas)
    for mi, (xi, yi, alpha) in enumerate(abar.morphisms):
        nd_mi = eq.nu_mor(eq.delta_obj(xi), eq.delta_obj(yi), eq.delta_mor(mi))
        _, _, nd_alpha = abar.morphisms[nd_mi]
        for s in abar.subsets:
            si = abar.sub_index[s]
            lhs = pcat.comp[(etas[yi][s], alpha[si])]
            rhs = pcat.comp[(nd_alpha[si], etas[xi][s])]
            if lhs != rhs:
                raise DiagramFailure("eta-naturality", (mi, s))
    counts["eta_naturality"] = len(abar.morphisms)

    # twisted equivariance of all three
    obj_act, mor_act = abar.twisted_action(t)
    group = t.group
    for g in group.elements():
        inv = group.inv[g]
        slot = [t.action[inv][i + 1] - 1 for i in range(n)]
        for xi in range(len(abar.objects)):
            dx = eq.delta_obj(xi)
            twisted = tuple(pcat.act_obj(g, dx[slot[i]]) for i in range(n))
            if eq.delta_obj(obj_act[g][xi]) != twisted:
                raise DiagramFailure("delta-equivariance", (g, xi))
        for objs in eq.grid:
            twisted = tuple(pcat.act_obj(g, objs[slot[i]]) for i in range(n))
            if eq.nu_obj(twisted) != obj_act[g][eq.nu_obj(objs)]:
                raise DiagramFailure("nu-equivariance", (g, objs))
        for xi in range(len(abar.objects)):
            gx = obj_act[g][xi]
            for s in abar.subsets:
                moved = frozenset(slot[i] for i in s)
                if etas[gx][s] != pcat.act_mor(g, etas[xi][moved]):
                    raise DiagramFailure("eta-equivariance", (g, xi, s))
    counts["equivariance_elements"] = group.order

    if n == 2:
        for xi in range(len(abar.objects)):
            if eq.eta_components(xi, use_min_split=True) != etas[xi]:
                raise DiagramFailure("eta-order-independence", xi)
        counts["eta_alternate_order"] = len(abar.objects)
        counts.update(_brute_force_equivalence_counts(eq))
    counts["status"] = "pass"
    return counts


def _brute_force_equivalence_counts(eq: Equivalence) -> dict:
    """Independent full-faithfulness and essential-surjectivity tallies."""
    abar = eq.abar
    pcat = eq.pc.cat
    cat = abar.cat
    ff_checked = 0
    for xi in range(len(abar.objects)):
        for yi in range(len(abar.objects)):
            homs = [mi for mi in range(len(abar.morphisms))
                    if abar.morphisms[mi][0] == xi and abar.morphisms[mi][1] == yi]
            dx, dy = eq.delta_obj(xi), eq.delta_obj(yi)
            target = 1
            for i in range(abar.n):
                target *= len(pcat.hom(dx[i], dy[i]))
            images = {eq.delta_mor(mi) for mi in homs}
            if len(images) != len(homs) or len(homs) != target:
                raise DiagramFailure("fully-faithful-count", (xi, yi))
            ff_checked += 1
    surj = 0
    for objs in eq.grid:
        hit = any(eq.delta_obj(xi) == objs for xi in range(len(abar.objects)))
        if not hit:
            raise DiagramFailure("essential-surjectivity", objs)
        surj += 1
    return {"fully_faithful_pairs": ff_checked, "essentially_surjective_objects": surj}
