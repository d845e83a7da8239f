"""Extremal feasible POVMs: vertex enumeration, catalogs, certificates.

Two independent enumeration routes are provided.  The primary one is an
exact double-description sweep (incremental halfspace insertion on the
homogenised cone, integer ray arithmetic, combinatorial adjacency).  The
oracle is brute-force active-set enumeration: every maximal-rank subset
of halfspaces is solved and kept if feasible.  The oracle is restricted
to reduced dimension <= 8; it prefilters the combinatorial explosion in
floating point (safe here because all constraint data is scaled to small
integers, so a nonsingular active set has |det| >= 1) and every surviving
candidate is re-solved and re-checked in exact rational arithmetic before
it is accepted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exactlin
from .feasible import (
    Polytope,
    SymPovm,
    build_feasible_polytope,
    is_feasible,
    povm_from_coords,
)
from .symmetry import CoeffVector, Family, SymmetryKind, pt_coefficient_map


class EmptyPolytopeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# vertex sets

@dataclass(frozen=True)
class VertexSet:
    """Vertices of a feasible-POVM polytope, canonically sorted.

    ``points`` holds raw polytope coordinates with their active-constraint
    labels; the POVM views expand eliminated two-outcome polytopes back to
    both elements.
    """

    kind: SymmetryKind | None
    n_outcomes: int | None
    points: tuple  # of (coords tuple, active labels tuple or None)
    eliminated: bool = False

    def coords_set(self):
        return frozenset(c for c, _ in self.points)

    def ordered_povms(self):
        if self.kind is None:
            raise ValueError("geometry-only vertex set has no POVM view")
        out = []
        for coords, _ in self.points:
            if self.eliminated:
                full = tuple(coords) + tuple(1 - v for v in coords)
            else:
                full = coords
            out.append(povm_from_coords(self.kind, self.n_outcomes, full))
        return out

    def povm_keys(self):
        return frozenset(tuple(e.coeffs for e in p.elements)
                         for p in self.ordered_povms())

    def canonical_classes(self):
        """(canonical povm, multiplicity, representative active set), sorted."""
        groups = {}
        for (coords, active), povm in zip(self.points, self.ordered_povms()):
            key = tuple(e.coeffs for e in povm.canonical().elements)
            entry = groups.setdefault(key, [povm.canonical(), 0, active])
            entry[1] += 1
        return [tuple(groups[k]) for k in sorted(groups)]

    def to_json(self) -> dict:
        out = {"count": len(self.points),
               "vertices": [{"coords": [str(c) for c in coords],
                             "active": None if active is None else [list(a) for a in active]}
                            for coords, active in self.points]}
        if self.kind is not None:
            out["family"] = self.kind.family.value
            out["dim"] = self.kind.dim
            out["outcomes"] = self.n_outcomes
            out["eliminated"] = self.eliminated
            out["classes"] = [{"elements": [[str(c) for c in e.coeffs]
                                            for e in povm.elements],
                               "multiplicity": mult}
                              for povm, mult, _ in self.canonical_classes()]
        return out

    @classmethod
    def from_json(cls, obj) -> "VertexSet":
        from .symmetry import kind as mk

        k = mk(obj["family"], int(obj["dim"])) if "family" in obj else None
        points = []
        for v in obj["vertices"]:
            coords = tuple(Fraction(c) for c in v["coords"])
            active = v.get("active")
            if active is not None:
                active = tuple(tuple(a) for a in active)
            points.append((coords, active))
        return cls(k, obj.get("outcomes"), tuple(points),
                   eliminated=bool(obj.get("eliminated")))


def _vertex_set_from_points(polytope: Polytope, pts):
    meta = polytope.meta or {}
    points = tuple(sorted((tuple(x), polytope.active_labels(x)) for x in pts))
    return VertexSet(meta.get("kind"), meta.get("outcomes"), points,
                     eliminated=bool(meta.get("eliminated")))


# ---------------------------------------------------------------------------
# equality elimination

def _reduce_polytope(polytope: Polytope):
    """Parametrise the equality-affine subspace: x = x0 + B z.

    Returns (x0, basis vectors B, reduced rows [(coeffs, rhs, orig index)]).
    """
    n = polytope.ambient_dim
    if polytope.equalities:
        rows = [list(r) for r, _, _ in polytope.equalities]
        rhs = [b for _, b, _ in polytope.equalities]
        x0 = _exactlin.solve(rows, rhs)
        if x0 is None:
            raise EmptyPolytopeError("inconsistent equality constraints")
        basis = _exactlin.nullspace(rows, n)
    else:
        x0 = [Fraction(0)] * n
        basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    reduced = []
    for idx, (row, rhs, _) in enumerate(polytope.inequalities):
        coeffs = [sum(r * b for r, b in zip(row, bvec)) for bvec in basis]
        shift = rhs - sum(r * v for r, v in zip(row, x0))
        if all(c == 0 for c in coeffs):
            if shift > 0:
                raise EmptyPolytopeError("equality subspace violates an inequality")
            continue
        reduced.append((coeffs, shift, idx))
    return x0, basis, reduced


def _lift(x0, basis, z):
    return tuple(x + sum(b[i] * zz for b, zz in zip(basis, z))
                 for i, x in enumerate(x0))


# ---------------------------------------------------------------------------
# double description

def _primitive(vec):
    g = 0
    for v in vec:
        g = _gcd(g, abs(v))
    if g > 1:
        return tuple(v // g for v in vec)
    return tuple(vec)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _dd_cone(rows, dim):
    """Extreme rays of {y : row . y >= 0 for all rows}, exact integers.

    Standard incremental insertion: start from a simplicial cone spanned by
    the first ``dim`` independent rows, then cut with the remaining rows,
    keeping adjacent positive/negative ray combinations.  Zero sets are
    re-evaluated exactly on every new ray so the combinatorial adjacency
    test stays valid under degeneracy.
    """
    chosen = []
    chosen_idx = []
    for i, r in enumerate(rows):
        if _exactlin.rank([list(map(Fraction, c)) for c in chosen + [r]]) > len(chosen):
            chosen.append(r)
            chosen_idx.append(i)
            if len(chosen) == dim:
                break
    if len(chosen) < dim:
        raise ValueError("cone is not pointed; polytope unbounded or degenerate")
    inv = _exactlin.inverse([list(map(Fraction, r)) for r in chosen])
    rays = []
    for j in range(dim):
        col = [inv[i][j] for i in range(dim)]
        rays.append(_primitive(tuple(_exactlin.primitive_ints(col))))
    processed = list(chosen_idx)

    def zeroset(ray):
        mask = 0
        for pos, ri in enumerate(processed):
            if sum(a * b for a, b in zip(rows[ri], ray)) == 0:
                mask |= 1 << pos
        return mask

    masks = [zeroset(r) for r in rays]
    for i, row in enumerate(rows):
        if i in chosen_idx:
            continue
        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        if all(v >= 0 for v in vals):
            processed.append(i)
            bit = 1 << (len(processed) - 1)
            masks = [m | bit if v == 0 else m for m, v in zip(masks, vals)]
            continue
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        new_rays = []
        for p in pos:
            for q in neg:
                common = masks[p] & masks[q]
                if common.bit_count() < dim - 2:
                    continue
                if any(k != p and k != q and (masks[k] & common) == common
                       for k in range(len(rays))):
                    continue
                combo = tuple(vals[p] * rays[q][t] - vals[q] * rays[p][t]
                              for t in range(dim))
                new_rays.append(_primitive(combo))
        processed.append(i)
        bit = 1 << (len(processed) - 1)
        keep_rays = [rays[k] for k in pos] + [rays[k] for k in zero]
        keep_masks = [masks[k] for k in pos] + [masks[k] | bit for k in zero]
        for r in new_rays:
            keep_rays.append(r)
            keep_masks.append(zeroset(r))
        rays, masks = keep_rays, keep_masks
    return rays


def enumerate_vertices(polytope: Polytope) -> VertexSet:
    """Exact vertex enumeration by double description."""
    x0, basis, reduced = _reduce_polytope(polytope)
    m = len(basis)
    if m == 0:
        if polytope.check_point(x0):
            raise EmptyPolytopeError("equality point violates the inequalities")
        return _vertex_set_from_points(polytope, [tuple(x0)])
    rows = []
    for coeffs, shift, _ in reduced:
        rows.append(tuple(_exactlin.primitive_ints(list(coeffs) + [-shift])))
    rows.append(tuple([0] * m + [1]))  # homogenising t >= 0
    rays = _dd_cone(rows, m + 1)
    pts = []
    seen = set()
    for ray in rays:
        t = ray[m]
        if t == 0:
            raise ValueError("polytope is unbounded (recession ray found)")
        z = [Fraction(v, t) for v in ray[:m]]
        x = _lift(x0, basis, z)
        if x not in seen:
            seen.add(x)
            pts.append(x)
    if not pts:
        raise EmptyPolytopeError("polytope is empty")
    return _vertex_set_from_points(polytope, pts)


# ---------------------------------------------------------------------------
# brute-force active-set oracle

def brute_force_vertices(polytope: Polytope, chunk=60000) -> VertexSet:
    """Independent enumeration oracle: all maximal-rank active subsets.

    Reduced dimension must be <= 8.  Candidate active sets are screened in
    floating point and every survivor is confirmed in exact arithmetic, so
    the output is exact; the integer-data guard below keeps the screen
    conservative (no exact vertex can be screened out).
    """
    x0, basis, reduced = _reduce_polytope(polytope)
    m = len(basis)
    if m == 0:
        return enumerate_vertices(polytope)
    if m > 8:
        raise ValueError("brute-force oracle is limited to reduced dimension <= 8")
    int_rows = [_exactlin.primitive_ints(list(coeffs) + [shift])
                for coeffs, shift, _ in reduced]
    A = np.array([r[:m] for r in int_rows], dtype=float)
    b = np.array([r[m] for r in int_rows], dtype=float)
    K = len(int_rows)
    if K < m:
        raise EmptyPolytopeError("too few inequalities to pin a vertex")
    maxabs = max(1, max(abs(v) for r in int_rows for v in r[:m]))
    if (m ** 0.5 * maxabs) ** m > 1e12:
        raise ValueError("constraint integers too large for the float screen")

    candidates = {}
    combo_iter = itertools.combinations(range(K), m)
    while True:
        block = list(itertools.islice(combo_iter, chunk))
        if not block:
            break
        idx = np.array(block, dtype=np.intp)
        M = A[idx]
        rhs = b[idx]
        dets = np.linalg.det(M)
        ok = np.abs(dets) > 0.5
        if not ok.any():
            continue
        X = np.linalg.solve(M[ok], rhs[ok][:, :, None])[:, :, 0]
        res = X @ A.T - b
        feas = (res >= -1e-7).all(axis=1)
        for row_i in np.nonzero(feas)[0]:
            key = tuple(np.round(X[row_i], 9))
            subs = candidates.setdefault(key, [])
            if len(subs) < 32:
                subs.append(tuple(int(v) for v in idx[ok][row_i]))

    exact_pts = set()
    frac_rows = [[Fraction(v) for v in r[:m]] for r in int_rows]
    frac_rhs = [Fraction(r[m]) for r in int_rows]
    for subs in candidates.values():
        for sub in subs:
            sol = _exactlin.solve([frac_rows[i] for i in sub],
                                  [frac_rhs[i] for i in sub])
            if sol is None:
                continue
            if all(sum(r * v for r, v in zip(frac_rows[i], sol)) >= frac_rhs[i]
                   for i in range(K)):
                exact_pts.add(tuple(sol))
    pts = [_lift(x0, basis, z) for z in sorted(exact_pts)]
    if not pts:
        raise EmptyPolytopeError("polytope is empty")
    return _vertex_set_from_points(polytope, pts)


# ---------------------------------------------------------------------------
# extremality certificates

@dataclass(frozen=True)
class ExtremalityReport:
    extremal: bool
    rank: int
    ambient: int
    perturbation: SymPovm | None = None  # feasible direction when non-extremal


def is_extremal(p: SymPovm) -> ExtremalityReport:
    """Active-set rank test with an explicit perturbation witness.

    p is extremal iff the constraints active at p span coefficient space;
    otherwise any kernel direction delta keeps both p + delta and
    p - delta feasible after scaling below the slack of the inactive rows.
    """
    report = is_feasible(p)
    if not report.feasible:
        raise ValueError(f"is_extremal requires a feasible POVM; violations: "
                         f"{report.violations}")
    poly = build_feasible_polytope(p.kind, p.n_outcomes, eliminate=False)
    x = p.coords()
    rows = [list(r) for r, _, _ in poly.equalities]
    slack_rows = []
    for row, rhs, label in poly.inequalities:
        val = sum(r * v for r, v in zip(row, x))
        if val == rhs:
            rows.append(list(row))
        else:
            slack_rows.append((row, val - rhs))
    rank = _exactlin.rank(rows)
    if rank == poly.ambient_dim:
        return ExtremalityReport(True, rank, poly.ambient_dim)
    delta = _exactlin.nullspace(rows, poly.ambient_dim)[0]
    eps = None
    for row, slack in slack_rows:
        move = sum(r * d for r, d in zip(row, delta))
        if move:
            bound = slack / abs(move)
            if eps is None or bound < eps:
                eps = bound
    scale = Fraction(1) if eps is None else eps / 2
    witness = povm_from_coords(p.kind, p.n_outcomes,
                               tuple(scale * d for d in delta))
    return ExtremalityReport(False, rank, poly.ambient_dim, perturbation=witness)


def perturbed(p: SymPovm, delta: SymPovm, sign=1) -> SymPovm:
    elems = tuple(CoeffVector(p.kind, tuple(a + sign * b for a, b in
                                            zip(e.coeffs, d.coeffs)))
                  for e, d in zip(p.elements, delta.elements))
    return SymPovm(p.kind, elems)


# ---------------------------------------------------------------------------
# analytic catalogs

def oo_two_outcome_elements(d: int) -> dict:
    """The eight two-outcome extremal elements, keyed A1..D2."""
    den = Fraction((d + 2) * (d - 1))
    return {
        "A1": (Fraction(0), Fraction(0), Fraction(0)),
        "A2": (Fraction(1), Fraction(1), Fraction(1)),
        "B1": (Fraction(0), Fraction(0), Fraction(2 * d) / den),
        "B2": (Fraction(1), Fraction(1), Fraction((d + 1) * (d - 2)) / den),
        "C1": (Fraction(1), Fraction(1, d - 1), Fraction(d - 2) / den),
        "C2": (Fraction(0), Fraction(d - 2, d - 1), Fraction(d * d) / den),
        "D1": (Fraction(1), Fraction(0), Fraction(2, d + 2)),
        "D2": (Fraction(0), Fraction(1), Fraction(d, d + 2)),
    }


def oo_three_outcome_elements(d: int) -> tuple:
    """The unique genuine 3-outcome extremal triple (M1, M2, M3)."""
    den = Fraction((d + 2) * (d - 1))
    m1 = (Fraction(0), Fraction(0), Fraction(2 * d) / den)
    m2 = (Fraction(0), Fraction(d - 2, d - 1), Fraction(d * (d - 2)) / den)
    m3 = (Fraction(1), Fraction(1, d - 1), Fraction(d - 2) / den)
    return m1, m2, m3


def _placements(n_outcomes, parts, zero):
    """All ordered POVMs placing ``parts`` into distinct slots, rest zero."""
    out = set()
    for slots in itertools.permutations(range(n_outcomes), len(parts)):
        elems = [zero] * n_outcomes
        for s, part in zip(slots, parts):
            elems[s] = part
        out.add(tuple(elems))
    return out


def catalog_extrema(k: SymmetryKind, n_outcomes: int) -> VertexSet:
    """Closed-form extremal catalog (ordered POVMs, canonically grouped)."""
    if n_outcomes < 1:
        raise ValueError("need at least one outcome")
    d = k.dim
    n = k.n_coeffs
    zero = (Fraction(0),) * n
    povm_tuples = set()
    if k.family in (Family.ISOTROPIC, Family.WERNER):
        # images of {0,1} point-mass protocol distributions
        for xi in range(n_outcomes):
            for yi in range(n_outcomes):
                elems = []
                for kk in range(n_outcomes):
                    x = Fraction(int(kk == xi))
                    y = Fraction(int(kk == yi))
                    if k.family is Family.ISOTROPIC:
                        a, b = x, (d * y + x) / (d + 1)
                    else:
                        a, b = y, (2 * x + (d - 1) * y) / (d + 1)
                    elems.append((a, b))
                povm_tuples.add(tuple(elems))
    elif k.family is Family.BELL:
        ident = (Fraction(1),) * 4
        povm_tuples |= _placements(n_outcomes, [ident], zero)
        if n_outcomes >= 2:
            for subset in itertools.combinations(range(4), 2):
                col1 = tuple(Fraction(int(i in subset)) for i in range(4))
                col2 = tuple(1 - c for c in col1)
                povm_tuples |= _placements(n_outcomes, [col1, col2], zero)
    else:
        pairs = oo_two_outcome_elements(d)
        povm_tuples |= _placements(n_outcomes, [pairs["A2"]], zero)
        for letter in "BCD":
            povm_tuples |= _placements(n_outcomes,
                                       [pairs[letter + "1"], pairs[letter + "2"]],
                                       zero)
        if n_outcomes >= 3:
            povm_tuples |= _placements(n_outcomes,
                                       list(oo_three_outcome_elements(d)), zero)
    poly = build_feasible_polytope(k, n_outcomes, eliminate=False)
    pts = sorted(tuple(c for e in povm for c in e) for povm in povm_tuples)
    points = tuple((x, poly.active_labels(x)) for x in pts)
    return VertexSet(k, n_outcomes, points, eliminated=False)


# ---------------------------------------------------------------------------
# basic vectors

@dataclass(frozen=True)
class BasicVectorSet:
    kind: SymmetryKind
    vectors: tuple  # of CoeffVector


def basic_vectors(k: SymmetryKind) -> BasicVectorSet:
    """Conic generators of the feasible elements for a family."""
    d = k.dim
    if k.family is Family.BELL:
        vecs = sorted(set(itertools.permutations((1, 1, 0, 0))))
        vecs.append((0, 0, 0, 0))
        vecs.append((1, 1, 1, 1))
        out = [tuple(Fraction(v) for v in vec) for vec in vecs]
    elif k.family is Family.OO:
        pairs = oo_two_outcome_elements(d)
        out = [pairs[key] for key in ("A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2")]
    elif k.family is Family.ISOTROPIC:
        out = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)),
               (Fraction(1), Fraction(1, d + 1)), (Fraction(0), Fraction(d, d + 1))]
    else:
        out = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)),
               (Fraction(0), Fraction(2, d + 1)),
               (Fraction(1), Fraction(d - 1, d + 1))]
    return BasicVectorSet(k, tuple(CoeffVector(k, v) for v in out))


def decompose_into_basic(v: CoeffVector) -> tuple:
    """Nonnegative weights over basic_vectors(v.kind) reconstructing v."""
    ptm = pt_coefficient_map(v.kind)
    if not v.is_nonneg() or not ptm.apply(v).is_nonneg():
        raise ValueError("element is not feasible (fails positivity or PPT)")
    from .feasible import LinearProgram, Polytope, lp_solve

    basics = basic_vectors(v.kind).vectors
    n = v.kind.n_coeffs
    eqs = [(tuple(b.coeffs[i] for b in basics), v.coeffs[i], ("coord", None, i))
           for i in range(n)]
    poly = Polytope(len(basics), (), tuple(eqs))
    res = lp_solve(LinearProgram(poly, (Fraction(0),) * len(basics),
                                 sense="min", nonneg=True))
    if res.status != "optimal":
        raise AssertionError("feasible element failed to decompose over basic vectors")
    return res.point


# ---------------------------------------------------------------------------
# structure checks over a catalog

@dataclass(frozen=True)
class LemmaCheck:
    vertex_index: int
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class LemmaReport:
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _proportional_to(v, w):
    """Scalar lam > 0 with v = lam * w, or None."""
    lam = None
    for a, b in zip(v, w):
        if b == 0:
            if a != 0:
                return None
        else:
            r = Fraction(a) / b
            if lam is None:
                lam = r
            elif lam != r:
                return None
    return lam if lam and lam > 0 else None


def check_lemma_properties(catalog: VertexSet) -> LemmaReport:
    """Structural requirements every extremal vertex must satisfy.

    Checked per canonical vertex: linear independence of the nonzero
    elements; for the Bell family, at least N-1 tight columns among N
    nonzero ones; for the oo family, no vertex with 3+ nonzero outcomes
    may use both members of a complementary pair nor the identity element;
    and every vertex with a full count of nonzero outcomes must consist of
    elements proportional to 2-outcome extremal elements.
    """
    k = catalog.kind
    n = k.n_coeffs
    two_out = [v.coeffs for v in basic_vectors(k).vectors if any(v.coeffs)]
    if k.family is Family.OO:
        pair_of = {}
        named = oo_two_outcome_elements(k.dim)
        for letter in "ABCD":
            for tag in ("1", "2"):
                pair_of[named[letter + tag]] = letter
    checks = []
    for vi, (povm, _, _) in enumerate(catalog.canonical_classes()):
        nz = [e.coeffs for e in povm.nonzero_elements()]
        indep = _exactlin.rank([list(map(Fraction, e)) for e in nz]) == len(nz)
        checks.append(LemmaCheck(vi, "nonzero-elements-independent", indep,
                                 f"{len(nz)} nonzero outcomes"))
        if k.family is Family.BELL and len(nz) >= 2:
            tight = sum(1 for e in nz if 2 * max(e) == sum(e))
            checks.append(LemmaCheck(vi, "bell-tight-columns",
                                     tight >= len(nz) - 1,
                                     f"{tight} tight of {len(nz)}"))
        if k.family is Family.OO and len(nz) >= 3:
            letters = []
            uses_identity = False
            for e in nz:
                match = None
                for w, letter in pair_of.items():
                    if _proportional_to(e, w) is not None:
                        match = (letter, w)
                        break
                if match is None:
                    letters = None
                    break
                if match[1] == named["A2"]:
                    uses_identity = True
                letters.append(match[0])
            ok = (letters is not None and len(set(letters)) == len(letters)
                  and not uses_identity)
            checks.append(LemmaCheck(vi, "oo-no-complementary-pair", ok,
                                     f"pair letters {letters}"))
        if len(nz) == n:
            ok = all(any(_proportional_to(e, w) is not None for w in two_out)
                     for e in nz)
            checks.append(LemmaCheck(vi, "max-outcome-two-outcome-proportional",
                                     ok, ""))
    return LemmaReport(tuple(checks))
