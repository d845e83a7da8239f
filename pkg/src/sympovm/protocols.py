"""Local measurement protocols attaining the symmetric PPT POVMs.

A protocol is a twirl tag plus, per outcome, a list of weighted product
terms (Alice factor (x) Bob factor), every factor PSD.  Twirling the
physical outcome operators must reproduce the target coefficient vectors
exactly; that check is `verify_protocol`.

Pure-state sets carry unnormalised Gaussian-rational amplitude vectors
with their squared norm, so projectors (and hence every protocol
operator) stay exactly rational even though the normalised amplitudes
involve 1/sqrt(2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .feasible import SymPovm
from .operators import (
    CR0,
    CR1,
    BipartiteOperator,
    CRat,
    cr,
    ketbra,
    mat,
    mat_add,
    mat_eye,
    mat_is_hermitian,
    mat_kron,
    mat_scale,
    mat_sub,
    mat_to_numpy,
    psd_exact,
)
from .symmetry import (
    CoeffVector,
    Family,
    SymmetryKind,
    twirl_coefficients,
    twirl_coefficients_float,
)


class InfeasibleTargetError(ValueError):
    """Target POVM violates the PPT condition needed by the protocol."""

    def __init__(self, outcome, coefficient, message):
        super().__init__(message)
        self.outcome = outcome
        self.coefficient = coefficient


@dataclass(frozen=True)
class ProductTerm:
    weight: Fraction
    a_factor: object  # d x d exact grid, or numpy array in float mode
    b_factor: object

    @property
    def exact(self) -> bool:
        return not isinstance(self.a_factor, np.ndarray)


@dataclass(frozen=True)
class LocalProtocol:
    kind: SymmetryKind
    outcomes: tuple  # of tuple[ProductTerm, ...]; an empty tuple is the zero outcome

    @property
    def exact(self) -> bool:
        return all(t.exact for terms in self.outcomes for t in terms)

    def outcome_operator(self, k):
        d = self.kind.dim
        terms = self.outcomes[k]
        if not self.exact:
            acc = np.zeros((d * d, d * d), dtype=complex)
            for t in terms:
                acc = acc + float(t.weight) * np.kron(np.asarray(t.a_factor),
                                                      np.asarray(t.b_factor))
            return BipartiteOperator(d, acc, exact=False)
        op = BipartiteOperator.zeros(d)
        for t in terms:
            op = op + BipartiteOperator(d, mat_kron(t.a_factor, t.b_factor)).scale(t.weight)
        return op

    def to_json(self) -> dict:
        def factor_json(g):
            if isinstance(g, np.ndarray):
                return {"dim": g.shape[0],
                        "entries": [[[z.real, z.imag] for z in row] for row in g]}
            return {"dim": len(g),
                    "entries": [[[str(x.re), str(x.im)] for x in row] for row in g]}

        return {"twirl": self.kind.family.value, "dim": self.kind.dim,
                "outcomes": [[{"w": str(t.weight),
                               "a": factor_json(t.a_factor),
                               "b": factor_json(t.b_factor)} for t in terms]
                             for terms in self.outcomes]}

    @classmethod
    def from_json(cls, obj) -> "LocalProtocol":
        from .symmetry import kind as mk

        k = mk(obj["twirl"], int(obj["dim"]))
        outcomes = []
        for terms in obj["outcomes"]:
            parsed = []
            for t in terms:
                a = _factor_from_json(t["a"])
                b = _factor_from_json(t["b"])
                parsed.append(ProductTerm(Fraction(t["w"]), a, b))
            outcomes.append(tuple(parsed))
        return cls(k, tuple(outcomes))


def _factor_from_json(obj):
    rows = obj["entries"]
    exact = all(isinstance(p[0], str) for row in rows for p in row)
    if exact:
        return mat([[CRat(Fraction(p[0]), Fraction(p[1])) for p in row] for row in rows])
    return np.array([[p[0] + 1j * p[1] for p in row] for row in rows], dtype=complex)


# ---------------------------------------------------------------------------
# pure-state sets resolving the identity with self-transpose-orthogonal states

@dataclass(frozen=True)
class PureState:
    weight: Fraction
    vec: tuple  # unnormalised CRat amplitudes
    norm2: Fraction

    def projector(self):
        inv = CRat(Fraction(1) / self.norm2)
        return tuple(tuple(inv * (x * y.conjugate()) for y in self.vec)
                     for x in self.vec)


@dataclass(frozen=True)
class PureStateSet:
    dim: int
    states: tuple  # of PureState

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "states": [{"weight": str(st.weight), "norm2": str(st.norm2),
                            "vec": [[str(x.re), str(x.im)] for x in st.vec]}
                           for st in self.states]}

    @classmethod
    def from_json(cls, obj) -> "PureStateSet":
        states = tuple(
            PureState(Fraction(st["weight"]),
                      tuple(CRat(Fraction(p[0]), Fraction(p[1])) for p in st["vec"]),
                      Fraction(st["norm2"]))
            for st in obj["states"])
        out = cls(int(obj["dim"]), states)
        _validate_state_set(out)
        return out


def cube_rotation_group():
    """The 24 proper rotations of the cube as signed permutation matrices."""
    mats = []
    for perm in itertools.permutations(range(3)):
        parity = 1
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    parity = -parity
        for signs in itertools.product((1, -1), repeat=3):
            if parity * signs[0] * signs[1] * signs[2] == 1:
                rows = [[0] * 3 for _ in range(3)]
                for i in range(3):
                    rows[i][perm[i]] = signs[i]
                mats.append(tuple(tuple(r) for r in rows))
    return mats


def build_pure_state_set(d: int) -> PureStateSet:
    """Weighted states with sum_q w_q |q><q| = 1 and sum_j amp_j^2 = 0.

    Even d: computational levels are paired, each 2-level block carrying
    (|r> + i|s>)/sqrt 2 and (|r> - i|s>)/sqrt 2 with weight 1.  Odd d:
    the same on all but the last three levels, which carry the 24-state
    orbit of (|r> + i|s>)/sqrt 2 under the cube rotation group (weight
    1/8, a Schur average over an irreducible real representation).
    """
    if d < 2:
        raise ValueError("need local dimension d >= 2")
    states = []
    pair_top = d if d % 2 == 0 else d - 3
    for r in range(0, pair_top, 2):
        for sign in (1, -1):
            vec = [CR0] * d
            vec[r] = CR1
            vec[r + 1] = CRat(0, sign)
            states.append(PureState(Fraction(1), tuple(vec), Fraction(2)))
    if d % 2:
        off = d - 3
        # orbit of (|off> + i|off+1>)/sqrt 2: column 0 + i * column 1 of each O
        for rot in cube_rotation_group():
            vec = [CR0] * d
            for i in range(3):
                vec[off + i] = CRat(rot[i][0], rot[i][1])
            states.append(PureState(Fraction(1, 8), tuple(vec), Fraction(2)))
    out = PureStateSet(d, tuple(states))
    _validate_state_set(out)
    return out


def _validate_state_set(s: PureStateSet):
    d = s.dim
    acc = mat([[0] * d for _ in range(d)])
    for st in s.states:
        if st.weight <= 0:
            raise AssertionError("state weights must be positive")
        if sum((x * x for x in st.vec), CR0):
            raise AssertionError("state fails self-transpose orthogonality")
        if sum((x * x.conjugate() for x in st.vec), CR0) != st.norm2:
            raise AssertionError("stored squared norm is wrong")
        acc = mat_add(acc, mat_scale(st.weight, st.projector()))
    if acc != mat_eye(d):
        raise AssertionError("states do not resolve the identity")


# ---------------------------------------------------------------------------
# isotropic / werner protocols

def _diag_response(d, i, x, y):
    """x |i><i| + y (1 - |i><i|) as an exact diagonal grid."""
    return tuple(tuple(cr(x if j == i else y) if j == kk else CR0
                       for kk in range(d)) for j in range(d))


def _basis_product_outcomes(d, xy):
    outcomes = []
    for x, y in xy:
        terms = tuple(ProductTerm(Fraction(1), ketbra(i, i, d), _diag_response(d, i, x, y))
                      for i in range(d))
        outcomes.append(terms)
    return tuple(outcomes)


def isotropic_protocol(target: SymPovm) -> LocalProtocol:
    """Computational-basis protocol with x_k = a_k, y_k = ((d+1)b_k - a_k)/d."""
    if target.kind.family is not Family.ISOTROPIC:
        raise ValueError("target must be an isotropic POVM")
    d = target.kind.dim
    xy = []
    for k, e in enumerate(target.elements):
        a, b = e.coeffs
        x = a
        y = ((d + 1) * b - a) / d
        if x < 0:
            raise InfeasibleTargetError(k, x, f"outcome {k}: negative coefficient {x}")
        if y < 0:
            raise InfeasibleTargetError(
                k, y, f"outcome {k}: (d+1)b >= a fails, response weight y = {y}")
        xy.append((x, y))
    return LocalProtocol(target.kind, _basis_product_outcomes(d, xy))


def werner_protocol(target: SymPovm) -> LocalProtocol:
    """Same product shape with x_k = ((1-d)a_k + (d+1)b_k)/2, y_k = a_k."""
    if target.kind.family is not Family.WERNER:
        raise ValueError("target must be a werner POVM")
    d = target.kind.dim
    xy = []
    for k, e in enumerate(target.elements):
        a, b = e.coeffs
        x = ((1 - d) * a + (d + 1) * b) / 2
        y = a
        if y < 0:
            raise InfeasibleTargetError(k, y, f"outcome {k}: negative coefficient {y}")
        if x < 0:
            raise InfeasibleTargetError(
                k, x, f"outcome {k}: b(d+1)/(d-1) >= a fails, response weight x = {x}")
        xy.append((x, y))
    return LocalProtocol(target.kind, _basis_product_outcomes(d, xy))


# ---------------------------------------------------------------------------
# bell protocols: product-basis projector sums

_HALF = Fraction(1, 2)


def _qubit_basis(name):
    """Orthonormal qubit projector pair for the z / x / y axes."""
    if name == "z":
        return ketbra(0, 0, 2), ketbra(1, 1, 2)
    if name == "x":
        p = mat([[_HALF, _HALF], [_HALF, _HALF]])
        m = mat([[_HALF, Fraction(-1, 2)], [Fraction(-1, 2), _HALF]])
        return p, m
    p = mat([[CRat(_HALF), CRat(0, Fraction(-1, 2))],
             [CRat(0, _HALF), CRat(_HALF)]])
    m = mat([[CRat(_HALF), CRat(0, _HALF)],
             [CRat(0, Fraction(-1, 2)), CRat(_HALF)]])
    return p, m


# which Bell pair a same/different product-basis measurement collects:
# key = frozenset of coefficient slots (psi+, psi-, phi+, phi-) equal to 1
_BELL_SPLITS = {
    frozenset({2, 3}): ("z", "same"),
    frozenset({0, 1}): ("z", "diff"),
    frozenset({0, 2}): ("x", "same"),
    frozenset({1, 3}): ("x", "diff"),
    frozenset({0, 3}): ("y", "same"),
    frozenset({1, 2}): ("y", "diff"),
}


def _bell_element_terms(coeffs):
    ones = Fraction(1)
    if not any(coeffs):
        return ()
    if all(c == ones for c in coeffs):
        return (ProductTerm(Fraction(1), mat_eye(2), mat_eye(2)),)
    support = frozenset(i for i, c in enumerate(coeffs) if c == ones)
    if support not in _BELL_SPLITS or any(c not in (0, 1) for c in coeffs):
        raise ValueError(f"element {coeffs} is not a two-outcome Bell catalog extremum")
    axis, mode = _BELL_SPLITS[support]
    p0, p1 = _qubit_basis(axis)
    if mode == "same":
        return (ProductTerm(Fraction(1), p0, p0), ProductTerm(Fraction(1), p1, p1))
    return (ProductTerm(Fraction(1), p0, p1), ProductTerm(Fraction(1), p1, p0))


def bell_protocol(extremum) -> LocalProtocol:
    """Product-basis protocol for a Bell catalog extremum.

    Accepts the extremal SymPovm itself or an index into the canonical
    classes of catalog_extrema(bell, 2).
    """
    from .extremal import catalog_extrema
    from .symmetry import kind as mk

    k = mk(Family.BELL, 2)
    if isinstance(extremum, int):
        classes = catalog_extrema(k, 2).canonical_classes()
        if not 0 <= extremum < len(classes):
            raise ValueError(f"unknown Bell extremum index {extremum}")
        extremum = classes[extremum][0]
    if extremum.kind != k:
        raise ValueError("bell_protocol needs a d=2 Bell POVM")
    outcomes = tuple(_bell_element_terms(e.coeffs) for e in extremum.elements)
    return LocalProtocol(k, outcomes)


# ---------------------------------------------------------------------------
# oo protocols

def _transpose_grid(g):
    n = len(g)
    return tuple(tuple(g[j][i] for j in range(n)) for i in range(n))


def _oo_sum_terms(states: PureStateSet, bob):
    """Terms sum_q w_q |q><q| (x) bob(|q><q|)."""
    out = []
    for st in states.states:
        proj = st.projector()
        out.append(ProductTerm(st.weight, proj, bob(proj)))
    return tuple(out)


def _oo_element_terms(coeffs, d, states: PureStateSet):
    """Product terms for one oo catalog element, keyed by its triple."""
    from .extremal import oo_three_outcome_elements, oo_two_outcome_elements

    named = oo_two_outcome_elements(d)
    m1, m2, m3 = oo_three_outcome_elements(d)
    ident = mat_eye(d)
    coeffs = tuple(coeffs)
    if coeffs == named["A1"]:
        return ()
    if coeffs == named["A2"]:
        return (ProductTerm(Fraction(1), ident, ident),)
    if coeffs == named["D1"]:
        return tuple(ProductTerm(Fraction(1), ketbra(i, i, d), ketbra(i, i, d))
                     for i in range(d))
    if coeffs == named["D2"]:
        return tuple(ProductTerm(Fraction(1), ketbra(i, i, d),
                                 mat_sub(ident, ketbra(i, i, d)))
                     for i in range(d))
    if coeffs == named["B1"]:
        return _oo_sum_terms(states, lambda p: p)
    if coeffs == named["B2"]:
        return _oo_sum_terms(states, lambda p: mat_sub(ident, p))
    if coeffs == named["C1"]:
        return _oo_sum_terms(states, _transpose_grid)
    if coeffs == named["C2"]:
        return _oo_sum_terms(states, lambda p: mat_sub(ident, _transpose_grid(p)))
    if coeffs == m2:
        return _oo_sum_terms(states,
                             lambda p: mat_sub(mat_sub(ident, p), _transpose_grid(p)))
    _ = (m1, m3)  # aliases of B1 / C1, matched above
    raise ValueError(f"element {coeffs} is not an oo catalog extremum")


def oo_protocol(vertex_id: str, d: int, states: PureStateSet | None = None) -> LocalProtocol:
    """Protocol for an oo extremum: 'A' | 'B' | 'C' | 'D' | 'triple'.

    Pair protocols produce (X1, X2) in catalog order; 'triple' produces
    the unique genuine 3-outcome extremal (M1, M2, M3).
    """
    from .extremal import oo_three_outcome_elements, oo_two_outcome_elements
    from .symmetry import kind as mk

    k = mk(Family.OO, d)
    if states is None and vertex_id in ("B", "C", "triple"):
        states = build_pure_state_set(d)
    if states is not None and states.dim != d:
        raise ValueError("pure state set has the wrong dimension")
    named = oo_two_outcome_elements(d)
    if vertex_id in ("A", "B", "C", "D"):
        cols = (named[vertex_id + "1"], named[vertex_id + "2"])
    elif vertex_id == "triple":
        cols = oo_three_outcome_elements(d)
    else:
        raise ValueError(f"unknown oo extremum id {vertex_id!r}")
    outcomes = tuple(_oo_element_terms(c, d, states) for c in cols)
    return LocalProtocol(k, outcomes)


# ---------------------------------------------------------------------------
# generic synthesis for any catalog vertex

def protocol_for_vertex(povm: SymPovm, states: PureStateSet | None = None) -> LocalProtocol:
    """Protocol matching an extremal catalog POVM outcome-for-outcome."""
    fam = povm.kind.family
    if fam is Family.ISOTROPIC:
        return isotropic_protocol(povm)
    if fam is Family.WERNER:
        return werner_protocol(povm)
    if fam is Family.BELL:
        return bell_protocol(povm)
    d = povm.kind.dim
    if states is None:
        states = build_pure_state_set(d)
    outcomes = tuple(_oo_element_terms(e.coeffs, d, states) for e in povm.elements)
    return LocalProtocol(povm.kind, outcomes)


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class ProtocolVerification:
    ok: bool
    outcomes_ok: tuple
    diffs: tuple        # per outcome: None or the coefficient difference tuple
    complete: bool
    factors_psd: bool

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "outcomes_ok": list(self.outcomes_ok),
                "diffs": [None if d is None else [str(c) for c in d]
                          for d in self.diffs],
                "complete": self.complete,
                "factors_psd": self.factors_psd}


def verify_protocol(protocol: LocalProtocol, target: SymPovm,
                    eps: float = 1e-9) -> ProtocolVerification:
    """Twirl each outcome and compare against the target, exactly.

    Also checks that the untwirled outcomes resolve the identity and that
    every factor is PSD with nonnegative weight.  Float-mode protocols are
    compared within eps instead.
    """
    if protocol.kind != target.kind:
        raise ValueError("protocol and target symmetry kinds differ")
    if len(protocol.outcomes) != target.n_outcomes:
        raise ValueError("protocol and target outcome counts differ")
    d = protocol.kind.dim
    exact = protocol.exact
    psd_ok = True
    for terms in protocol.outcomes:
        for t in terms:
            if t.weight < 0:
                psd_ok = False
            for g in (t.a_factor, t.b_factor):
                if isinstance(g, np.ndarray):
                    herm = np.max(np.abs(g - g.conj().T)) <= eps
                    psd_ok &= herm and np.min(np.linalg.eigvalsh(g)) >= -eps
                else:
                    psd_ok &= mat_is_hermitian(g) and psd_exact(g)
    outcomes_ok = []
    diffs = []
    if exact:
        total = BipartiteOperator.zeros(d)
        for k, e in enumerate(target.elements):
            op = protocol.outcome_operator(k)
            total = total + op
            got = twirl_coefficients(op, protocol.kind)
            diff = tuple(g - t for g, t in zip(got.coeffs, e.coeffs))
            ok = not any(diff)
            outcomes_ok.append(ok)
            diffs.append(None if ok else diff)
        complete = total == BipartiteOperator.identity(d)
    else:
        total = np.zeros((d * d, d * d), dtype=complex)
        for k, e in enumerate(target.elements):
            op = protocol.outcome_operator(k)
            total = total + op.entries
            got = twirl_coefficients_float(op.entries, protocol.kind)
            diff = tuple(g - float(t) for g, t in zip(got, e.coeffs))
            ok = all(abs(x) <= eps for x in diff)
            outcomes_ok.append(ok)
            diffs.append(None if ok else diff)
        complete = bool(np.max(np.abs(total - np.eye(d * d))) <= eps)
    ok = all(outcomes_ok) and complete and psd_ok
    return ProtocolVerification(ok, tuple(outcomes_ok), tuple(diffs), complete, psd_ok)
