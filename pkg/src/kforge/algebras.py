"""Finite modal algebras and the finite Tarski/Thomason duality functors.

Two representations share one type.  Concrete mode is the powerset algebra of
an atom index set: elements are subsets encoded as bitsets, and the diamond
is extended additively from a per-atom table, so join preservation holds by
construction.  Presented mode carries explicit operation tables over an
abstract element list and is verified exhaustively against the Boolean and
hemimorphism equations when built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import (BoundExceeded, NotAtomTarget, NotS4, ValidationError)
from .frames import Frame, PMorphism, bit_indices

MORPHISM_CHECK_BOUND = 1 << 12


@dataclass(frozen=True)
class ModalAlgebra:
    """Finite Boolean algebra with a finite-join-preserving diamond.

    mode "concrete": atom_count and diamond_on_atoms are set, elements are
    the ints 0..2^atom_count-1 read as atom bitsets.
    mode "presented": names and the join/neg/diamond tables are set,
    elements are the ints 0..len(names)-1.  The box operator is always
    derived, never stored.
    """

    mode: str
    atom_count: int = 0
    diamond_on_atoms: tuple[int, ...] = ()
    names: tuple[str, ...] = ()
    join_table: tuple[tuple[int, ...], ...] = ()
    neg_table: tuple[int, ...] = ()
    diamond_table: tuple[int, ...] = ()
    bot_element: int = 0

    @staticmethod
    def concrete(diamond_on_atoms) -> "ModalAlgebra":
        table = tuple(diamond_on_atoms)
        n = len(table)
        full = (1 << n) - 1
        for i, d in enumerate(table):
            if d & ~full:
                raise ValidationError(f"diamond of atom {i} out of range")
        return ModalAlgebra("concrete", atom_count=n, diamond_on_atoms=table)

    @staticmethod
    def presented(names, join, neg, diamond, bot) -> "ModalAlgebra":
        alg = ModalAlgebra(
            "presented",
            names=tuple(names),
            join_table=tuple(tuple(row) for row in join),
            neg_table=tuple(neg),
            diamond_table=tuple(diamond),
            bot_element=bot,
        )
        alg._check_presented()
        return alg

    # element interface -----------------------------------------------------

    @property
    def element_count(self) -> int:
        if self.mode == "concrete":
            return 1 << self.atom_count
        return len(self.names)

    def elements(self) -> range:
        return range(self.element_count)

    @property
    def bot(self) -> int:
        return 0 if self.mode == "concrete" else self.bot_element

    @property
    def top(self) -> int:
        if self.mode == "concrete":
            return (1 << self.atom_count) - 1
        return self.neg_table[self.bot_element]

    def join(self, a: int, b: int) -> int:
        if self.mode == "concrete":
            return a | b
        return self.join_table[a][b]

    def neg(self, a: int) -> int:
        if self.mode == "concrete":
            return ((1 << self.atom_count) - 1) ^ a
        return self.neg_table[a]

    def meet(self, a: int, b: int) -> int:
        if self.mode == "concrete":
            return a & b
        return self.neg(self.join(self.neg(a), self.neg(b)))

    def diamond(self, a: int) -> int:
        if self.mode == "concrete":
            out = 0
            while a:
                low = a & -a
                a ^= low
                out |= self.diamond_on_atoms[low.bit_length() - 1]
            return out
        return self.diamond_table[a]

    def box(self, a: int) -> int:
        return self.neg(self.diamond(self.neg(a)))

    def implies(self, a: int, b: int) -> int:
        return self.join(self.neg(a), b)

    def leq(self, a: int, b: int) -> bool:
        return self.join(a, b) == b

    def join_all(self, xs) -> int:
        out = self.bot
        for x in xs:
            out = self.join(out, x)
        return out

    def meet_all(self, xs) -> int:
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    # construction-time validation ------------------------------------------

    def _check_presented(self):
        k = len(self.names)
        if len(self.join_table) != k or any(len(r) != k for r in self.join_table):
            raise ValidationError("join table shape mismatch")
        if len(self.neg_table) != k or len(self.diamond_table) != k:
            raise ValidationError("neg/diamond table shape mismatch")
        if not 0 <= self.bot_element < k:
            raise ValidationError("bottom element out of range")
        es = range(k)
        j, n_, m = self.join, self.neg, self.meet
        bot, top = self.bot, self.top
        for a in es:
            if j(a, a) != a:
                raise ValidationError("join not idempotent")
            if j(a, bot) != a:
                raise ValidationError("bottom is not a join identity")
            if m(a, top) != a:
                raise ValidationError("top is not a meet identity")
            if j(a, n_(a)) != top or m(a, n_(a)) != bot:
                raise ValidationError("complement laws fail")
            if n_(n_(a)) != a:
                raise ValidationError("double negation fails")
            for b in es:
                if j(a, b) != j(b, a):
                    raise ValidationError("join not commutative")
                if j(a, m(a, b)) != a or m(a, j(a, b)) != a:
                    raise ValidationError("absorption fails")
                for c in es:
                    if j(a, j(b, c)) != j(j(a, b), c):
                        raise ValidationError("join not associative")
                    if m(a, j(b, c)) != j(m(a, b), m(a, c)):
                        raise ValidationError("distributivity fails")
        d = self.diamond
        if d(bot) != bot:
            raise ValidationError("diamond does not preserve bottom")
        for a in es:
            for b in es:
                if d(j(a, b)) != j(d(a), d(b)):
                    raise ValidationError("diamond does not preserve joins")


def atoms(algebra: ModalAlgebra) -> list[int]:
    """Minimal non-bottom elements, ascending by element id."""
    if algebra.mode == "concrete":
        return [1 << i for i in range(algebra.atom_count)]
    out = []
    bot = algebra.bot
    for a in algebra.elements():
        if a == bot:
            continue
        if all(b == bot or b == a or not algebra.leq(b, a)
               for b in algebra.elements()):
            out.append(a)
    return out


def powerset_algebra(frame: Frame) -> ModalAlgebra:
    """Concrete algebra on the frame's points; diamond of an atom is its
    predecessor set, so diamond(X) collects everything that sees X."""
    preds = [0] * frame.n
    for p in range(frame.n):
        bit = 1 << p
        succ = frame.rel[p]
        while succ:
            low = succ & -succ
            succ ^= low
            preds[low.bit_length() - 1] |= bit
    return ModalAlgebra.concrete(preds)


def atoms_frame(algebra: ModalAlgebra) -> Frame:
    """Frame on the atoms: a sees b iff a <= diamond(b)."""
    if algebra.mode == "concrete":
        # atoms are the singletons in index order; the relation is the
        # transpose of the per-atom diamond (predecessor) table
        n = algebra.atom_count
        rows = [0] * n
        for b in range(n):
            preds = algebra.diamond_on_atoms[b]
            while preds:
                low = preds & -preds
                preds ^= low
                rows[low.bit_length() - 1] |= 1 << b
        return Frame(tuple(rows))
    ats = atoms(algebra)
    rows = []
    for a in ats:
        row = 0
        for k, b in enumerate(ats):
            if algebra.leq(a, algebra.diamond(b)):
                row |= 1 << k
        rows.append(row)
    return Frame(tuple(rows))


@dataclass(frozen=True)
class AlgebraMorphism:
    """Total element map preserving the Boolean and diamond structure.

    Construction checks every unary law per element and every binary law per
    element pair, so it is restricted to desk-scale algebras.
    """

    dom: ModalAlgebra
    cod: ModalAlgebra
    mapping: tuple[int, ...]

    def __post_init__(self):
        k = self.dom.element_count
        if len(self.mapping) != k:
            raise ValidationError("morphism is not total")
        if k > MORPHISM_CHECK_BOUND:
            raise BoundExceeded(
                f"morphism validation over {k} elements exceeds "
                f"{MORPHISM_CHECK_BOUND}")
        mu = self.mapping
        dom, cod = self.dom, self.cod
        if mu[dom.bot] != cod.bot:
            raise ValidationError("bottom not preserved")
        if mu[dom.top] != cod.top:
            raise ValidationError("top not preserved")
        for a in dom.elements():
            if mu[dom.neg(a)] != cod.neg(mu[a]):
                raise ValidationError("negation not preserved")
            if mu[dom.diamond(a)] != cod.diamond(mu[a]):
                raise ValidationError("diamond not preserved")
            for b in dom.elements():
                if mu[dom.join(a, b)] != cod.join(mu[a], mu[b]):
                    raise ValidationError("join not preserved")
                if mu[dom.meet(a, b)] != cod.meet(mu[a], mu[b]):
                    raise ValidationError("meet not preserved")

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    def is_bijective(self) -> bool:
        return len(set(self.mapping)) == self.dom.element_count == \
            self.cod.element_count

    def then(self, other: "AlgebraMorphism") -> "AlgebraMorphism":
        if self.cod != other.dom:
            raise ValidationError("composition mismatch")
        return AlgebraMorphism(self.dom, other.cod,
                               tuple(other.mapping[x] for x in self.mapping))


def powerset_morphism(f: PMorphism) -> AlgebraMorphism:
    """Contravariant image of a p-morphism: inverse image on subsets."""
    dom_alg = powerset_algebra(f.cod)
    cod_alg = powerset_algebra(f.dom)
    mapping = []
    for subset in dom_alg.elements():
        pre = 0
        for p in range(f.dom.n):
            if subset >> f(p) & 1:
                pre |= 1 << p
        mapping.append(pre)
    return AlgebraMorphism(dom_alg, cod_alg, tuple(mapping))


def dual_morphism(mu: AlgebraMorphism) -> PMorphism:
    """Left adjoint restricted to atoms: atoms_frame(cod) -> atoms_frame(dom).

    The adjoint of an atom b is the meet of everything whose image lies
    above b; NotAtomTarget flags a corrupted morphism whose adjoint leaves
    the atoms.
    """
    dom, cod = mu.dom, mu.cod
    dom_atoms = atoms(dom)
    cod_atoms = atoms(cod)
    dom_index = {a: i for i, a in enumerate(dom_atoms)}
    mapping = []
    for b in cod_atoms:
        adj = dom.meet_all(a for a in dom.elements() if dom.leq(b, mu(a)))
        if adj not in dom_index:
            raise NotAtomTarget(
                f"adjoint of atom {b} is {adj}, not an atom")
        mapping.append(dom_index[adj])
    return PMorphism(atoms_frame(cod), atoms_frame(dom), tuple(mapping))


def eta(algebra: ModalAlgebra) -> AlgebraMorphism:
    """Send an element to the set of atoms below it, into the powerset
    algebra of the atoms frame; an isomorphism for every finite algebra."""
    ats = atoms(algebra)
    target = powerset_algebra(atoms_frame(algebra))
    mapping = []
    for b in algebra.elements():
        below = 0
        for k, a in enumerate(ats):
            if algebra.leq(a, b):
                below |= 1 << k
        mapping.append(below)
    return AlgebraMorphism(algebra, target, tuple(mapping))


def epsilon(frame: Frame) -> PMorphism:
    """Send a point to its singleton atom; an isomorphism for every finite
    frame."""
    dual = atoms_frame(powerset_algebra(frame))
    return PMorphism(frame, dual, tuple(range(frame.n)))


def check_s4(algebra: ModalAlgebra) -> bool:
    """Both interior-algebra equations over every element."""
    for x in algebra.elements():
        dx = algebra.diamond(x)
        if algebra.meet(x, dx) != x:
            return False
        if algebra.diamond(dx) != dx:
            return False
    return True


def check_grz(algebra: ModalAlgebra) -> bool:
    """The Grzegorczyk equation over every element of an S4 algebra."""
    if not check_s4(algebra):
        raise NotS4("Grz check requires an S4 algebra")
    top = algebra.top
    for x in algebra.elements():
        inner = algebra.box(algebra.implies(x, algebra.box(x)))
        outer = algebra.box(algebra.implies(inner, x))
        if algebra.implies(outer, x) != top:
            return False
    return True


def check_caba_distributivity(algebra: ModalAlgebra,
                              max_family: int = 2,
                              max_subset: int = 2,
                              element_bound: int = 256) -> bool:
    """Finite instances of the infinitary distributive law.

    Checks meet-of-joins against join-of-meets-of-choices for every family
    of at most max_family subsets, each of at most max_subset elements.
    """
    if algebra.element_count > element_bound:
        raise BoundExceeded(
            f"distributivity scan over {algebra.element_count} elements "
            f"exceeds {element_bound}")
    import itertools
    els = list(algebra.elements())
    subsets = []
    for size in range(max_subset + 1):
        subsets.extend(itertools.combinations(els, size))
    for fam_size in range(max_family + 1):
        for family in itertools.product(subsets, repeat=fam_size):
            lhs = algebra.meet_all(algebra.join_all(x) for x in family)
            rhs = algebra.bot
            for choice in itertools.product(*family):
                rhs = algebra.join(rhs, algebra.meet_all(choice))
            if not family:
                rhs = algebra.top  # empty meet over an empty product
            if lhs != rhs:
                return False
    return True


def presented_from_concrete(algebra: ModalAlgebra,
                            names: Optional[list[str]] = None) -> ModalAlgebra:
    """Re-encode a concrete algebra with explicit operation tables."""
    if algebra.mode != "concrete":
        raise ValidationError("expected a concrete algebra")
    k = algebra.element_count
    if names is None:
        names = [f"e{x}" for x in range(k)]
    join = [[a | b for b in range(k)] for a in range(k)]
    full = k - 1
    neg = [full ^ a for a in range(k)]
    diamond = [algebra.diamond(a) for a in range(k)]
    return ModalAlgebra.presented(names, join, neg, diamond, 0)
