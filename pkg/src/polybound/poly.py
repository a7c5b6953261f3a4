"""Exact convex polyhedra over integer-identified variables.

A polyhedron is kept in double description: a constraint system and a
generator system (points, rays, lines) of its homogenized cone.  Vectors are
tuples of Python ints laid out as ``(xi, x_d1, ..., x_dn)`` where ``xi`` is
the homogenizing coordinate and ``d1 < ... < dn`` are the polyhedron's
dimension variables.  A constraint row ``a`` means ``a . (1, x) >= 0`` (or
``== 0``); a generator with ``xi > 0`` is the point ``x / xi``.

Variables that do not occur in a polyhedron are unconstrained, so the empty
constraint system is top.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd
from operator import mul
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

__all__ = [
    "LinExpr",
    "LinearConstraint",
    "Polyhedron",
    "UNBOUNDED",
    "var",
    "intersect",
    "hull",
    "includes",
    "is_empty",
    "project",
    "maximize",
    "minimize",
    "widen",
    "rename",
]

UNBOUNDED = math.inf

Vec = Tuple[int, ...]


# --------------------------------------------------------------------------
# linear expressions and constraints


class LinExpr:
    """Affine expression ``sum(c * x) + const`` with rational coefficients."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Optional[Mapping[int, object]] = None, const=0):
        self.terms: Dict[int, Fraction] = {}
        for v, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[v] = c
        self.const = Fraction(const)

    @staticmethod
    def _lift(other) -> "LinExpr":
        if isinstance(other, LinExpr):
            return other
        return LinExpr({}, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms.get(v, 0) + c
        return LinExpr(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({v: -c for v, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, k):
        if isinstance(k, LinExpr):
            raise TypeError("non-linear product")
        k = Fraction(k)
        return LinExpr({v: c * k for v, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def __le__(self, other) -> "LinearConstraint":
        return LinearConstraint.make(self - other, "le")

    def __ge__(self, other) -> "LinearConstraint":
        return LinearConstraint.make(self._lift(other) - self, "le")

    def eq(self, other) -> "LinearConstraint":
        return LinearConstraint.make(self - other, "eq")

    def __repr__(self):
        return f"LinExpr({self.terms!r}, {self.const!r})"


def var(v: int) -> LinExpr:
    return LinExpr({v: 1})


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class LinearConstraint:
    """``sum(terms) <= constant`` or ``sum(terms) == constant``.

    Coefficients are integers with unit content; equalities have a positive
    coefficient on their smallest variable.  Instances are hashable values.
    """

    __slots__ = ("terms", "relation", "constant")

    def __init__(self, terms: Iterable[Tuple[int, int]], relation: str, constant: int):
        if relation not in ("le", "eq"):
            raise ValueError(f"bad relation {relation!r}")
        self.terms: Tuple[Tuple[int, int], ...] = tuple(sorted((v, c) for v, c in terms if c))
        self.relation = relation
        self.constant = constant

    @classmethod
    def make(cls, expr: LinExpr, relation: str) -> "LinearConstraint":
        """Build ``expr <= 0`` (or ``== 0``), normalized to integers."""
        den = 1
        for c in list(expr.terms.values()) + [expr.const]:
            den = _lcm(den, c.denominator)
        terms = [(v, int(c * den)) for v, c in expr.terms.items()]
        const = int(-expr.const * den)
        g = gcd(const, *(c for _, c in terms)) if terms else abs(const)
        if g > 1:
            terms = [(v, c // g) for v, c in terms]
            const //= g
        if relation == "eq" and terms:
            terms.sort()
            if terms[0][1] < 0:
                terms = [(v, -c) for v, c in terms]
                const = -const
        return cls(terms, relation, const)

    @property
    def vars(self) -> frozenset:
        return frozenset(v for v, _ in self.terms)

    def is_trivial(self) -> bool:
        """True for constant constraints that always hold."""
        if self.terms:
            return False
        return self.constant == 0 if self.relation == "eq" else self.constant >= 0

    def satisfied_by(self, point: Mapping[int, object]) -> bool:
        lhs = sum(Fraction(point[v]) * c for v, c in self.terms)
        return lhs == self.constant if self.relation == "eq" else lhs <= self.constant

    def __eq__(self, other):
        return (isinstance(other, LinearConstraint)
                and (self.terms, self.relation, self.constant)
                == (other.terms, other.relation, other.constant))

    def __hash__(self):
        return hash((self.terms, self.relation, self.constant))

    def __str__(self):
        lhs = " + ".join(f"{c}*x{v}" for v, c in self.terms) or "0"
        op = "<=" if self.relation == "le" else "="
        return f"{lhs} {op} {self.constant}"

    __repr__ = __str__


# --------------------------------------------------------------------------
# vector helpers


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(map(mul, a, b))


def _reduce(v) -> Vec:
    g = gcd(*v)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def _reduce_line(v) -> Vec:
    v = _reduce(v)
    for x in v:
        if x:
            if x < 0:
                return tuple(-y for y in v)
            break
    return v


def _unit(n: int, i: int) -> Vec:
    return tuple(1 if j == i else 0 for j in range(n))


def _double_description(n, lines, rays, known, eqs, ineqs):
    """Add rows to the cone ``lin(lines) + cone(rays)``.

    ``rays`` must be a minimal ray system of the cone defined by the
    inequality rows ``known`` (plus whatever equalities the lines encode).
    Returns minimal ``(lines, rays)`` of the cone cut by ``eqs`` (== 0) and
    ``ineqs`` (>= 0).  Adjacency uses the combinatorial saturation test.
    """
    lines = list(lines)
    rays = list(rays)
    masks = []
    for r in rays:
        m = 0
        for i, a in enumerate(known):
            if not _dot(a, r):
                m |= 1 << i
        masks.append(m)
    nbits = len(known)

    rows = [(a, True) for a in eqs] + [(a, False) for a in ineqs]
    for a, is_eq in rows:
        k = -1
        s = 0
        for i, l in enumerate(lines):
            s = _dot(a, l)
            if s:
                k = i
                break
        if k >= 0:
            l = lines.pop(k)
            if s < 0:
                l = tuple(-x for x in l)
                s = -s
            new_lines = []
            for l2 in lines:
                t = _dot(a, l2)
                if t:
                    l2 = _reduce_line([s * x - t * y for x, y in zip(l2, l)])
                new_lines.append(l2)
            lines = new_lines
            new_rays = []
            for r in rays:
                t = _dot(a, r)
                if t:
                    r = _reduce([s * x - t * y for x, y in zip(r, l)])
                new_rays.append(r)
            rays = new_rays
            if not is_eq:
                bit = 1 << nbits
                nbits += 1
                masks = [m | bit for m in masks]
                rays.append(_reduce(l))
                masks.append(bit - 1)
            continue

        vals = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        bit = 0
        if not is_eq:
            bit = 1 << nbits
            nbits += 1
            if not neg:
                masks = [m | bit if not v else m for m, v in zip(masks, vals)]
                continue
        elif not pos and not neg:
            continue
        new_rays = []
        new_masks = []
        for r, m, v in zip(rays, masks, vals):
            if not v:
                new_rays.append(r)
                new_masks.append(m | bit)
            elif v > 0 and not is_eq:
                new_rays.append(r)
                new_masks.append(m)
        nr = len(rays)
        for ip in pos:
            mp = masks[ip]
            rp = rays[ip]
            vp = vals[ip]
            for ineg in neg:
                common = mp & masks[ineg]
                adjacent = True
                for j in range(nr):
                    if j != ip and j != ineg and masks[j] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vn = -vals[ineg]
                new_rays.append(_reduce([vp * x + vn * y for x, y in zip(rays[ineg], rp)]))
                new_masks.append(common | bit)
        rays = new_rays
        masks = new_masks
    return lines, rays


def _positivity(n: int) -> Vec:
    return _unit(n, 0)


def _gens_from_cons(n, eqs, ineqs):
    lines = [_unit(n, i) for i in range(n)]
    return _double_description(n, lines, [], [], eqs, [_positivity(n)] + list(ineqs))


def _cons_from_gens(n, lines, rays):
    """Minimal constraint rows of the cone generated by ``lines`` and ``rays``."""
    units = [_unit(n, i) for i in range(n)]
    eqs, ineqs = _double_description(n, units, [], [], lines, rays)
    ineqs = [a for a in ineqs if any(a[1:])]
    return _canonical(n, eqs, ineqs)


def _canonical(n, eqs, ineqs):
    """Reduced echelon equalities (pivots on the newest variables) and
    inequalities reduced modulo them; both lists sorted."""
    rows = [list(map(Fraction, e)) for e in eqs]
    pivots = []
    r = 0
    for col in range(n - 1, 0, -1):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[col]
        rows[r] = pr = [x * inv for x in pr]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        pivots.append(col)
        r += 1
    rows = rows[:r]
    out_eqs = []
    for row in rows:
        den = 1
        for x in row:
            den = _lcm(den, x.denominator)
        out_eqs.append(_reduce([int(x * den) for x in row]))
    out_ineqs = set()
    for a in ineqs:
        a = list(map(Fraction, a))
        for row, col in zip(rows, pivots):
            if a[col]:
                f = a[col]
                a = [x - f * y for x, y in zip(a, row)]
        den = 1
        for x in a:
            den = _lcm(den, x.denominator)
        out_ineqs.add(_reduce([int(x * den) for x in a]))
    return sorted(out_eqs), sorted(out_ineqs)


def _embed(vec: Vec, src: Tuple[int, ...], dst: Tuple[int, ...]) -> Vec:
    if src == dst:
        return vec
    pos = {d: i + 1 for i, d in enumerate(src)}
    return (vec[0],) + tuple(vec[pos[d]] if d in pos else 0 for d in dst)


# --------------------------------------------------------------------------
# polyhedra


def _rows(constraints: Iterable[LinearConstraint]):
    """Dimension tuple plus equality and inequality rows for ``constraints``."""
    constraints = list(constraints)
    dims = sorted({v for c in constraints for v in c.vars})
    pos = {d: i + 1 for i, d in enumerate(dims)}
    n = len(dims) + 1
    eqs, ineqs = [], []
    for c in constraints:
        row = [0] * n
        if c.relation == "eq":
            row[0] = -c.constant
            for v, k in c.terms:
                row[pos[v]] = k
            eqs.append(tuple(row))
        else:
            row[0] = c.constant
            for v, k in c.terms:
                row[pos[v]] = -k
            ineqs.append(tuple(row))
    return tuple(dims), eqs, ineqs


class Polyhedron:
    """Immutable convex polyhedron with exact rational semantics.

    Build one from constraints (``Polyhedron([x <= 5, x >= 3])``) or with
    :meth:`top` / :meth:`bottom`.  All operations return new values.
    """

    __slots__ = ("_dims", "_eqs", "_ineqs", "_cmin", "_lines", "_rays", "_gmin", "_empty")

    def __init__(self, constraints: Iterable[LinearConstraint] = ()):
        dims, eqs, ineqs = _rows(constraints)
        self._set(dims, eqs, ineqs, False, None, None, False)
        self._check_empty()

    @classmethod
    def _lazy(cls, constraints: Iterable[LinearConstraint]) -> "Polyhedron":
        """Constraint-only polyhedron whose generators are never needed."""
        return cls._raw(*_rows(constraints))

    def _set(self, dims, eqs, ineqs, cmin, lines, rays, gmin):
        self._dims = dims
        self._eqs = eqs
        self._ineqs = ineqs
        self._cmin = cmin
        self._lines = lines
        self._rays = rays
        self._gmin = gmin
        self._empty = False

    @classmethod
    def _raw(cls, dims, eqs, ineqs, cmin=False, lines=None, rays=None, gmin=False):
        p = cls.__new__(cls)
        p._set(dims, eqs, ineqs, cmin, lines, rays, gmin)
        return p

    @classmethod
    def top(cls) -> "Polyhedron":
        return cls._raw((), [], [], True, [], [(1,)], True)

    @classmethod
    def bottom(cls) -> "Polyhedron":
        return _BOTTOM

    @classmethod
    def _from_gens(cls, dims, lines, rays) -> "Polyhedron":
        if not any(r[0] > 0 for r in rays):
            return _BOTTOM
        n = len(dims) + 1
        eqs, ineqs = _cons_from_gens(n, lines, rays)
        return cls._raw(dims, eqs, ineqs, True, lines, rays, False)

    @classmethod
    def from_points(cls, points: Iterable[Mapping[int, object]],
                    rays: Iterable[Mapping[int, object]] = (),
                    lines: Iterable[Mapping[int, object]] = ()) -> "Polyhedron":
        """Convex hull of rational points plus a cone of rays and lines."""
        points, rays, lines = list(points), list(rays), list(lines)
        dims = tuple(sorted({v for g in points + rays + lines for v in g}))
        pos = {d: i + 1 for i, d in enumerate(dims)}
        n = len(dims) + 1

        def vec(g, xi_one):
            vals = {v: Fraction(x) for v, x in g.items()}
            den = 1
            for x in vals.values():
                den = _lcm(den, x.denominator)
            row = [0] * n
            row[0] = den if xi_one else 0
            for v, x in vals.items():
                row[pos[v]] = int(x * den)
            return tuple(row)

        gl = [_reduce_line(vec(g, False)) for g in lines]
        gr = [_reduce(vec(g, True)) for g in points] + [_reduce(vec(g, False)) for g in rays]
        gl = [l for l in gl if any(l)]
        gr = [r for r in gr if any(r)]
        return cls._from_gens(dims, gl, gr)

    # -- representation maintenance

    def _check_empty(self):
        if self._lines is None:
            self._gens()

    def _gens(self):
        if self._empty:
            return [], []
        if self._lines is None:
            n = len(self._dims) + 1
            lines, rays = _gens_from_cons(n, self._eqs, self._ineqs)
            if not any(r[0] > 0 for r in rays):
                self._become_empty()
                return [], []
            self._lines, self._rays, self._gmin = lines, rays, True
        return self._lines, self._rays

    def _min_gens(self):
        if self._empty:
            return [], []
        if not self._gmin:
            self._lines = None
        return self._gens()

    def _become_empty(self):
        self._set((), [], [], True, [], [], True)
        self._empty = True

    def _minimize(self):
        if self._empty or self._cmin:
            return
        lines, rays = self._gens()
        if self._empty:
            return
        n = len(self._dims) + 1
        self._eqs, self._ineqs = _cons_from_gens(n, lines, rays)
        self._cmin = True

    def _rows_over(self, dims):
        return ([_embed(e, self._dims, dims) for e in self._eqs],
                [_embed(a, self._dims, dims) for a in self._ineqs])

    def _gens_over(self, dims, minimal=False):
        lines, rays = self._min_gens() if minimal else self._gens()
        if dims == self._dims:
            return list(lines), list(rays)
        n = len(dims)
        lines = [_embed(l, self._dims, dims) for l in lines]
        rays = [_embed(r, self._dims, dims) for r in rays]
        have = set(self._dims)
        lines += [_unit(n + 1, i + 1) for i, d in enumerate(dims) if d not in have]
        return lines, rays

    # -- queries

    def is_empty(self) -> bool:
        self._check_empty()
        return self._empty

    def is_top(self) -> bool:
        if self._empty:
            return False
        self._minimize()
        return not self._eqs and not self._ineqs

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._dims

    @property
    def vars(self) -> frozenset:
        """Variables with a nonzero coefficient in the minimized constraints."""
        self._minimize()
        out = set()
        for row in self._eqs + self._ineqs:
            out.update(d for d, c in zip(self._dims, row[1:]) if c)
        return frozenset(out)

    @property
    def constraints(self) -> Tuple[LinearConstraint, ...]:
        """Minimized constraint system (empty tuple for top)."""
        if self.is_empty():
            return (LinearConstraint((), "le", -1),)
        self._minimize()
        out = []
        for e in self._eqs:
            out.append(LinearConstraint(zip(self._dims, e[1:]), "eq", -e[0]))
        for a in self._ineqs:
            out.append(LinearConstraint([(d, -c) for d, c in zip(self._dims, a[1:])], "le", a[0]))
        return tuple(out)

    def generators(self):
        """Return ``(points, rays, lines)`` as lists of ``{var: Fraction}``."""
        lines, rays = self._gens()
        points, rs, ls = [], [], []
        for r in rays:
            if r[0] > 0:
                points.append({d: Fraction(x, r[0]) for d, x in zip(self._dims, r[1:])})
            else:
                rs.append({d: Fraction(x) for d, x in zip(self._dims, r[1:])})
        for l in lines:
            ls.append({d: Fraction(x) for d, x in zip(self._dims, l[1:])})
        return points, rs, ls

    def entails(self, c: LinearConstraint) -> bool:
        """Every point of the polyhedron satisfies ``c``."""
        if self.is_empty():
            return True
        if any(v not in self._dims for v in c.vars):
            return c.is_trivial()
        pos = {d: i + 1 for i, d in enumerate(self._dims)}
        row = [0] * (len(self._dims) + 1)
        if c.relation == "eq":
            row[0] = -c.constant
            for v, k in c.terms:
                row[pos[v]] = k
        else:
            row[0] = c.constant
            for v, k in c.terms:
                row[pos[v]] = -k
        lines, rays = self._gens()
        if any(_dot(row, l) for l in lines):
            return False
        if c.relation == "eq":
            return not any(_dot(row, r) for r in rays)
        return all(_dot(row, r) >= 0 for r in rays)

    def contains_point(self, point: Mapping[int, object]) -> bool:
        """Membership of a point; variables missing from ``point`` are
        existentially quantified."""
        if self.is_empty():
            return False
        fixed = [var(v).eq(x) for v, x in point.items()]
        return not self.intersect(Polyhedron(fixed)).is_empty()

    # -- lattice operations

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if self.is_empty() or other.is_empty():
            return _BOTTOM
        dims = tuple(sorted(set(self._dims) | set(other._dims)))
        n = len(dims) + 1
        e1, i1 = self._rows_over(dims)
        e2, i2 = other._rows_over(dims)
        if self._gmin or not other._gmin:
            base, extra_e, extra_i = self, e2, i2
            known = [_positivity(n)] + i1
        else:
            base, extra_e, extra_i = other, e1, i1
            known = [_positivity(n)] + i2
        if base._gmin:
            lines, rays = base._gens_over(dims, minimal=True)
            lines, rays = _double_description(n, lines, rays, known, extra_e, extra_i)
        else:
            lines, rays = _gens_from_cons(n, e1 + e2, i1 + i2)
        if not any(r[0] > 0 for r in rays):
            return _BOTTOM
        eqs, ineqs = _cons_from_gens(n, lines, rays)
        return Polyhedron._raw(dims, eqs, ineqs, True, lines, rays, True)

    def add_constraints(self, constraints: Iterable[LinearConstraint]) -> "Polyhedron":
        """Intersection with ``constraints``, cutting this generator system."""
        constraints = list(constraints)
        if any(not c.vars and not c.is_trivial() for c in constraints):
            return _BOTTOM
        constraints = [c for c in constraints if c.vars]
        if not constraints:
            return self
        if self.is_empty():
            return _BOTTOM
        lines, rays = self._min_gens()
        if self._empty:
            return _BOTTOM
        other = Polyhedron._lazy(constraints)
        dims = tuple(sorted(set(self._dims) | set(other._dims)))
        n = len(dims) + 1
        _, i1 = self._rows_over(dims)
        e2, i2 = other._rows_over(dims)
        lines, rays = self._gens_over(dims, minimal=True)
        lines, rays = _double_description(n, lines, rays, [_positivity(n)] + i1, e2, i2)
        if not any(r[0] > 0 for r in rays):
            return _BOTTOM
        eqs, ineqs = _cons_from_gens(n, lines, rays)
        return Polyhedron._raw(dims, eqs, ineqs, True, lines, rays, True)

    def hull(self, other: "Polyhedron") -> "Polyhedron":
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        dims = tuple(sorted(set(self._dims) | set(other._dims)))
        l1, r1 = self._gens_over(dims)
        l2, r2 = other._gens_over(dims)
        return Polyhedron._from_gens(dims, l1 + l2, r1 + r2)

    def includes(self, other: "Polyhedron") -> bool:
        """``other`` is a subset of ``self``."""
        if other.is_empty():
            return True
        if self.is_empty():
            return False
        dims = tuple(sorted(set(self._dims) | set(other._dims)))
        eqs, ineqs = self._rows_over(dims)
        lines, rays = other._gens_over(dims)
        for a in eqs:
            if any(_dot(a, g) for g in lines) or any(_dot(a, g) for g in rays):
                return False
        for a in ineqs:
            if any(_dot(a, g) for g in lines) or any(_dot(a, g) < 0 for g in rays):
                return False
        return True

    def same_as(self, other: "Polyhedron") -> bool:
        return self.includes(other) and other.includes(self)

    def project(self, keep: Iterable[int]) -> "Polyhedron":
        """Exact shadow on the variables in ``keep``."""
        if self.is_empty():
            return _BOTTOM
        keep = set(keep)
        idx = [0] + [i + 1 for i, d in enumerate(self._dims) if d in keep]
        if len(idx) == len(self._dims) + 1:
            return self
        dims = tuple(d for d in self._dims if d in keep)
        dropped = [i + 1 for i, d in enumerate(self._dims) if d not in keep]
        # fast path: dropped dims absent from every constraint
        eqs, ineqs = self._eqs, self._ineqs
        if all(not row[i] for row in eqs + ineqs for i in dropped):
            pick = lambda v: tuple(v[i] for i in idx)
            lines, rays = self._gens()
            new_lines = [l for l in (pick(l) for l in lines) if any(l)]
            gmin = self._gmin and len(new_lines) == len(lines) - len(dropped)
            return Polyhedron._raw(dims, [pick(e) for e in eqs], [pick(a) for a in ineqs],
                                   self._cmin, new_lines, [pick(r) for r in rays], gmin)
        lines, rays = self._gens()
        lines = [_reduce_line([l[i] for i in idx]) for l in lines]
        rays = [_reduce([r[i] for i in idx]) for r in rays]
        return Polyhedron._from_gens(dims, [l for l in lines if any(l)], [r for r in rays if any(r)])

    def maximize(self, expr):
        """Supremum of ``expr`` (a var id or :class:`LinExpr`).

        Returns a ``Fraction``, :data:`UNBOUNDED`, or ``None`` when empty.
        """
        if isinstance(expr, int):
            expr = var(expr)
        if self.is_empty():
            return None
        if any(v not in self._dims for v in expr.terms):
            return UNBOUNDED
        pos = {d: i + 1 for i, d in enumerate(self._dims)}
        den = 1
        for c in expr.terms.values():
            den = _lcm(den, c.denominator)
        coef = [0] * (len(self._dims) + 1)
        for v, c in expr.terms.items():
            coef[pos[v]] = int(c * den)
        lines, rays = self._gens()
        if any(_dot(coef, l) for l in lines):
            return UNBOUNDED
        best = None
        for r in rays:
            val = _dot(coef, r)
            if r[0] == 0:
                if val > 0:
                    return UNBOUNDED
                continue
            q = Fraction(val, r[0])
            if best is None or q > best:
                best = q
        return best / den + expr.const

    def minimize(self, expr):
        if isinstance(expr, int):
            expr = var(expr)
        m = self.maximize(-expr)
        if m is None:
            return None
        return -m

    def widen(self, other: "Polyhedron", guard: Optional[Iterable[int]] = None) -> "Polyhedron":
        """Standard widening of ``self`` (previous) by ``other`` (current).

        Keeps the constraints of ``self`` satisfied by ``other`` and the
        constraints of ``other`` that can stand in for one of them.  When
        ``other`` does not contain ``self`` the hull is used instead.

        With ``guard``, every octagonal constraint (``+-x`` or ``+-x +-y``
        over guard variables) whose bound is the same in both operands is
        retained as well.  Such bounds are often only implied by constraints
        the standard operator drops, so this is a bounded-use refinement:
        callers must fall back to the plain operator after finitely many
        guarded steps to keep the termination guarantee.
        """
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        if not other.includes(self):
            other = self.hull(other)
        if self.includes(other):
            return self
        result = self._h79(other)
        if guard is None:
            return result
        guard = sorted(set(guard) & set(self._dims))
        b1 = self._octagon(guard)
        b2 = other._octagon(guard)
        stable = [LinExpr(dict(t)) <= c for t, c in b1.items()
                  if c is not None and b2.get(t) == c]
        if not stable:
            return result
        stable = [c for c in stable if not result.entails(c)]
        return result.add_constraints(stable) if stable else result

    def _octagon(self, vs: Sequence[int]) -> Dict[tuple, Optional[Fraction]]:
        """Upper bounds of the octagonal templates over ``vs`` (None: unbounded)."""
        pos = {d: i + 1 for i, d in enumerate(self._dims)}
        lines, rays = self._gens()
        idx = [pos[v] for v in vs]
        temps = []
        for a in range(len(vs)):
            for sa in (1, -1):
                temps.append((((vs[a], sa),), ((idx[a], sa),)))
                for b in range(a + 1, len(vs)):
                    for sb in (1, -1):
                        temps.append((((vs[a], sa), (vs[b], sb)), ((idx[a], sa), (idx[b], sb))))
        out = {}
        for key, coefs in temps:
            val = lambda g: sum(k * g[i] for i, k in coefs)
            if any(val(l) for l in lines):
                out[key] = None
                continue
            best = None
            for r in rays:
                x = val(r)
                if r[0] == 0:
                    if x > 0:
                        best = None
                        break
                    continue
                q = Fraction(x, r[0])
                if best is None or q > best:
                    best = q
            else:
                out[key] = best
                continue
            out[key] = None
        return out

    def _h79(self, other: "Polyhedron") -> "Polyhedron":
        dims = tuple(sorted(set(self._dims) | set(other._dims)))
        n = len(dims) + 1
        self._minimize()
        other._minimize()
        e1, i1 = self._rows_over(dims)
        e2, i2 = other._rows_over(dims)
        c1 = i1 + e1 + [tuple(-x for x in e) for e in e1]
        c2 = i2 + e2 + [tuple(-x for x in e) for e in e2]
        ol, orays = other._gens_over(dims)
        kept = [a for a in c1
                if not any(_dot(a, l) for l in ol) and all(_dot(a, r) >= 0 for r in orays)]
        kept_set = set(kept)
        sl, srays = self._gens_over(dims)

        def sat(a):
            return frozenset(i for i, r in enumerate(srays) if not _dot(a, r))

        c1_sat = [sat(b) for b in c1]
        for g in c2:
            if g in kept_set:
                continue
            sg = sat(g)
            for j, b in enumerate(c1):
                if c1_sat[j] != sg:
                    continue
                trial = c1[:j] + c1[j + 1:] + [g]
                tl, tr = _gens_from_cons(n, [], trial)
                if not any(_dot(b, l) for l in tl) and all(_dot(b, r) >= 0 for r in tr):
                    kept.append(g)
                    kept_set.add(g)
                    break
        lines, rays = _gens_from_cons(n, [], kept)
        eqs, ineqs = _cons_from_gens(n, lines, rays)
        return Polyhedron._raw(dims, eqs, ineqs, True, lines, rays, True)

    def rename(self, subst: Mapping[int, int]) -> "Polyhedron":
        """Simultaneous variable renaming.

        Raises ``ValueError`` if a target already occurs in the polyhedron
        and is not itself renamed away, or if two variables map to one.
        """
        if self.is_empty():
            return _BOTTOM
        subst = {a: b for a, b in subst.items() if a in self._dims and a != b}
        if not subst:
            return self
        targets = list(subst.values())
        if len(set(targets)) != len(targets):
            raise ValueError("rename is not injective")
        live = set(self._dims) - set(subst)
        clash = live & set(targets)
        if clash:
            occurring = self.vars
            bad = clash & occurring
            if bad:
                raise ValueError(f"rename target(s) already in use: {sorted(bad)}")
            return self.project(set(self._dims) - clash).rename(subst)
        new_names = [subst.get(d, d) for d in self._dims]
        order = sorted(range(len(new_names)), key=lambda i: new_names[i])
        dims = tuple(new_names[i] for i in order)
        idx = [0] + [i + 1 for i in order]
        perm = lambda v: tuple(v[i] for i in idx)
        lines = rays = None
        if self._lines is not None:
            lines = [perm(l) for l in self._lines]
            rays = [perm(r) for r in self._rays]
        eqs = [perm(e) for e in self._eqs]
        ineqs = [perm(a) for a in self._ineqs]
        if self._cmin:
            eqs, ineqs = _canonical(len(dims) + 1, eqs, ineqs)
        return Polyhedron._raw(dims, eqs, ineqs, self._cmin, lines, rays, self._gmin)

    # -- misc

    def __str__(self):
        if self.is_empty():
            return "false"
        cons = self.constraints
        if not cons:
            return "true"
        return "\n".join(str(c) for c in cons)

    def __repr__(self):
        if self.is_empty():
            return "Polyhedron(bottom)"
        return "Polyhedron([" + ", ".join(str(c) for c in self.constraints) + "])"


_BOTTOM = Polyhedron.__new__(Polyhedron)
_BOTTOM._become_empty()


# module-level spellings of the lattice operations

def intersect(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return p.intersect(q)


def hull(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return p.hull(q)


def includes(p: Polyhedron, q: Polyhedron) -> bool:
    return p.includes(q)


def is_empty(p: Polyhedron) -> bool:
    return p.is_empty()


def project(p: Polyhedron, keep: Iterable[int]) -> Polyhedron:
    return p.project(keep)


def maximize(p: Polyhedron, expr):
    return p.maximize(expr)


def minimize(p: Polyhedron, expr):
    return p.minimize(expr)


def widen(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return p.widen(q)


def rename(p: Polyhedron, subst: Mapping[int, int]) -> Polyhedron:
    return p.rename(subst)
