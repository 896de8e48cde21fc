"""Sparse multivariate polynomials over the rationals.

A :class:`MultiPoly` carries an ordered tuple of variable names and a map from
exponent vectors to nonzero :class:`fractions.Fraction` coefficients.  Binary
operations between polynomials on different variable lists first extend both
to the union of the lists (left operand's order first), so ``x1 + y`` is fine.

Values are immutable once built; every operation returns a new polynomial.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]
Exponent = tuple[int, ...]


def _grlex_key(exp: Exponent) -> tuple[int, Exponent]:
    return (sum(exp), exp)


class MultiPoly:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Scalar] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != len(variables):
                raise ValueError(f"exponent {exp} does not match variables {variables}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = Fraction(c)
            if c:
                clean[exp] = c
        self.variables = variables
        self.terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponent, Fraction]) -> MultiPoly:
        # trusted path: terms already clean
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c: Scalar, variables: Sequence[str] = ()) -> MultiPoly:
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> MultiPoly:
        return cls(tuple(variables))

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> MultiPoly:
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            variables = variables + (name,)
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: 1})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> list[MultiPoly]:
        return [cls.var(v, variables) for v in variables]

    # structure

    def extend(self, variables: Sequence[str]) -> MultiPoly:
        """Re-express over ``variables``, which must contain every used variable."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {v: i for i, v in enumerate(variables)}
        used = self.used_variables()
        missing = [v for v in used if v not in index]
        if missing:
            raise ValueError(f"cannot drop variables {missing} that occur in the polynomial")
        pos = [index.get(v) for v in self.variables]
        nv = len(variables)
        terms: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            new = [0] * nv
            for p, e in zip(pos, exp):
                if e:
                    new[p] = e
            terms[tuple(new)] = c
        return MultiPoly._raw(variables, terms)

    def used_variables(self) -> tuple[str, ...]:
        used = [False] * len(self.variables)
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def drop_unused(self) -> MultiPoly:
        return self.extend(self.used_variables())

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.variables)
        return NotImplemented

    @staticmethod
    def _align(a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
        if a.variables == b.variables:
            return a, b
        union = a.variables + tuple(v for v in b.variables if v not in a.variables)
        return a.extend(union), b.extend(union)

    # predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def is_homogeneous(self) -> bool:
        degrees = {sum(exp) for exp in self.terms}
        return len(degrees) <= 1

    def __bool__(self) -> bool:
        return bool(self.terms)

    # degrees and parts

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(exp) for exp in self.terms), default=-1)

    def degree(self, var: str | None = None) -> int:
        if var is None:
            return self.total_degree()
        if var not in self.variables:
            return 0 if self.terms else -1
        i = self.variables.index(var)
        return max((exp[i] for exp in self.terms), default=-1)

    def homogeneous_part(self, deg: int) -> MultiPoly:
        return MultiPoly._raw(self.variables, {e: c for e, c in self.terms.items() if sum(e) == deg})

    def coefficients_in(self, var: str) -> dict[int, MultiPoly]:
        """Coefficients with respect to ``var`` (each still over the full variable list)."""
        i = self.variables.index(var)
        out: dict[int, dict[Exponent, Fraction]] = {}
        for exp, c in self.terms.items():
            k = exp[i]
            rest = exp[:i] + (0,) + exp[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: MultiPoly._raw(self.variables, t) for k, t in out.items()}

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    # arithmetic

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = MultiPoly._align(self, other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MultiPoly._raw(a.variables, terms)

    __radd__ = __add__

    def __sub__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> MultiPoly:
        return (-self) + other

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly._raw(self.variables, {})
            return MultiPoly._raw(self.variables, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly._align(self, other)
        terms: dict[Exponent, Fraction] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = terms.get(e, 0) + ca * cb
        return MultiPoly._raw(a.variables, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of polynomial by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, MultiPoly):
            return self.exact_div(other)
        return NotImplemented

    def __pow__(self, k: int) -> MultiPoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"power must be a nonnegative integer, got {k!r}")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, other: MultiPoly) -> MultiPoly:
        """Quotient of an exact division; raises ArithmeticError on a nonzero remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        a, b = MultiPoly._align(self, other)
        lead_exp, lead_c = b.leading_term()
        rest = dict(a.terms)
        quotient: dict[Exponent, Fraction] = {}
        bterms = list(b.terms.items())
        while rest:
            exp = max(rest, key=_grlex_key)
            c = rest[exp]
            shift = tuple(x - y for x, y in zip(exp, lead_exp))
            if any(s < 0 for s in shift):
                raise ArithmeticError("division is not exact")
            q = c / lead_c
            quotient[shift] = q
            for eb, cb in bterms:
                e = tuple(x + y for x, y in zip(eb, shift))
                v = rest.get(e, 0) - q * cb
                if v:
                    rest[e] = v
                else:
                    rest.pop(e, None)
        return MultiPoly._raw(a.variables, quotient)

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, MultiPoly]:
        c = self.content()
        return c, self * (1 / c)

    # calculus and evaluation

    def diff(self, var: str, order: int = 1) -> MultiPoly:
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if var not in self.variables:
            return MultiPoly._raw(self.variables, {}) if order else self
        i = self.variables.index(var)
        terms: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            e = exp[i]
            if e < order:
                continue
            factor = math.perm(e, order)
            new = exp[:i] + (e - order,) + exp[i + 1:]
            terms[new] = c * factor
        return MultiPoly._raw(self.variables, terms)

    def gradient(self, variables: Sequence[str] | None = None) -> list[MultiPoly]:
        return [self.diff(v) for v in (variables or self.variables)]

    def substitute(self, bindings: Mapping[str, MultiPoly | Scalar]) -> MultiPoly:
        """Compose: replace each bound variable by a polynomial or scalar.

        Unbound variables pass through unchanged.  The result lives over the
        unbound variables followed by any new variables of the bound values.
        """
        unknown = [v for v in bindings if v not in self.variables]
        if unknown:
            raise ValueError(f"cannot bind {unknown}: not variables of the polynomial")
        free = tuple(v for v in self.variables if v not in bindings)
        target = free
        for val in bindings.values():
            if isinstance(val, MultiPoly):
                target = target + tuple(v for v in val.variables if v not in target)
        values = {
            name: val.extend(target) if isinstance(val, MultiPoly) else MultiPoly.constant(val, target)
            for name, val in bindings.items()
        }
        power_cache: dict[tuple[str, int], MultiPoly] = {}

        def power(name: str, k: int) -> MultiPoly:
            key = (name, k)
            if key not in power_cache:
                power_cache[key] = values[name] ** k
            return power_cache[key]

        free_pos = [target.index(v) if v in target else None for v in self.variables]
        nt = len(target)
        grouped: dict[tuple[tuple[str, int], ...], dict[Exponent, Fraction]] = {}
        for exp, c in self.terms.items():
            mono = [0] * nt
            bound = []
            for var, p, e in zip(self.variables, free_pos, exp):
                if not e:
                    continue
                if var in values:
                    bound.append((var, e))
                else:
                    mono[p] += e
            grouped.setdefault(tuple(bound), {})[tuple(mono)] = c
        result = MultiPoly._raw(target, {})
        for bound, rest in grouped.items():
            factor = MultiPoly._raw(target, rest)
            for var, e in bound:
                factor = factor * power(var, e)
            result = result + factor
        return result

    def evaluate(self, values: Mapping[str, Scalar] | Sequence[Scalar]) -> Fraction:
        if not isinstance(values, Mapping):
            if len(values) != len(self.variables):
                raise ValueError("wrong number of values")
            values = dict(zip(self.variables, values))
        point = []
        for v in self.variables:
            if v in values:
                point.append(Fraction(values[v]))
            elif self.degree(v) > 0:
                raise ValueError(f"no value for variable {v}")
            else:
                point.append(Fraction(0))
        total = Fraction(0)
        for exp, c in self.terms.items():
            t = c
            for x, e in zip(point, exp):
                if e:
                    t *= x ** e
            total += t
        return total

    def homogenize(self, var: str) -> MultiPoly:
        d = self.total_degree()
        h = self.extend(self.variables + (var,)) if var not in self.variables else self
        i = h.variables.index(var)
        terms = {}
        for exp, c in h.terms.items():
            e = list(exp)
            e[i] += d - sum(exp)
            terms[tuple(e)] = c
        return MultiPoly._raw(h.variables, terms)

    # comparison and display

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.variables)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly._align(self, other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        if self._hash is None:
            p = self.drop_unused()
            order = sorted(p.variables)
            p = p.extend(order)
            self._hash = hash((tuple(order), frozenset(p.terms.items())))
        return self._hash

    def __str__(self) -> str:
        from .parsing import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables!r}, {str(self)!r})"


def poly_from_scalars(values: Iterable[Scalar], variables: Sequence[str] = ()) -> list[MultiPoly]:
    return [MultiPoly.constant(v, variables) for v in values]


def substitute_fraction(p: MultiPoly, var: str, num: MultiPoly, den: MultiPoly, power: int) -> MultiPoly:
    """``den**power * p(var = num/den)`` as a polynomial.

    ``power`` must be at least the degree of ``p`` in ``var``; this is how a
    rational substitution is cleared of denominators without rational functions.
    """
    if var not in p.variables:
        return p * den ** power
    coeffs = p.coefficients_in(var)
    top = max(coeffs)
    if power < top:
        raise ValueError(f"power {power} below degree {top} in {var}")
    result = MultiPoly.zero(p.variables)
    for k, c in coeffs.items():
        result = result + c * num ** k * den ** (power - k)
    if var not in result.used_variables():
        result = result.extend(tuple(v for v in result.variables if v != var))
    return result
