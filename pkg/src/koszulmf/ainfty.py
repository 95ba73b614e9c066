"""Finite A-infinity algebras: checker, opposite, smash, dimension counts.

Operations are written mu^k(y_k, ..., y_1); tables are keyed by
(output label, input tuple in textual order), so key[1][0] is y_k.  The
Stasheff identity checked here is

    sum_{a,b} (-1)^star mu^{k-a+1}(y_k, ..., mu^a(y_{a+b}, ..., y_{b+1}),
                                   y_b, ..., y_1) = 0,
    star = i(y_1) + ... + i(y_b) - b,

with i the integer degree, entering all signs only through its parity.

Coefficient types just need ring arithmetic: plain Fractions for the
transferred models, and `Cyc` (a rational multiple of a root of unity,
stored as an exact exponent) for smash products with a finite group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, lcm

from .lattice import LatticeClass, fractional_grading, integer_grading, size

ZERO = Fraction(0)


class RequiresMinimal(ValueError):
    """Raised when an operation needs mu^1 = 0 but the algebra has one."""


class Inconsistent(ValueError):
    """Raised when sign normalization contradicts itself."""


@dataclass(frozen=True)
class Cyc:
    """An exact coefficient q * zeta^exp with zeta a primitive root of
    unity of the given order.  Sums are only formed between terms with
    equal exponents (which is all the checker ever needs); anything else
    raises, loudly, instead of leaving exact arithmetic.
    """

    mag: Fraction
    exp: int
    order: int

    def __post_init__(self):
        object.__setattr__(self, "mag", Fraction(self.mag))
        object.__setattr__(self, "exp", self.exp % self.order if self.mag else 0)

    def __bool__(self):
        return bool(self.mag)

    def __neg__(self):
        return Cyc(-self.mag, self.exp, self.order)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, Cyc) or other.order != self.order:
            return NotImplemented
        if not self.mag:
            return other
        if not other.mag:
            return self
        if self.exp != other.exp:
            raise ValueError(
                f"cannot add root-of-unity terms with exponents "
                f"{self.exp} and {other.exp}"
            )
        return Cyc(self.mag + other.mag, self.exp, self.order)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Cyc):
            if other.order != self.order:
                raise ValueError("mixed root-of-unity orders")
            return Cyc(self.mag * other.mag, self.exp + other.exp, self.order)
        return Cyc(self.mag * Fraction(other), self.exp, self.order)

    __rmul__ = __mul__


@dataclass
class FiniteAInftyAlgebra:
    """Structure constants of a finite A-infinity algebra.

    ops[k] maps (output label, input tuple) -> coefficient.  zdeg gives
    the integer degree of each basis label; weight and qdeg are optional
    refinements used by smash products and the grading validator.
    """

    basis: list
    zdeg: dict
    ops: dict
    weight: dict = None
    qdeg: dict = None

    def mu(self, k, inputs):
        table = self.ops.get(k)
        if not table:
            return {}
        inputs = tuple(inputs)
        out = {}
        for (label, ins), coef in table.items():
            if ins == inputs and coef:
                out[label] = coef
        return out

    def dim(self):
        return len(self.basis)

    def validate_graded(self):
        """Weight additivity and Q-degree 2-k on every stored entry."""
        if self.weight is None or self.qdeg is None:
            raise ValueError("algebra carries no weight/degree data")
        for k, table in self.ops.items():
            for (out, ins), coef in table.items():
                if not coef:
                    continue
                w = self.weight[ins[0]]
                q = self.qdeg[ins[0]]
                for x in ins[1:]:
                    w = w + self.weight[x]
                    q = q + self.qdeg[x]
                if self.weight[out] != w:
                    raise ValueError(f"weight not additive on {ins} -> {out}")
                if self.qdeg[out] != q + 2 - k:
                    raise ValueError(f"degree of mu^{k} is not 2-{k} on {ins}")


def _tail_sign(zdeg, tail):
    """(-1)^star for a right tail, star = sum of (i(y) - 1)."""
    star = sum(zdeg[y] - 1 for y in tail)
    return -1 if star % 2 else 1


def check_stasheff(alg, max_arity, exhaustive=False):
    """Violated Stasheff identities up to the given composed arity.

    Returns a sorted list of (arity, input tuple, output label, total);
    empty means consistent.  The default mode joins stored entries
    pairwise, which reaches every instance with at least one nonzero
    term; exhaustive=True scans all basis tuples instead (only sensible
    for small algebras, used as an oracle for the join).
    """
    totals = {}
    if exhaustive:
        for m in range(1, max_arity + 1):
            for tup in product(alg.basis, repeat=m):
                for a in range(1, m + 1):
                    tin = alg.ops.get(a)
                    tout = alg.ops.get(m - a + 1)
                    if not tin or not tout:
                        continue
                    for p in range(0, m - a + 1):
                        inner = tup[p:p + a]
                        sign = _tail_sign(alg.zdeg, tup[p + a:])
                        for mid in alg.basis:
                            c_in = tin.get((mid, inner))
                            if not c_in:
                                continue
                            outer = tup[:p] + (mid,) + tup[p + a:]
                            for out in alg.basis:
                                c_out = tout.get((out, outer))
                                if not c_out:
                                    continue
                                key = (m, tup, out)
                                totals[key] = totals.get(key, 0) + sign * (c_out * c_in)
    else:
        by_label = {}
        for k_out, tout in alg.ops.items():
            for (out, ins), c_out in tout.items():
                if not c_out:
                    continue
                for p, label in enumerate(ins):
                    by_label.setdefault(label, []).append((out, ins, c_out, p))
        for k_in, tin in alg.ops.items():
            for (mid, inner), c_in in tin.items():
                if not c_in:
                    continue
                for out, ins, c_out, p in by_label.get(mid, ()):
                    m = len(ins) - 1 + k_in
                    if m > max_arity:
                        continue
                    tup = ins[:p] + inner + ins[p + 1:]
                    sign = _tail_sign(alg.zdeg, ins[p + 1:])
                    key = (m, tup, out)
                    totals[key] = totals.get(key, 0) + sign * (c_out * c_in)
    violations = [(m, tup, out, v) for (m, tup, out), v in totals.items() if v]
    violations.sort(key=lambda rec: (rec[0], rec[1], rec[2]))
    return violations


def opposite_sign(zdegs):
    """Parity of the reversal sign: 1 + k(k-1)/2 + (k+1) sum i + sum_{j<l} i_j i_l."""
    k = len(zdegs)
    total = sum(zdegs) % 2
    nodd = sum(1 for d in zdegs if d % 2)
    pairs = comb(nodd, 2) % 2
    return (1 + k * (k - 1) // 2 + (k + 1) * total + pairs) % 2


def opposite(alg):
    """The opposite algebra: arguments reversed, with the degree sign."""
    ops = {}
    for k, table in alg.ops.items():
        new = {}
        for (out, ins), coef in table.items():
            star = opposite_sign([alg.zdeg[x] for x in ins])
            new[(out, tuple(reversed(ins)))] = -coef if star else coef
        ops[k] = new
    return FiniteAInftyAlgebra(
        list(alg.basis), dict(alg.zdeg), ops,
        dict(alg.weight) if alg.weight else None,
        dict(alg.qdeg) if alg.qdeg else None,
    )


def supercommutativity_check(alg):
    """x.y = (-1)^{i(x)i(y)} y.x for the sign-dressed product
    x.y := (-1)^{i(x)} mu^2(x, y); mu^1 must vanish."""
    if any(alg.ops.get(1, {}).values()):
        raise RequiresMinimal("supercommutativity needs mu^1 = 0")
    table = alg.ops.get(2, {})
    mu2 = {}
    for (out, ins), coef in table.items():
        if coef:
            mu2.setdefault(ins, {})[out] = coef
    for x in alg.basis:
        ix = alg.zdeg[x] % 2
        for y in alg.basis:
            iy = alg.zdeg[y] % 2
            left = {
                out: -c if ix else c for out, c in mu2.get((x, y), {}).items()
            }
            flip = (ix * iy + iy) % 2
            right = {
                out: -c if flip else c for out, c in mu2.get((y, x), {}).items()
            }
            if left != right:
                return False
    return True


def _merge_sign(x, y):
    """Sign sorting the concatenation (x ascending, y ascending)."""
    inv = 0
    for i in range(x.bit_length()):
        if x >> i & 1:
            inv += size(y & ((1 << i) - 1))
    return -1 if inv % 2 else 1


def wedge_algebra(n):
    """The graded wedge on subsets of [n+2] with the textual-order sign:
    mu^2(y_2, y_1) = (-1)^{|y_1|} y_2 ^ y_1, no higher products."""
    n2 = n + 2
    basis = list(range(1 << n2))
    zdeg = {m: size(m) for m in basis}
    weight = {
        m: LatticeClass(tuple(-1 if m >> i & 1 else 0 for i in range(n2)))
        for m in basis
    }
    qdeg = {m: fractional_grading(m, n) for m in basis}
    table = {}
    for x in basis:
        for y in basis:
            if x & y:
                continue
            coef = Fraction(_merge_sign(x, y))
            if size(y) % 2:
                coef = -coef
            table[(x | y, (x, y))] = coef
    return FiniteAInftyAlgebra(basis, zdeg, {2: table}, weight, qdeg)


def exterior_normalize(alg, n):
    """Signs sigma_K rescaling the basis onto the graded wedge.

    Requires mu^1 = 0 and mu^2 supported on disjoint unions with
    coefficients +-1.  sigma is fixed to +1 on singletons, propagated by
    splitting off the smallest element, then verified on every disjoint
    pair; a contradiction raises Inconsistent.
    """
    if any(alg.ops.get(1, {}).values()):
        raise RequiresMinimal("normalization needs mu^1 = 0")
    a = {}
    for (out, ins), coef in alg.ops.get(2, {}).items():
        if not coef:
            continue
        x, y = ins
        if x & y or out != x | y:
            raise ValueError(f"mu^2 entry {ins} -> {out} is not a disjoint union")
        if coef not in (1, -1):
            raise ValueError(f"mu^2 coefficient {coef} is not a sign")
        a[(x, y)] = int(coef)

    def wedge(x, y):
        s = _merge_sign(x, y)
        return -s if size(y) % 2 else s

    sigma = {}
    if (0, 0) not in a:
        raise Inconsistent("no unit square entry to anchor sigma")
    sigma[0] = a[(0, 0)]
    n2 = n + 2
    for mask in sorted(range(1, 1 << n2), key=size):
        if size(mask) == 1:
            sigma[mask] = 1
            continue
        low = mask & -mask
        rest = mask ^ low
        if (rest, low) not in a:
            raise Inconsistent(f"missing product for split {rest}|{low}")
        sigma[mask] = a[(rest, low)] * sigma[rest] * sigma[low] * wedge(rest, low)
    for x in range(1 << n2):
        for y in range(1 << n2):
            if x & y:
                continue
            lhs = a.get((x, y))
            if lhs is None:
                raise Inconsistent(f"missing product entry for {x}, {y}")
            if lhs * sigma[x | y] != sigma[x] * sigma[y] * wedge(x, y):
                raise Inconsistent(f"sign clash on the pair {x}, {y}")
    return sigma


@dataclass(frozen=True)
class FiniteAbelianGroupData:
    """A finite abelian group of invariant factors with a map from the
    weight lattice: rho[j] is the image of e_{j+1}, as a tuple modulo
    the factors.  The images must sum to zero so rho kills the all-ones
    vector and descends to the quotient lattice.
    """

    factors: tuple
    rho: tuple

    def __post_init__(self):
        if not self.factors or any(f < 1 for f in self.factors):
            raise ValueError("invariant factors must be positive")
        for row in self.rho:
            if len(row) != len(self.factors):
                raise ValueError("rho row length does not match factors")
        sums = [sum(row[i] for row in self.rho) % f
                for i, f in enumerate(self.factors)]
        if any(sums):
            raise ValueError("rho does not kill the all-ones vector")

    @property
    def order(self):
        out = 1
        for f in self.factors:
            out *= f
        return out

    @property
    def modulus(self):
        return lcm(*self.factors)

    def characters(self):
        return list(product(*(range(f) for f in self.factors)))

    def apply(self, wclass):
        """rho of a lattice class, as a group element tuple."""
        vec = wclass.rep
        return tuple(
            sum(vec[j] * self.rho[j][i] for j in range(len(vec))) % f
            for i, f in enumerate(self.factors)
        )

    def pair(self, chi, g):
        """Exponent of chi(g) as a power of a primitive modulus-th root."""
        m = self.modulus
        return sum(
            chi[i] * g[i] * (m // f) for i, f in enumerate(self.factors)
        ) % m


def smash(alg, grp):
    """The smash product with the character group of grp.

    Basis labels are (a, chi); the twisted products act on the argument
    to the right of each character, so the coefficient of an entry picks
    up chi_l(rho(w(a_j))) for every pair with chi_l textually left of
    a_j.  Coefficients are stored as exact root-of-unity terms.
    """
    if alg.weight is None:
        raise ValueError("smash needs an algebra with weights")
    chars = grp.characters()
    m = grp.modulus
    nfac = len(grp.factors)
    rho_w = {a: grp.apply(alg.weight[a]) for a in alg.basis}
    basis = [(a, chi) for a in alg.basis for chi in chars]
    zdeg = {(a, chi): alg.zdeg[a] for a, chi in basis}
    weight = {(a, chi): alg.weight[a] for a, chi in basis}
    qdeg = {(a, chi): alg.qdeg[a] for a, chi in basis} if alg.qdeg else None
    ops = {}
    for k, table in alg.ops.items():
        new = {}
        for (out, ins), coef in table.items():
            if not coef:
                continue
            for chis in product(chars, repeat=k):
                exp = 0
                run = (0,) * nfac
                for idx in range(1, k):
                    run = tuple(
                        (run[i] + chis[idx - 1][i]) % grp.factors[i]
                        for i in range(nfac)
                    )
                    exp += grp.pair(run, rho_w[ins[idx]])
                out_chi = (0,) * nfac
                for chi in chis:
                    out_chi = tuple(
                        (out_chi[i] + chi[i]) % grp.factors[i]
                        for i in range(nfac)
                    )
                key = (
                    (out, out_chi),
                    tuple((ins[i], chis[i]) for i in range(k)),
                )
                new[key] = Cyc(coef, exp, m)
        ops[k] = new
    return FiniteAInftyAlgebra(basis, zdeg, ops, weight, qdeg)


def hkr_dim(n, r, t):
    """Dimension of the invariant Hochschild piece in total degree r and
    internal degree t.

    Counts pairs (a, K) with a = e_K + q*ones >= 0, |a| = s = r - t and
    (2s + n|K|)/(n+2) = r.  For each exterior degree j = |K| the
    multiplier q is pinned by |a| = j + q(n+2); q >= 0 contributes
    C(n+2, j) subsets and q = -1 only the full set.
    """
    s = r - t
    if s < 0:
        return 0
    num = r * (n + 2) - 2 * s
    j, rem = divmod(num, n)
    if rem or not 0 <= j <= n + 2:
        return 0
    q, rem = divmod(s - j, n + 2)
    if rem:
        return 0
    if q >= 0:
        return comb(n + 2, j)
    if q == -1 and j == n + 2:
        return 1
    return 0


def exterior_residue_dims(n):
    """Number of subsets of [n+2] per cardinality residue mod n+2.

    Residue 0 collects the empty and the full subset; this is the block
    dimension pattern of the smash with Z_{n+2} through the coordinate
    sum map.
    """
    n2 = n + 2
    out = {r: 0 for r in range(n2)}
    for mask in range(1 << n2):
        out[size(mask) % n2] += 1
    return out


def from_minimal_model(model):
    """Wrap transferred tables as a FiniteAInftyAlgebra on subset masks."""
    n = model.n
    n2 = n + 2
    basis = list(range(1 << n2))
    zdeg = {m: integer_grading(m, n) for m in basis}
    weight = {
        m: LatticeClass(tuple(-1 if m >> i & 1 else 0 for i in range(n2)))
        for m in basis
    }
    qdeg = {m: fractional_grading(m, n) for m in basis}
    ops = {k: dict(table) for k, table in model.tables.items()}
    return FiniteAInftyAlgebra(basis, zdeg, ops, weight, qdeg)
