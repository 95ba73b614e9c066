"""The graded operator algebra around the Koszul factorization of W.

W = z_1 ... z_(n+2) acts on R tensor Lambda(theta_1, ..., theta_(n+2))
through the odd operators theta_j (wedge) and dtheta_j (contraction),
with z coefficients.  A monomial is stored normal ordered as

    z^a theta_S dtheta_T   ->   (a, S, T)

with a a tuple of nonnegative ints and S, T subset masks; within each
block generators appear in ascending index order.  The curved
differential is conjugation by

    delta = sum_j  z_j dtheta_j + a_j (W / z_j) theta_j,

whose square is W times the identity whenever the weights a_j sum to 1.

Gradings: |z_j| = 2/(n+2), |theta_j| = -n/(n+2), |dtheta_j| = n/(n+2);
the M-weight of z^a theta_S dtheta_T is the class of a + e_S - e_T and
its parity is |S| + |T| mod 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import LatticeClass, elements, size

ZERO = Fraction(0)
ONE = Fraction(1)


class BadConfig(ValueError):
    """Raised for an inconsistent factorization configuration."""


class InhomogeneousParity(ValueError):
    """Raised when an operation needs a parity homogeneous element."""


@dataclass(frozen=True)
class MFConfig:
    """Dimension n plus the weights a_j of the Koszul factorization.

    The a_j may be arbitrary rationals with sum 1; the symmetric choice
    a_j = 1/(n+2) is the default.
    """

    n: int
    a: tuple = None

    def __post_init__(self):
        if self.n < 1:
            raise BadConfig("n must be at least 1")
        if self.a is None:
            object.__setattr__(
                self, "a", (Fraction(1, self.n + 2),) * (self.n + 2)
            )
        else:
            a = tuple(Fraction(x) for x in self.a)
            if len(a) != self.n + 2:
                raise BadConfig(f"need {self.n + 2} weights, got {len(a)}")
            if sum(a) != 1:
                raise BadConfig("factorization weights must sum to 1")
            object.__setattr__(self, "a", a)

    @property
    def nvars(self):
        return self.n + 2


def unit_monomial(cfg):
    return ((0,) * cfg.nvars, 0, 0)


def mono_parity(mono):
    _, s, t = mono
    return (size(s) + size(t)) & 1


def mono_qdeg_num(mono, n):
    """Numerator of the Q-degree over n+2: 2|a| - n|S| + n|T|."""
    a, s, t = mono
    return 2 * sum(a) - n * size(s) + n * size(t)


def mono_weight(mono, n):
    a, s, t = mono
    vec = list(a)
    for i in range(n + 2):
        if s >> i & 1:
            vec[i] += 1
        if t >> i & 1:
            vec[i] -= 1
    return LatticeClass(vec)


def _insert_sign(mask, j):
    """Parity of moving a generator with index bit j past the smaller ones."""
    below = mask & ((1 << j) - 1)
    return -1 if size(below) & 1 else 1


def _apply_theta(j, coef, mono, out):
    a, s, t = mono
    bit = 1 << j
    if s & bit:
        return
    c = coef * _insert_sign(s, j)
    _accumulate(out, (a, s | bit, t), c)


def _apply_dtheta(j, coef, mono, out):
    a, s, t = mono
    bit = 1 << j
    if s & bit:
        # dtheta_j theta_S = (-1)^pos theta_{S-j} + (-1)^{|S|} theta_S dtheta_j
        pos = size(s & (bit - 1))
        _accumulate(out, (a, s ^ bit, t), coef * (-1 if pos & 1 else 1))
        pass_sign = -1 if size(s) & 1 else 1
        _push_dtheta(j, coef * pass_sign, (a, s, t), out)
    else:
        pass_sign = -1 if size(s) & 1 else 1
        _push_dtheta(j, coef * pass_sign, mono, out)


def _push_dtheta(j, coef, mono, out):
    a, s, t = mono
    bit = 1 << j
    if t & bit:
        return
    c = coef * _insert_sign(t, j)
    _accumulate(out, (a, s, t | bit), c)


def _accumulate(out, mono, coef):
    if not coef:
        return
    cur = out.get(mono)
    if cur is None:
        out[mono] = coef
    else:
        cur += coef
        if cur:
            out[mono] = cur
        else:
            del out[mono]


def multiply_monomials(m1, c1, m2, c2, n):
    """Product of two normal ordered monomials as a term dict."""
    a1, s1, t1 = m1
    terms = {m2: c1 * c2}
    # Apply the word of m1 right to left: dtheta block (descending), then
    # theta block (descending), then the central z part.
    for j in reversed(elements(t1)):
        nxt = {}
        for mono, coef in terms.items():
            _apply_dtheta(j - 1, coef, mono, nxt)
        terms = nxt
        if not terms:
            return terms
    for j in reversed(elements(s1)):
        nxt = {}
        for mono, coef in terms.items():
            _apply_theta(j - 1, coef, mono, nxt)
        terms = nxt
        if not terms:
            return terms
    if any(a1):
        shifted = {}
        for (a, s, t), coef in terms.items():
            shifted[(tuple(x + y for x, y in zip(a, a1)), s, t)] = coef
        terms = shifted
    return terms


class OperatorElement:
    """A finite Q-linear combination of normal ordered monomials."""

    __slots__ = ("cfg", "terms")

    def __init__(self, cfg, terms=None):
        self.cfg = cfg
        self.terms = {}
        if terms:
            for mono, coef in terms.items():
                coef = Fraction(coef)
                if coef:
                    self.terms[mono] = coef

    @classmethod
    def unit(cls, cfg):
        return cls(cfg, {unit_monomial(cfg): ONE})

    @classmethod
    def monomial(cls, cfg, a, smask, tmask, coef=ONE):
        return cls(cfg, {(tuple(a), smask, tmask): coef})

    def __add__(self, other):
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            _accumulate(out, mono, coef)
        return OperatorElement(self.cfg, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            _accumulate(out, mono, -coef)
        return OperatorElement(self.cfg, out)

    def scale(self, a):
        a = Fraction(a)
        if not a:
            return OperatorElement(self.cfg)
        return OperatorElement(self.cfg, {m: a * c for m, c in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if not isinstance(other, OperatorElement):
            return NotImplemented
        n = self.cfg.n
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for mono, coef in multiply_monomials(m1, c1, m2, c2, n).items():
                    _accumulate(out, mono, coef)
        return OperatorElement(self.cfg, out)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, OperatorElement)
            and self.cfg.n == other.cfg.n
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("OperatorElement is not hashable")

    def parity(self):
        """Common parity of all terms; InhomogeneousParity when mixed."""
        parities = {mono_parity(m) for m in self.terms}
        if len(parities) > 1:
            raise InhomogeneousParity("element mixes even and odd terms")
        return parities.pop() if parities else 0

    def sorted_terms(self):
        def key(item):
            (a, s, t), _ = item
            return (a, elements(s), elements(t))

        return sorted(self.terms.items(), key=key)

    def __repr__(self):
        if not self.terms:
            return "OperatorElement(0)"
        bits = []
        for (a, s, t), coef in self.sorted_terms()[:6]:
            bits.append(f"{coef}*z^{a}th{elements(s)}d{elements(t)}")
        more = "..." if len(self.terms) > 6 else ""
        return "OperatorElement(" + " + ".join(bits) + more + ")"


def delta(cfg):
    """The odd Koszul operator with delta^2 = W."""
    n2 = cfg.nvars
    terms = {}
    for j in range(n2):
        ej = tuple(1 if i == j else 0 for i in range(n2))
        terms[(ej, 0, 1 << j)] = ONE
        w_over = tuple(0 if i == j else 1 for i in range(n2))
        terms[(w_over, 1 << j, 0)] = cfg.a[j]
    return OperatorElement(cfg, terms)


def w_element(cfg):
    """W = z_1 ... z_(n+2) times the identity operator."""
    return OperatorElement.monomial(cfg, (1,) * cfg.nvars, 0, 0)


def differential(x, cfg):
    """d(x) = delta x - (-1)^|x| x delta for parity homogeneous x."""
    p = x.parity()
    d = delta(cfg)
    left = d * x
    right = x * d
    return left - right if p == 0 else left + right


def bigraded_basis(wclass, qdeg, cfg):
    """Ordered monomial basis of the piece with weight wclass, degree qdeg.

    qdeg is the rational cohomological degree; qdeg*(n+2) must be an
    integer.  Monomials are listed lexicographically on (a, S, T) with
    subsets compared as ascending element tuples, so the order is a
    reproducible contract.
    """
    n = cfg.n
    n2 = cfg.nvars
    qnum = Fraction(qdeg) * (n + 2)
    if qnum.denominator != 1:
        raise ValueError(f"degree {qdeg} is not a multiple of 1/{n + 2}")
    qnum = int(qnum)
    wrep = wclass.rep
    wsum = sum(wrep)
    out = []
    for s in range(1 << n2):
        ssz = size(s)
        for t in range(1 << n2):
            tsz = size(t)
            two_abs = qnum + n * ssz - n * tsz
            if two_abs < 0 or two_abs % 2:
                continue
            abs_a = two_abs // 2
            base_sum = wsum - ssz + tsz
            m, rem = divmod(abs_a - base_sum, n2)
            if rem:
                continue
            a = []
            ok = True
            for i in range(n2):
                v = wrep[i] - (s >> i & 1) + (t >> i & 1) + m
                if v < 0:
                    ok = False
                    break
                a.append(v)
            if ok:
                out.append((tuple(a), s, t))
    out.sort(key=lambda mono: (mono[0], elements(mono[1]), elements(mono[2])))
    return out
