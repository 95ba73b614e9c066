"""Minimal A-infinity model of the Koszul factorization endomorphism dga.

The operator dga (B, d) from `weyl` decomposes into finite bigraded
pieces indexed by (weight class, rational degree).  Its cohomology is an
exterior algebra on n+2 odd generators, one per variable; this module

  * builds explicit cocycle representatives dbar_j and their ordered
    products dbar_K,
  * contracts every piece it touches onto its cohomology with exact
    linear algebra (lazily, one solver per piece),
  * runs the homological-perturbation tree sum to transfer the product
    to A-infinity operations mu^k on the exterior basis {e_K}.

Conventions, frozen after calibrating against the arity <= 4 Stasheff
identities at n = 1:

  * mu^k(y_k, ..., y_1); input tuples are stored in textual order, so
    inputs[0] is y_k, the leftmost argument;
  * the tree sum is phrased with even "shifted" operators, so the
    recursion itself carries no Koszul signs.  All signs live in two
    constants: the two-slot product B2(v, u) = (-1)^{parity(u)} v*u and
    the homotopy step H = (-1)^{parity} h.

Subsets K of {1, ..., n+2} are passed as bitmasks (bit j-1 for index j).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product

from .lattice import (
    LatticeClass,
    elements,
    homogeneity_defect,
    size,
)
from .linalg import ChainComplexPiece, LinSolver, SparseMatrix, build_contraction, reduce
from .weyl import (
    MFConfig,
    OperatorElement,
    bigraded_basis,
    differential,
    multiply_monomials,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class BadChoice(ValueError):
    """Raised when an auxiliary index k(j) coincides with j."""


class ArityBound(ValueError):
    """Raised when a product arity falls outside the configured range."""


class PrematureProduct(ValueError):
    """Raised when an obstruction class is requested from a model with a
    nonzero product of arity strictly between 2 and n+2."""


@dataclass(frozen=True)
class CohomologyBasisChoice:
    """Auxiliary data fixing the cocycle representatives.

    aux[j-1] is the partner index k(j) != j appearing in dbar_j.  The
    representative for a subset K is always the product of the dbar_j
    with j ascending in K; that ordering is part of the contract and not
    configurable.
    """

    aux: tuple

    def __post_init__(self):
        for j, k in enumerate(self.aux, start=1):
            if not 1 <= k <= len(self.aux):
                raise BadChoice(f"auxiliary index {k} out of range")
            if k == j:
                raise BadChoice(f"auxiliary index for {j} must differ from {j}")

    @classmethod
    def default(cls, n):
        """Smallest admissible partner: k(1) = 2 and k(j) = 1 otherwise."""
        return cls(tuple(2 if j == 1 else 1 for j in range(1, n + 3)))


def dbar(j, choice, cfg):
    """Cocycle representative dtheta_j - a_j (W/(z_j z_k)) theta_k."""
    n2 = cfg.nvars
    if not 1 <= j <= n2:
        raise ValueError(f"index {j} out of range")
    k = choice.aux[j - 1]
    if k == j:
        raise BadChoice(f"auxiliary index for {j} must differ from {j}")
    lead = OperatorElement.monomial(cfg, (0,) * n2, 0, 1 << (j - 1))
    a = tuple(0 if i + 1 in (j, k) else 1 for i in range(n2))
    tail = OperatorElement.monomial(cfg, a, 1 << (k - 1), 0).scale(cfg.a[j - 1])
    return lead - tail


def dbar_product(kmask, choice, cfg):
    """Ordered product of dbar_j over j in K ascending; 1 for K empty."""
    out = OperatorElement.unit(cfg)
    for j in elements(kmask):
        out = out * dbar(j, choice, cfg)
    return out


class _Piece:
    """Solver data for one bigraded piece (lazy, built on first use)."""

    __slots__ = ("basis", "index", "kernel", "solver", "harm_mask", "im_sources")

    def __init__(self, basis, index, kernel, solver, harm_mask, im_sources):
        self.basis = basis
        self.index = index
        self.kernel = kernel        # free column -> sparse kernel vector
        self.solver = solver        # columns: [rep?] + image columns
        self.harm_mask = harm_mask  # K0 bitmask of the harmonic line, or None
        self.im_sources = im_sources  # basis indices one degree down


class _Engine:
    """Shared caches for one (cfg, choice): pieces, blocks, products."""

    def __init__(self, cfg, choice):
        self.cfg = cfg
        self.choice = choice
        self.n = cfg.n
        self.step = cfg.n + 2
        self._bases = {}
        self._outred = {}
        self._pieces = {}
        self._blocks = {}
        self._reps = {}
        self._mul = {}

    # -- bigraded piece plumbing --------------------------------------

    def basis(self, key):
        hit = self._bases.get(key)
        if hit is None:
            wrep, qnum = key
            lst = bigraded_basis(
                LatticeClass(wrep), Fraction(qnum, self.step), self.cfg
            )
            hit = (lst, {m: i for i, m in enumerate(lst)})
            self._bases[key] = hit
        return hit

    def outgoing(self, key):
        """Echelon data of d out of the piece: (rank, kernel, pivots, columns)."""
        hit = self._outred.get(key)
        if hit is None:
            wrep, qnum = key
            basis, _ = self.basis(key)
            tbasis, tindex = self.basis((wrep, qnum + self.step))
            cols = []
            for mono in basis:
                img = differential(
                    OperatorElement(self.cfg, {mono: ONE}), self.cfg
                )
                cols.append({tindex[m]: c for m, c in img.terms.items()})
            mat = SparseMatrix.from_columns(len(tbasis), cols)
            rank, kernel, pivots = reduce(mat)
            pivset = set(pivots)
            frees = [c for c in range(len(basis)) if c not in pivset]
            kern = {
                f: {i: v for i, v in enumerate(vec) if v}
                for f, vec in zip(frees, kernel)
            }
            hit = (rank, kern, pivots, cols)
            self._outred[key] = hit
        return hit

    def exterior_label(self, key):
        """The unique K0 with (weight, degree) matching the piece, if any."""
        wrep, qnum = key
        target = LatticeClass(wrep)
        for mask in range(1 << self.step):
            if size(mask) * self.n != qnum:
                continue
            neg = tuple(-1 if mask >> i & 1 else 0 for i in range(self.step))
            if LatticeClass(neg) == target:
                return mask
        return None

    def rep(self, kmask):
        hit = self._reps.get(kmask)
        if hit is None:
            hit = dbar_product(kmask, self.choice, self.cfg)
            self._reps[kmask] = hit
        return hit

    def piece(self, key):
        hit = self._pieces.get(key)
        if hit is None:
            wrep, qnum = key
            basis, index = self.basis(key)
            rank_out, kernel, _, _ = self.outgoing(key)
            below_key = (wrep, qnum - self.step)
            below_basis, _ = self.basis(below_key)
            rank_prev, _, prev_pivots, prev_cols = self.outgoing(below_key)
            harm_mask = self.exterior_label(key)
            hdim = len(basis) - rank_out - rank_prev
            if hdim != (0 if harm_mask is None else 1):
                raise RuntimeError(
                    f"piece {key} has cohomology dimension {hdim}, "
                    f"expected {'0' if harm_mask is None else '1'}"
                )
            columns = []
            if harm_mask is not None:
                r = self.rep(harm_mask)
                if not differential(r, self.cfg).is_zero():
                    raise RuntimeError("representative is not a cocycle")
                columns.append({index[m]: c for m, c in r.terms.items()})
            columns.extend(prev_cols[c] for c in prev_pivots)
            solver = LinSolver(columns)
            hit = _Piece(basis, index, kernel, solver, harm_mask, prev_pivots)
            self._pieces[key] = hit
        return hit

    def split(self, x, key):
        """Cycle-part decomposition: (harmonic coeffs, homotopy preimage).

        Returns ({K0: coef}, h(x)) where h(x) lies one degree down in the
        distinguished complement; the component of x outside ker(d) is
        discarded, which is exactly what both p and h do to it.
        """
        pc = self.piece(key)
        vec = {pc.index[m]: c for m, c in x.terms.items()}
        kp = {}
        for f, kvec in pc.kernel.items():
            c = vec.get(f)
            if c:
                for r, v in kvec.items():
                    cur = kp.get(r, ZERO) + c * v
                    if cur:
                        kp[r] = cur
                    else:
                        kp.pop(r, None)
        coefs, ok = pc.solver.solve(kp)
        if not ok:
            raise RuntimeError(f"piece {key}: cycle failed to decompose")
        nharm = 0 if pc.harm_mask is None else 1
        alpha = {}
        if nharm and coefs[0]:
            alpha[pc.harm_mask] = coefs[0]
        wrep, qnum = key
        below_basis, _ = self.basis((wrep, qnum - self.step))
        terms = {}
        for coef, src in zip(coefs[nharm:], pc.im_sources):
            if coef:
                terms[below_basis[src]] = coef
        return alpha, OperatorElement(self.cfg, terms)

    # -- transfer tree sum --------------------------------------------

    def product(self, e1, e2):
        """e1 * e2 through a monomial-pair memo shared across the run."""
        out = {}
        cache = self._mul
        n = self.n
        for m1, c1 in e1.terms.items():
            for m2, c2 in e2.terms.items():
                hit = cache.get((m1, m2))
                if hit is None:
                    hit = tuple(multiply_monomials(m1, ONE, m2, ONE, n).items())
                    cache[(m1, m2)] = hit
                cc = c1 * c2
                for mono, coef in hit:
                    cur = out.get(mono, ZERO) + cc * coef
                    if cur:
                        out[mono] = cur
                    else:
                        del out[mono]
        return OperatorElement(self.cfg, out)

    def lambda_key(self, masks):
        """Piece of the raw tree sum lambda over this argument block."""
        wvec = [0] * self.step
        qnum = 0
        for mask in masks:
            for i in range(self.step):
                if mask >> i & 1:
                    wvec[i] -= 1
            qnum += self.n * size(mask)
        return (
            LatticeClass(tuple(wvec)).rep,
            qnum - (len(masks) - 2) * self.step,
        )

    def block(self, masks):
        """Lambda_k of a contiguous argument block: i for k=1, H(lambda) above."""
        hit = self._blocks.get(masks)
        if hit is None:
            if len(masks) == 1:
                hit = self.rep(masks[0])
            else:
                lam = self.tree_sum(masks)
                if lam.is_zero():
                    hit = lam
                else:
                    sign = -1 if lam.parity() else 1
                    _, h = self.split(lam, self.lambda_key(masks))
                    hit = h.scale(sign) if sign < 0 else h
            self._blocks[masks] = hit
        return hit

    def tree_sum(self, masks):
        """lambda_k = sum over splits of B2(Lambda(left), Lambda(right))."""
        acc = {}
        for cut in range(1, len(masks)):
            left = self.block(masks[:cut])
            right = self.block(masks[cut:])
            if left.is_zero() or right.is_zero():
                continue
            term = self.product(left, right)
            if right.parity():
                term = term.scale(-1)
            for mono, coef in term.terms.items():
                cur = acc.get(mono, ZERO) + coef
                if cur:
                    acc[mono] = cur
                else:
                    del acc[mono]
        return OperatorElement(self.cfg, acc)

    def mu(self, masks):
        lam = self.tree_sum(masks)
        if lam.is_zero():
            return {}
        alpha, _ = self.split(lam, self.lambda_key(masks))
        return alpha


_ENGINES = {}


def _engine(cfg, choice):
    if choice is None:
        choice = CohomologyBasisChoice.default(cfg.n)
    key = (cfg, choice)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = _Engine(cfg, choice)
        _ENGINES[key] = eng
    return eng


def cohomology_dim(w, q, cfg):
    """Rank of the cohomology of (B, d) in the piece (w, q)."""
    qnum = Fraction(q) * cfg.nvars
    if qnum.denominator != 1:
        return 0
    eng = _engine(cfg, None)
    key = (w.rep, int(qnum))
    basis, _ = eng.basis(key)
    rank_out = eng.outgoing(key)[0]
    rank_prev = eng.outgoing((key[0], key[1] - eng.step))[0]
    return len(basis) - rank_out - rank_prev


def contraction_for_piece(w, q, cfg, choice=None):
    """Contraction of the three-term complex centred on the piece (w, q).

    The middle homology basis is forced onto the ordered dbar products,
    so inject at degree 1 hits the chosen cocycle representatives.
    """
    eng = _engine(cfg, choice)
    qnum = Fraction(q) * cfg.nvars
    if qnum.denominator != 1:
        raise ValueError(f"degree {q} is not a multiple of 1/{cfg.nvars}")
    qnum = int(qnum)
    keys = [(w.rep, qnum - eng.step), (w.rep, qnum), (w.rep, qnum + eng.step)]
    bases = [eng.basis(k)[0] for k in keys]
    maps = []
    for src in keys[:2]:
        cols = eng.outgoing(src)[3]
        maps.append(SparseMatrix.from_columns(len(eng.basis((src[0], src[1] + eng.step))[0]), cols))
    piece = ChainComplexPiece([len(b) for b in bases], maps)
    forced = {}
    label = eng.exterior_label(keys[1])
    if label is not None:
        _, index = eng.basis(keys[1])
        r = eng.rep(label)
        forced[1] = [{index[m]: c for m, c in r.terms.items()}]
    return build_contraction(piece, forced=forced)


def minimal_mu(k, inputs, cfg, choice=None, arity_bound=None):
    """Transferred product mu^k on the exterior basis, as {K0: coefficient}.

    inputs are subset bitmasks in textual order (inputs[0] = y_k).  The
    result is supported on at most one K0: the weight and degree
    identities pin it down, and both are re-checked on every entry.
    """
    n = cfg.n
    bound = arity_bound if arity_bound is not None else 2 * n + 4
    if not 2 <= k <= bound:
        raise ArityBound(f"arity {k} outside [2, {bound}]")
    if len(inputs) != k:
        raise ValueError(f"expected {k} inputs, got {len(inputs)}")
    limit = 1 << cfg.nvars
    for mask in inputs:
        if not 0 <= mask < limit:
            raise ValueError(f"subset mask {mask} out of range")
    eng = _engine(cfg, choice)
    out = eng.mu(tuple(inputs))
    for k0 in out:
        q = homogeneity_defect(k0, inputs, n)
        if q is None or k != 2 + n * q:
            raise RuntimeError(
                f"entry {k0} violates the weight/degree identity at arity {k}"
            )
    return out


@dataclass
class MinimalModel:
    """Tabulated A-infinity products on the exterior basis.

    tables[k] maps (K0, inputs) -> coefficient, with inputs in textual
    order; absent keys are zero.  Only the listed arities were computed;
    other arities are zero on every tuple satisfying the weight identity
    for their forced defect q = (k-2)/n, which is how the tables are
    enumerated.
    """

    cfg: MFConfig
    choice: CohomologyBasisChoice
    arity_bound: int
    tables: dict

    @property
    def n(self):
        return self.cfg.n

    def mu(self, k, inputs):
        table = self.tables.get(k)
        if not table:
            return {}
        out = {}
        for (k0, ins), coef in table.items():
            if ins == tuple(inputs):
                out[k0] = coef
        return out


def admissible_tuples(n, k, q):
    """All K-tuples of length k whose multiplicity vector is e_K0 + q*1.

    These are exactly the tuples on which mu^k can be nonzero when
    k = 2 + n q; every other tuple is annihilated by the weight grading.
    Generated coordinate by coordinate (each index j lies in q or q+1 of
    the K_i, independently), so no scan over all (2^{n+2})^k tuples.
    """
    n2 = n + 2
    per_coord = []
    for _ in range(n2):
        opts = []
        for c in (q, q + 1):
            if 0 <= c <= k:
                opts.extend(combinations(range(k), c))
        per_coord.append(opts)
    out = []
    for pick in product(*per_coord):
        masks = [0] * k
        for j, rows in enumerate(pick):
            for i in rows:
                masks[i] |= 1 << j
        out.append(tuple(masks))
    return out


def build_minimal_model(cfg, choice=None, arities=None, arity_bound=None):
    """Tabulate mu^k over all weight-admissible tuples for each arity.

    By default only the graded arities k = 2 + n q up to n+2 are
    tabulated (the product and the versal arity); pass an explicit
    arities list for more.
    """
    n = cfg.n
    bound = arity_bound if arity_bound is not None else 2 * n + 4
    if choice is None:
        choice = CohomologyBasisChoice.default(n)
    if arities is None:
        arities = [k for k in (2 + n * q for q in range(n + 1)) if k <= n + 2]
    tables = {}
    for k in sorted(set(arities)):
        if not 2 <= k <= bound:
            raise ArityBound(f"arity {k} outside [2, {bound}]")
        table = {}
        q, rem = divmod(k - 2, n)
        if rem == 0:
            for tup in admissible_tuples(n, k, q):
                for k0, coef in minimal_mu(
                    k, tup, cfg, choice, arity_bound=bound
                ).items():
                    table[(k0, tup)] = coef
        tables[k] = table
    return MinimalModel(cfg, choice, bound, tables)


def obstruction_class(model):
    """Coefficient of W in the deformation class: the e_empty coefficient
    of mu^{n+2} summed over all orderings of the n+2 singletons."""
    n = model.n
    for k, table in model.tables.items():
        if 2 < k < n + 2 and any(table.values()):
            raise PrematureProduct(
                f"model has a nonzero mu^{k} below the versal arity"
            )
    table = model.tables.get(n + 2)
    if table is None:
        raise ArityBound(f"model does not tabulate arity {n + 2}")
    total = ZERO
    for perm in permutations(1 << i for i in range(n + 2)):
        total += table.get((0, perm), ZERO)
    return total


def permutation_table(model):
    """Per-ordering e_empty coefficients of mu^{n+2} on the singletons.

    Keys are tuples of 1-based indices in textual order.  Which single
    orderings are nonzero depends on the contraction; only the total is
    an invariant of the dga.
    """
    n = model.n
    table = model.tables.get(n + 2, {})
    out = {}
    for perm in permutations(range(1, n + 3)):
        masks = tuple(1 << (j - 1) for j in perm)
        coef = table.get((0, masks), ZERO)
        if coef:
            out[perm] = coef
    return out
