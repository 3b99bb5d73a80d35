"""Exact arithmetic over Q(i): scalars, spectral polynomials and sparse matrices.

Constant matrices (``QMat``) keep Gaussian-integer numerators with one common
positive denominator, reduced so the representation is canonical.  Numerators
live in scipy int64 sparse arrays while every intermediate provably fits;
otherwise the matrix switches to a dict of Python ints, so results never
depend on machine precision.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.sparse as sps

# intermediate values must stay below this to use the int64 path
_INT64_SAFE = float(2**62)


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    raise TypeError(f"cannot read {x!r} as an exact rational")


def rational_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """a + b i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise TypeError("only integral complex literals are accepted")
            return cls(int(x.real), int(x.imag))
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        return cls(x)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, o):
        o = _gq(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        o = _gq(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = _gq(o)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, o):
        o = _gq(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        return _gq(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = GaussianRational(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        o = _gq(o)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.im == 0:
            return f"GR({self.re})"
        return f"GR({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self):
        return {"re": rational_str(self.re), "im": rational_str(self.im)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["re"], obj["im"])


def _gq(x):
    try:
        return GaussianRational.coerce(x)
    except TypeError:
        return NotImplemented


GR = GaussianRational
ONE = GaussianRational(1)
ZERO = GaussianRational(0)
I_UNIT = GaussianRational(0, 1)


# ---------------------------------------------------------------- polynomials

ZERO_DEGREE = -1  # degree sentinel of the zero polynomial


class SpectralPoly:
    """Polynomial in u (or in u, v) with Gaussian-rational coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, terms=None, vars=("u",)):
        self.vars = tuple(vars)
        t = {}
        for e, c in (terms or {}).items():
            e = (e,) if isinstance(e, int) else tuple(e)
            if len(e) != len(self.vars):
                raise ValueError("exponent arity does not match variables")
            c = GaussianRational.coerce(c)
            if not c.is_zero():
                t[e] = t.get(e, ZERO) + c
                if t[e].is_zero():
                    del t[e]
        self.terms = t

    @classmethod
    def from_coeffs(cls, coeffs, vars=("u",)):
        """Univariate constructor from an ascending coefficient list."""
        return cls({(k,): c for k, c in enumerate(coeffs)}, vars)

    @classmethod
    def const(cls, c, vars=("u",)):
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name="u", vars=("u",)):
        e = tuple(1 if v == name else 0 for v in vars)
        return cls({e: 1}, vars)

    @property
    def coeffs(self):
        """Ascending coefficient list (univariate only)."""
        if len(self.vars) != 1:
            raise ValueError("coeffs is defined for univariate polynomials")
        d = self.degree()
        return [self.terms.get((k,), ZERO) for k in range(d + 1)]

    def promote(self, vars):
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = [vars.index(v) for v in self.vars]
        t = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for k, i in enumerate(idx):
                ne[i] = e[k]
            t[tuple(ne)] = c
        return SpectralPoly(t, vars)

    def _align(self, o):
        if not isinstance(o, SpectralPoly):
            o = SpectralPoly.const(o, self.vars)
        if o.vars == self.vars:
            return self, o
        vs = tuple(v for v in ("u", "v") if v in self.vars or v in o.vars)
        return self.promote(vs), o.promote(vs)

    def is_zero(self):
        return not self.terms

    def degree(self, var=None):
        if not self.terms:
            return ZERO_DEGREE
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.vars.index(var) if var in self.vars else None
        if i is None:
            return 0
        return max(e[i] for e in self.terms)

    def __add__(self, o):
        a, b = self._align(o)
        t = dict(a.terms)
        for e, c in b.terms.items():
            t[e] = t.get(e, ZERO) + c
        return SpectralPoly(t, a.vars)

    __radd__ = __add__

    def __neg__(self):
        return SpectralPoly({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, o):
        a, b = self._align(o)
        return a + (-b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        a, b = self._align(o)
        t = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, ZERO) + c1 * c2
        return SpectralPoly(t, a.vars)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = SpectralPoly.const(1, self.vars)
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, o):
        if not isinstance(o, SpectralPoly):
            try:
                o = SpectralPoly.const(o, self.vars)
            except TypeError:
                return False
        a, b = self._align(o)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, u=None, v=None):
        return self.eval(u, v)

    def eval(self, u=None, v=None):
        vals = {"u": u, "v": v}
        pts = []
        for name in self.vars:
            if vals.get(name) is None:
                if self.degree(name) > 0:
                    raise ValueError(f"missing value for variable {name}")
                pts.append(ZERO)
            else:
                pts.append(GaussianRational.coerce(vals[name]))
        s = ZERO
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pts, e):
                if k:
                    term = term * x ** k
            s = s + term
        return s

    def substitute(self, images):
        """Replace each variable by a polynomial; ``images`` maps name -> SpectralPoly."""
        out = None
        for e, c in self.terms.items():
            term = None
            for name, k in zip(self.vars, e):
                img = images.get(name, SpectralPoly.var(name, (name,)))
                f = img ** k
                term = f if term is None else term * f
            term = term * c
            out = term if out is None else out + term
        if out is None:
            tgt = next(iter(images.values())).vars if images else self.vars
            return SpectralPoly({}, tgt)
        return out

    def leading(self):
        """Leading coefficient (univariate)."""
        return self.terms[(self.degree(),)]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mon = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(self.vars, e) if k)
            parts.append(f"{c}*{mon}" if mon else str(c))
        return " + ".join(parts)

    def to_json(self):
        degs = [self.degree(v) for v in self.vars]
        degs = [max(d, 0) for d in degs]
        coeffs = []
        if not self.terms:
            return {"vars": list(self.vars), "coeffs": []}
        if len(self.vars) == 1:
            coeffs = [c.to_json() for c in self.coeffs]
        else:
            for i in range(degs[0] + 1):
                coeffs.append([self.terms.get((i, j), ZERO).to_json() for j in range(degs[1] + 1)])
        return {"vars": list(self.vars), "coeffs": coeffs}

    @classmethod
    def from_json(cls, obj):
        vars = tuple(obj["vars"])
        t = {}
        if len(vars) == 1:
            for k, c in enumerate(obj["coeffs"]):
                t[(k,)] = GaussianRational.from_json(c)
        else:
            for i, row in enumerate(obj["coeffs"]):
                for j, c in enumerate(row):
                    t[(i, j)] = GaussianRational.from_json(c)
        return cls(t, vars)


def poly_divmod(a: SpectralPoly, b: SpectralPoly):
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    q = SpectralPoly({}, a.vars)
    r = a
    db, lb = b.degree(), b.leading()
    while not r.is_zero() and r.degree() >= db:
        k = r.degree() - db
        t = SpectralPoly({(k,): r.leading() / lb}, a.vars)
        q = q + t
        r = r - t * b
    return q, r


def poly_monic(p: SpectralPoly):
    if p.is_zero():
        return p
    return p * p.leading().inverse()


def poly_gcd(a: SpectralPoly, b: SpectralPoly):
    """Monic gcd of two univariate polynomials (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    return poly_monic(a)


# ------------------------------------------------------------ constant matrix

DENSE_LIMIT = 4096  # matrices with at most this many cells use dense numerators


def _ilcm(a, b):
    return a // math.gcd(a, b) * b


def _kind(shape):
    return "d" if shape[0] * shape[1] <= DENSE_LIMIT else "s"


def _fit(m, shape):
    """Convert a numerator array to the storage kind for ``shape``."""
    if _kind(shape) == "d":
        if sps.issparse(m):
            return np.asarray(m.toarray(), dtype=np.int64)
        return np.asarray(m, dtype=np.int64).reshape(shape)
    if sps.issparse(m):
        m = sps.csr_array(m, dtype=np.int64)
    else:
        m = sps.csr_array(np.asarray(m, dtype=np.int64))
    m.eliminate_zeros()
    m.sort_indices()
    return m


def _zeros(shape):
    if _kind(shape) == "d":
        return np.zeros(shape, dtype=np.int64)
    return sps.csr_array(shape, dtype=np.int64)


def _nz_values(m):
    if sps.issparse(m):
        return m.data
    return m[m != 0]


def _count(m):
    return m.nnz if sps.issparse(m) else int(np.count_nonzero(m))


def _abs_max(m):
    v = _nz_values(m)
    return float(np.max(np.abs(v.astype(np.float64)))) if v.size else 0.0


def _abs_rowsum_max(re, im):
    if _count(re) == 0 and _count(im) == 0:
        return 0.0
    if sps.issparse(re):
        a = abs(re).astype(np.float64) + abs(im).astype(np.float64)
        return float(np.max(a.sum(axis=1)))
    a = np.abs(re.astype(np.float64)) + np.abs(im.astype(np.float64))
    return float(a.sum(axis=1).max())


def _coo(m):
    if sps.issparse(m):
        c = m.tocoo()
        return c.row, c.col, c.data
    r, c = np.nonzero(m)
    return r, c, m[r, c]


def _same(a, b):
    if sps.issparse(a):
        return (a != b).nnz == 0
    return np.array_equal(a, b)


def _kron_arr(a, b, shape):
    if _kind(shape) == "d" and not sps.issparse(a) and not sps.issparse(b):
        return np.kron(a, b)
    return _fit(sps.kron(sps.csr_array(a), sps.csr_array(b), format="csr"), shape)


def _matmul_arr(a, b, shape):
    out = a @ b
    return _fit(out, shape)


class QMat:
    """Constant matrix over Q(i), stored as (re + i im) / den.

    re and im are int64 numpy arrays (small shapes) or scipy CSR arrays, or
    a dict of Python ints when values outgrow int64.
    """

    __slots__ = ("shape", "den", "_re", "_im", "_big")

    # ---- construction
    def __init__(self, shape, re=None, im=None, den=1, big=None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.den = int(den)
        if big is not None:
            self._re = self._im = None
            self._big = {k: v for k, v in big.items() if v[0] or v[1]}
            self._normalize_big()
            return
        self._re = _fit(re, self.shape) if re is not None else _zeros(self.shape)
        self._im = _fit(im, self.shape) if im is not None else _zeros(self.shape)
        self._big = None
        self._normalize_small()

    @classmethod
    def _raw(cls, shape, re, im, den):
        """Trusted constructor: arrays already in canonical storage and reduced."""
        m = cls.__new__(cls)
        m.shape = shape
        m.den = den
        m._re, m._im, m._big = re, im, None
        return m

    def _normalize_small(self):
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        if self.den < 0:
            self.den = -self.den
            self._re = -self._re
            self._im = -self._im
        if self.den == 1:
            return
        vals = [_nz_values(self._re), _nz_values(self._im)]
        if not vals[0].size and not vals[1].size:
            self.den = 1
            return
        g = self.den
        for v in vals:
            if v.size and g != 1:
                g = math.gcd(g, int(np.gcd.reduce(np.abs(v))))
        if g > 1:
            self.den //= g
            for name in ("_re", "_im"):
                m = getattr(self, name)
                if sps.issparse(m):
                    if m.nnz:
                        m = m.copy()
                        m.data //= g
                else:
                    m = m // g
                setattr(self, name, m)

    def _normalize_big(self):
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        if self.den < 0:
            self.den = -self.den
            self._big = {k: (-a, -b) for k, (a, b) in self._big.items()}
        g = self.den
        for a, b in self._big.values():
            if g == 1:
                break
            g = math.gcd(g, math.gcd(a, b))
        if not self._big:
            g = self.den
        if g > 1:
            self.den //= g
            self._big = {k: (a // g, b // g) for k, (a, b) in self._big.items()}
        # back to int64 storage when everything fits
        if all(abs(a) < 2**62 and abs(b) < 2**62 for a, b in self._big.values()):
            self._from_dict_small(self._big)

    def _from_dict_small(self, d):
        r, c = self.shape
        if d:
            keys = list(d)
            rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
            cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
            re = np.fromiter((d[k][0] for k in keys), dtype=np.int64, count=len(keys))
            im = np.fromiter((d[k][1] for k in keys), dtype=np.int64, count=len(keys))
            self._re = _fit(sps.csr_array((re, (rows, cols)), shape=(r, c)), self.shape)
            self._im = _fit(sps.csr_array((im, (rows, cols)), shape=(r, c)), self.shape)
        else:
            self._re = _zeros(self.shape)
            self._im = _zeros(self.shape)
        self._big = None

    @property
    def is_big(self):
        return self._big is not None

    @classmethod
    def zeros(cls, r, c=None):
        return cls((r, r if c is None else c))

    @classmethod
    def identity(cls, n):
        if _kind((n, n)) == "d":
            return cls._raw((n, n), np.eye(n, dtype=np.int64), np.zeros((n, n), dtype=np.int64), 1)
        return cls((n, n), re=sps.identity(n, dtype=np.int64, format="csr"))

    @classmethod
    def from_entries(cls, shape, entries):
        """Build from a mapping or iterable of ((i, j), value)."""
        items = entries.items() if isinstance(entries, dict) else entries
        vals = {}
        for (i, j), v in items:
            v = GaussianRational.coerce(v)
            if not (0 <= i < shape[0] and 0 <= j < shape[1]):
                raise IndexError(f"entry {(i, j)} out of range for shape {shape}")
            vals[(i, j)] = vals.get((i, j), ZERO) + v
        den = 1
        for v in vals.values():
            den = _ilcm(den, _ilcm(v.re.denominator, v.im.denominator))
        d = {}
        for k, v in vals.items():
            d[k] = (int(v.re * den), int(v.im * den))
        return cls(shape, den=den, big=d)

    @classmethod
    def from_dense(cls, rows):
        """From a nested list of exact scalars."""
        r = len(rows)
        c = len(rows[0]) if r else 0
        ent = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                v = GaussianRational.coerce(v)
                if v:
                    ent[(i, j)] = v
        return cls.from_entries((r, c), ent)

    @classmethod
    def diag(cls, values):
        return cls.from_entries((len(values), len(values)), {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def basis_unit(cls, n, i, j):
        return cls.from_entries((n, n), {(i, j): 1})

    # ---- inspection
    def _as_dict(self):
        if self._big is not None:
            return dict(self._big)
        d = {}
        for m, slot in ((self._re, 0), (self._im, 1)):
            r, c, v = _coo(m)
            for i, j, x in zip(r.tolist(), c.tolist(), v.tolist()):
                if x:
                    cur = d.setdefault((i, j), [0, 0])
                    cur[slot] = x
        return {k: (v[0], v[1]) for k, v in d.items()}

    def items(self):
        """Sorted (i, j, GaussianRational) triples of the nonzero entries."""
        den = self.den
        for (i, j), (a, b) in sorted(self._as_dict().items()):
            yield i, j, GaussianRational(Fraction(a, den), Fraction(b, den))

    def support(self):
        return set(self._as_dict())

    @property
    def nnz(self):
        return len(self._as_dict())

    def __getitem__(self, ij):
        i, j = ij
        if self._big is not None:
            a, b = self._big.get((i, j), (0, 0))
        else:
            a, b = int(self._re[i, j]), int(self._im[i, j])
        return GaussianRational(Fraction(a, self.den), Fraction(b, self.den))

    def is_zero(self):
        if self._big is not None:
            return not self._big
        return _count(self._re) == 0 and _count(self._im) == 0

    def is_real(self):
        if self._big is not None:
            return all(b == 0 for _, b in self._big.values())
        return _count(self._im) == 0

    def max_abs_numerator(self):
        if self._big is not None:
            return max((max(abs(a), abs(b)) for a, b in self._big.values()), default=0)
        return int(max(_abs_max(self._re), _abs_max(self._im)))

    def __eq__(self, o):
        if not isinstance(o, QMat):
            return NotImplemented
        if self.shape != o.shape or self.den != o.den:
            return False
        if self._big is None and o._big is None:
            return _same(self._re, o._re) and _same(self._im, o._im)
        return self._as_dict() == o._as_dict()

    def __hash__(self):
        return hash((self.shape, self.den, frozenset(self._as_dict().items())))

    def __repr__(self):
        return f"QMat({self.shape[0]}x{self.shape[1]}, nnz={self.nnz}, den={self.den})"

    def to_complex_array(self):
        """Dense complex numpy copy, for display only."""
        out = np.zeros(self.shape, dtype=complex)
        for (i, j), (a, b) in self._as_dict().items():
            out[i, j] = complex(a, b) / self.den
        return out

    # ---- arithmetic
    def __add__(self, o):
        if not isinstance(o, QMat):
            return NotImplemented
        if self.shape != o.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {o.shape}")
        den = _ilcm(self.den, o.den)
        fa, fb = den // self.den, den // o.den
        if self._big is None and o._big is None:
            bound = max(_abs_max(self._re), _abs_max(self._im)) * fa + \
                max(_abs_max(o._re), _abs_max(o._im)) * fb
            if bound < _INT64_SAFE and fa < _INT64_SAFE and fb < _INT64_SAFE:
                if fa == 1 and fb == 1:
                    return QMat(self.shape, re=self._re + o._re, im=self._im + o._im, den=den)
                return QMat(self.shape, re=self._re * fa + o._re * fb,
                            im=self._im * fa + o._im * fb, den=den)
        d = {k: (a * fa, b * fa) for k, (a, b) in self._as_dict().items()}
        for k, (a, b) in o._as_dict().items():
            x, y = d.get(k, (0, 0))
            d[k] = (x + a * fb, y + b * fb)
        return QMat(self.shape, den=den, big=d)

    def __neg__(self):
        if self._big is not None:
            return QMat(self.shape, den=self.den, big={k: (-a, -b) for k, (a, b) in self._big.items()})
        return QMat._raw(self.shape, -self._re, -self._im, self.den)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return QMat(self.shape)
        cd = _ilcm(c.re.denominator, c.im.denominator)
        cr, ci = int(c.re * cd), int(c.im * cd)
        den = self.den * cd
        if self._big is None:
            bound = max(_abs_max(self._re), _abs_max(self._im), 1.0) * (abs(cr) + abs(ci))
            if bound < _INT64_SAFE:
                if ci == 0:
                    return QMat(self.shape, re=self._re * cr, im=self._im * cr, den=den)
                return QMat(self.shape, re=self._re * cr - self._im * ci,
                            im=self._re * ci + self._im * cr, den=den)
        d = {k: (a * cr - b * ci, a * ci + b * cr) for k, (a, b) in self._as_dict().items()}
        return QMat(self.shape, den=den, big=d)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, o):
        if not isinstance(o, QMat):
            return NotImplemented
        if self.shape[1] != o.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {o.shape}")
        den = self.den * o.den
        shape = (self.shape[0], o.shape[1])
        if self._big is None and o._big is None:
            bound = _abs_rowsum_max(self._re, self._im) * max(_abs_max(o._re), _abs_max(o._im), 0.0) * 2
            if bound < _INT64_SAFE:
                a, b, c, d = self._re, self._im, o._re, o._im
                if sps.issparse(a) != sps.issparse(c):
                    # mixed storage: promote the dense side
                    if sps.issparse(a):
                        c, d = sps.csr_array(c), sps.csr_array(d)
                    else:
                        a, b = sps.csr_array(a), sps.csr_array(b)
                bz, dz = _count(b) == 0, _count(d) == 0
                if bz and dz:
                    return QMat(shape, re=_matmul_arr(a, c, shape), den=den)
                if bz:
                    return QMat(shape, re=_matmul_arr(a, c, shape), im=_matmul_arr(a, d, shape), den=den)
                if dz:
                    return QMat(shape, re=_matmul_arr(a, c, shape), im=_matmul_arr(b, c, shape), den=den)
                return QMat(shape, re=_fit(a @ c - b @ d, shape), im=_fit(a @ d + b @ c, shape), den=den)
        # big-int path: row-wise sparse product
        left = {}
        for (i, k), v in self._as_dict().items():
            left.setdefault(i, []).append((k, v))
        right = {}
        for (k, j), v in o._as_dict().items():
            right.setdefault(k, []).append((j, v))
        out = {}
        for i, row in left.items():
            acc = {}
            for k, (a, b) in row:
                for j, (c, d) in right.get(k, ()):
                    x, y = acc.get(j, (0, 0))
                    acc[j] = (x + a * c - b * d, y + a * d + b * c)
            for j, v in acc.items():
                out[(i, j)] = v
        return QMat(shape, den=den, big=out)

    def __pow__(self, k):
        r = QMat.identity(self.shape[0])
        for _ in range(k):
            r = r @ self
        return r

    @property
    def T(self):
        shape = (self.shape[1], self.shape[0])
        if self._big is not None:
            return QMat(shape, den=self.den, big={(j, i): v for (i, j), v in self._big.items()})
        return QMat(shape, re=self._re.T, im=self._im.T, den=self.den)

    def conj(self):
        if self._big is not None:
            return QMat(self.shape, den=self.den, big={k: (a, -b) for k, (a, b) in self._big.items()})
        return QMat._raw(self.shape, self._re, -self._im, self.den)

    def trace(self):
        if self.shape[0] != self.shape[1]:
            raise ValueError("trace of a non-square matrix")
        if self._big is None:
            a = int(self._re.diagonal().sum())
            b = int(self._im.diagonal().sum())
        else:
            a = sum(v[0] for (i, j), v in self._big.items() if i == j)
            b = sum(v[1] for (i, j), v in self._big.items() if i == j)
        return GaussianRational(Fraction(a, self.den), Fraction(b, self.den))

    def kron(self, o):
        shape = (self.shape[0] * o.shape[0], self.shape[1] * o.shape[1])
        den = self.den * o.den
        if self._big is None and o._big is None:
            bound = max(_abs_max(self._re), _abs_max(self._im)) * max(_abs_max(o._re), _abs_max(o._im)) * 2
            if bound < _INT64_SAFE:
                a, b, c, d = self._re, self._im, o._re, o._im
                k = lambda x, y: _kron_arr(x, y, shape)
                bz, dz = _count(b) == 0, _count(d) == 0
                if bz and dz:
                    return QMat(shape, re=k(a, c), den=den)
                return QMat(shape, re=k(a, c) - k(b, d), im=k(a, d) + k(b, c), den=den)
        r2, c2 = o.shape
        out = {}
        od = o._as_dict()
        for (i1, j1), (a, b) in self._as_dict().items():
            for (i2, j2), (c, d) in od.items():
                out[(i1 * r2 + i2, j1 * c2 + j2)] = (a * c - b * d, a * d + b * c)
        return QMat(shape, den=den, big=out)

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        shape = (len(rows), len(cols))
        if self._big is None:
            ri = np.asarray(rows, dtype=np.int64)
            ci = np.asarray(cols, dtype=np.int64)
            parts = []
            for m in (self._re, self._im):
                if sps.issparse(m):
                    parts.append(m[ri][:, ci])
                else:
                    parts.append(m[np.ix_(ri, ci)])
            return QMat(shape, re=parts[0], im=parts[1], den=self.den)
        rpos = {r: k for k, r in enumerate(rows)}
        cpos = {c: k for k, c in enumerate(cols)}
        d = {}
        for (i, j), v in self._big.items():
            if i in rpos and j in cpos:
                d[(rpos[i], cpos[j])] = v
        return QMat(shape, den=self.den, big=d)

    def permuted(self, row_perm, col_perm=None):
        """Entry (i, j) moves to (row_perm[i], col_perm[j])."""
        col_perm = row_perm if col_perm is None else col_perm
        if self._big is None:
            rp = np.asarray(row_perm, dtype=np.int64)
            cp = np.asarray(col_perm, dtype=np.int64)
            parts = []
            for m in (self._re, self._im):
                if sps.issparse(m):
                    coo = m.tocoo()
                    parts.append(sps.csr_array((coo.data, (rp[coo.row], cp[coo.col])), shape=self.shape))
                else:
                    out = np.zeros_like(m)
                    out[np.ix_(rp, cp)] = m
                    parts.append(out)
            return QMat(self.shape, re=parts[0], im=parts[1], den=self.den)
        return QMat(self.shape, den=self.den,
                    big={(row_perm[i], col_perm[j]): v for (i, j), v in self._big.items()})

    def apply(self, vec):
        """Matrix times a vector given as a list of exact scalars."""
        col = QMat.from_entries((len(vec), 1), {(i, 0): v for i, v in enumerate(vec) if GaussianRational.coerce(v)})
        res = self @ col
        out = [ZERO] * self.shape[0]
        for i, _, v in res.items():
            out[i] = v
        return out


def qeye(n):
    return QMat.identity(n)


def kron_all(*mats):
    out = mats[0]
    for m in mats[1:]:
        out = out.kron(m) if isinstance(out, QMat) else kron(out, m)
    return out


# ----------------------------------------------------------- tensor legs

def leg_permutation(dims, order):
    """Index map for reordering tensor factors.

    ``order[k]`` is the old factor placed at new position k.  Returns an array
    p with p[old_flat_index] = new_flat_index.
    """
    dims = tuple(dims)
    n = int(np.prod(dims))
    idx = np.arange(n).reshape(dims)
    moved = np.transpose(idx, order)  # moved[new multi-index] = old flat index
    p = np.empty(n, dtype=np.int64)
    p[moved.reshape(-1)] = np.arange(n)
    return p


def embed(op, dims, legs):
    """Operator acting on tensor factors ``legs`` (in that order) of ``dims``."""
    legs = list(legs)
    rest = [k for k in range(len(dims)) if k not in legs]
    ld = int(np.prod([dims[k] for k in legs]))
    rd = int(np.prod([dims[k] for k in rest])) if rest else 1
    if op.shape != (ld, ld):
        raise ValueError(f"operator shape {op.shape} does not fit legs {legs} of {dims}")
    big = op.kron(QMat.identity(rd)) if isinstance(op, QMat) else kron(op, SparsePolyMatrix.identity(rd, op.vars))
    cur = [dims[k] for k in legs] + [dims[k] for k in rest]
    order_old = legs + rest  # factor at current position j is original factor order_old[j]
    inv = [order_old.index(k) for k in range(len(dims))]
    p = leg_permutation(cur, inv)
    return big.permuted(p)


def swap_matrix(n1, n2=None):
    """The flip x⊗y -> y⊗x from C^n1⊗C^n2 to C^n2⊗C^n1."""
    n2 = n1 if n2 is None else n2
    ent = {}
    for i in range(n1):
        for j in range(n2):
            ent[(j * n1 + i, i * n2 + j)] = 1
    return QMat.from_entries((n1 * n2, n1 * n2), ent)


# ------------------------------------------------------- polynomial matrices

class SparsePolyMatrix:
    """Matrix with polynomial entries, kept as coefficient matrices per monomial."""

    __slots__ = ("shape", "vars", "coeffs")

    def __init__(self, shape, coeffs=None, vars=("u",)):
        self.shape = (int(shape[0]), int(shape[1]))
        self.vars = tuple(vars)
        c = {}
        for e, m in (coeffs or {}).items():
            e = (e,) if isinstance(e, int) else tuple(e)
            if len(e) != len(self.vars):
                raise ValueError("exponent arity does not match variables")
            if m.shape != self.shape:
                raise ValueError("coefficient shape mismatch")
            if e in c:
                m = c[e] + m
            if m.is_zero():
                c.pop(e, None)
            else:
                c[e] = m
        self.coeffs = c

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    @classmethod
    def constant(cls, m: QMat, vars=("u",)):
        return cls(m.shape, {(0,) * len(vars): m}, vars)

    @classmethod
    def identity(cls, n, vars=("u",)):
        return cls.constant(QMat.identity(n), vars)

    @classmethod
    def linear(cls, a: QMat, b: QMat, vars=("u",)):
        """a*u + b."""
        return cls(a.shape, {(1,): a, (0,): b}, vars)

    @classmethod
    def from_entries(cls, rows, cols, entries, vars=None):
        entries = dict(entries)
        if vars is None:
            vs = set()
            for p in entries.values():
                if isinstance(p, SpectralPoly):
                    vs |= set(p.vars)
            vars = ("u", "v") if "v" in vs else ("u",)
        vars = tuple(vars)
        buckets = {}
        for (i, j), p in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry {(i, j)} out of range")
            if not isinstance(p, SpectralPoly):
                p = SpectralPoly.const(p, vars)
            p = p.promote(vars)
            for e, c in p.terms.items():
                buckets.setdefault(e, {})[(i, j)] = c
        return cls((rows, cols), {e: QMat.from_entries((rows, cols), d) for e, d in buckets.items()}, vars)

    def promote(self, vars):
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = [vars.index(v) for v in self.vars]
        c = {}
        for e, m in self.coeffs.items():
            ne = [0] * len(vars)
            for k, i in enumerate(idx):
                ne[i] = e[k]
            c[tuple(ne)] = m
        return SparsePolyMatrix(self.shape, c, vars)

    def _align(self, o):
        if o.vars == self.vars:
            return self, o
        vs = ("u", "v")
        return self.promote(vs), o.promote(vs)

    @property
    def entries(self):
        """Map (i, j) -> SpectralPoly of the nonzero entries."""
        acc = {}
        for e, m in self.coeffs.items():
            for i, j, v in m.items():
                acc.setdefault((i, j), {})[e] = v
        return {k: SpectralPoly(t, self.vars) for k, t in sorted(acc.items())}

    def entry(self, i, j):
        return SpectralPoly({e: m[i, j] for e, m in self.coeffs.items()}, self.vars)

    def support(self):
        s = set()
        for m in self.coeffs.values():
            s |= m.support()
        return s

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return all(sum(e) == 0 for e in self.coeffs)

    def degree(self, var=None):
        if not self.coeffs:
            return ZERO_DEGREE
        if var is None:
            return max(sum(e) for e in self.coeffs)
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.coeffs)

    def coeff(self, k):
        """Coefficient matrix of u^k (univariate)."""
        return self.coeffs.get((k,), QMat(self.shape))

    def const_part(self):
        return self.coeffs.get((0,) * len(self.vars), QMat(self.shape))

    def __add__(self, o):
        if isinstance(o, QMat):
            o = SparsePolyMatrix.constant(o, self.vars)
        a, b = self._align(o)
        if a.shape != b.shape:
            raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
        c = dict(a.coeffs)
        for e, m in b.coeffs.items():
            c[e] = c[e] + m if e in c else m
        return SparsePolyMatrix(a.shape, c, a.vars)

    def __neg__(self):
        return SparsePolyMatrix(self.shape, {e: -m for e, m in self.coeffs.items()}, self.vars)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        if isinstance(c, SpectralPoly):
            return self.poly_scale(c)
        return SparsePolyMatrix(self.shape, {e: m.scale(c) for e, m in self.coeffs.items()}, self.vars)

    def poly_scale(self, p: SpectralPoly):
        a = self.promote(tuple(sorted(set(self.vars) | set(p.vars), key=("u", "v").index)))
        p = p.promote(a.vars)
        c = {}
        for e1, m in a.coeffs.items():
            for e2, s in p.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t = m.scale(s)
                c[e] = c[e] + t if e in c else t
        return SparsePolyMatrix(a.shape, c, a.vars)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, o):
        if isinstance(o, QMat):
            o = SparsePolyMatrix.constant(o, self.vars)
        a, b = self._align(o)
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
        c = {}
        for e1, m1 in a.coeffs.items():
            for e2, m2 in b.coeffs.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t = m1 @ m2
                c[e] = c[e] + t if e in c else t
        return SparsePolyMatrix((a.shape[0], b.shape[1]), c, a.vars)

    def __rmatmul__(self, o):
        if isinstance(o, QMat):
            return SparsePolyMatrix.constant(o, self.vars) @ self
        return NotImplemented

    def __eq__(self, o):
        if isinstance(o, QMat):
            o = SparsePolyMatrix.constant(o, self.vars)
        if not isinstance(o, SparsePolyMatrix):
            return NotImplemented
        if self.shape != o.shape:
            return False
        a, b = self._align(o)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.shape, self.vars, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"SparsePolyMatrix({self.shape[0]}x{self.shape[1]}, vars={self.vars}, degree={self.degree()})"

    def kron(self, o):
        if isinstance(o, QMat):
            o = SparsePolyMatrix.constant(o, self.vars)
        a, b = self._align(o)
        c = {}
        for e1, m1 in a.coeffs.items():
            for e2, m2 in b.coeffs.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t = m1.kron(m2)
                c[e] = c[e] + t if e in c else t
        return SparsePolyMatrix((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), c, a.vars)

    def map_coeffs(self, f, shape=None):
        return SparsePolyMatrix(shape or self.shape, {e: f(m) for e, m in self.coeffs.items()}, self.vars)

    def permuted(self, row_perm, col_perm=None):
        return self.map_coeffs(lambda m: m.permuted(row_perm, col_perm))

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return self.map_coeffs(lambda m: m.submatrix(rows, cols), (len(rows), len(cols)))

    @property
    def T(self):
        return self.map_coeffs(lambda m: m.T, (self.shape[1], self.shape[0]))

    def trace(self):
        return SpectralPoly({e: m.trace() for e, m in self.coeffs.items()}, self.vars)

    def at(self, u=None, v=None) -> QMat:
        """Evaluate to a constant QMat."""
        vals = {"u": u, "v": v}
        pts = []
        for name in self.vars:
            x = vals.get(name)
            if x is None:
                if self.degree(name) > 0:
                    raise ValueError(f"missing value for variable {name}")
                x = 0
            pts.append(GaussianRational.coerce(x))
        out = QMat(self.shape)
        for e, m in self.coeffs.items():
            s = ONE
            for x, k in zip(pts, e):
                if k:
                    s = s * x ** k
            out = out + m.scale(s)
        return out

    def shifted(self, a, b):
        """M(a*u + b) for univariate M, as a univariate matrix."""
        a = GaussianRational.coerce(a)
        b = GaussianRational.coerce(b)
        arg = SpectralPoly({(1,): a, (0,): b})
        c = {}
        for (k,), m in self.coeffs.items():
            for (j,), s in (arg ** k).terms.items():
                t = m.scale(s)
                c[(j,)] = c[(j,)] + t if (j,) in c else t
        return SparsePolyMatrix(self.shape, c, self.vars)

    def substitute(self, image: SpectralPoly):
        """Replace u by the polynomial ``image`` (possibly bivariate)."""
        if len(self.vars) != 1:
            raise ValueError("substitute expects a univariate matrix")
        c = {}
        for (k,), m in self.coeffs.items():
            for e, s in (image ** k).terms.items():
                t = m.scale(s)
                c[e] = c[e] + t if e in c else t
        return SparsePolyMatrix(self.shape, c, image.vars)

    def to_json(self):
        return {"rows": self.shape[0], "cols": self.shape[1],
                "entries": [[i, j, p.to_json()] for (i, j), p in self.entries.items()]}

    @classmethod
    def from_json(cls, obj):
        ent = {(int(i), int(j)): SpectralPoly.from_json(p) for i, j, p in obj["entries"]}
        vars = None
        for p in ent.values():
            vars = p.vars
            break
        return cls.from_entries(obj["rows"], obj["cols"], ent, vars)


def as_poly_matrix(m, vars=("u",)):
    return m if isinstance(m, SparsePolyMatrix) else SparsePolyMatrix.constant(m, vars)


def qmat_to_json(m: QMat):
    return SparsePolyMatrix.constant(m).to_json()


def qmat_from_json(obj) -> QMat:
    spm = SparsePolyMatrix.from_json(obj)
    if not spm.is_constant():
        raise ValueError("expected a constant matrix")
    return spm.const_part()


# ------------------------------------------------------------ public kernels

def kron(a, b):
    """Kronecker product; row index i1*rows_b + i2."""
    if isinstance(a, QMat) and isinstance(b, QMat):
        return a.kron(b)
    return as_poly_matrix(a, getattr(b, "vars", ("u",))).kron(b)


def eval_poly_matrix(m: SparsePolyMatrix, u, v=None) -> SparsePolyMatrix:
    """Evaluate at u (and v); the result is a constant SparsePolyMatrix."""
    if u is None:
        raise ValueError("missing value for variable u")
    if "v" in m.vars and m.degree("v") > 0 and v is None:
        raise ValueError("missing value for variable v")
    return SparsePolyMatrix.constant(m.at(u, v), m.vars)


def _const_qmat(m):
    if isinstance(m, QMat):
        return m
    if not m.is_constant():
        raise ValueError("matrix has non-constant entries; evaluate it first")
    return m.const_part()


def partial_trace(m, factor_dims, which):
    """Trace out factor 1 or 2 of a matrix on C^d1 ⊗ C^d2."""
    d1, d2 = factor_dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {m.shape} does not match factors {factor_dims}")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    keep = d2 if which == 1 else d1

    def tr(q: QMat):
        d = {}
        for (i, j), (a, b) in q._as_dict().items():
            if which == 2:
                if i % d2 != j % d2:
                    continue
                key = (i // d2, j // d2)
            else:
                if i // d2 != j // d2:
                    continue
                key = (i % d2, j % d2)
            x, y = d.get(key, (0, 0))
            d[key] = (x + a, y + b)
        return QMat((keep, keep), den=q.den, big=d)

    if isinstance(m, QMat):
        return tr(m)
    return m.map_coeffs(tr, (keep, keep))


# ------------------------------------------------------- exact elimination

def _gmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _row_content(row):
    g = 0
    for a, b in row.values():
        g = math.gcd(g, math.gcd(a, b))
        if g == 1:
            return row
    if g > 1:
        return {k: (a // g, b // g) for k, (a, b) in row.items()}
    return row


def _make_pivot_real(row, col):
    p = row[col]
    if p[1] == 0:
        if p[0] < 0:
            return {k: (-a, -b) for k, (a, b) in row.items()}
        return row
    c = (p[0], -p[1])
    return _row_content({k: _gmul(v, c) for k, v in row.items()})


def echelon(rows, ncols=None):
    """Incremental echelon form over Q(i).

    ``rows`` is an iterable of dicts col -> (re, im) Gaussian-integer pairs.
    Returns a dict pivot column -> row whose smallest column is that pivot and
    whose pivot entry is a positive integer.
    """
    piv = {}
    for row in rows:
        row = {k: v for k, v in row.items() if v[0] or v[1]}
        while row:
            cols = [c for c in row if c in piv]
            if not cols:
                break
            c = min(cols)
            prow = piv[c]
            p = prow[c][0]
            f = row[c]
            new = {k: (v[0] * p, v[1] * p) for k, v in row.items()}
            for k, v in prow.items():
                w = _gmul(v, f)
                x, y = new.get(k, (0, 0))
                x, y = x - w[0], y - w[1]
                if x or y:
                    new[k] = (x, y)
                else:
                    new.pop(k, None)
            row = _row_content(new)
        if row:
            c = min(row)
            piv[c] = _make_pivot_real(_row_content(row), c)
    return piv


def _reduce_fully(piv):
    """Back substitution: clear every pivot column from the other pivot rows."""
    cols = sorted(piv)
    for c in reversed(cols):
        prow = piv[c]
        p = prow[c][0]
        for c2 in cols:
            if c2 >= c:
                break
            row = piv[c2]
            if c not in row:
                continue
            f = row[c]
            new = {k: (v[0] * p, v[1] * p) for k, v in row.items()}
            for k, v in prow.items():
                w = _gmul(v, f)
                x, y = new.get(k, (0, 0))
                x, y = x - w[0], y - w[1]
                if x or y:
                    new[k] = (x, y)
                else:
                    new.pop(k, None)
            piv[c2] = _make_pivot_real(_row_content(new), c2)
    return piv


def _qmat_rows(m: QMat):
    rows = {}
    for (i, j), v in m._as_dict().items():
        rows.setdefault(i, {})[j] = v
    return [rows[i] for i in sorted(rows)]


def rank(m) -> int:
    m = _const_qmat(m)
    return len(echelon(_qmat_rows(m)))


def nullspace_rows(rows, ncols):
    """Right-kernel basis of the system given as Gaussian-integer row dicts."""
    piv = _reduce_fully(echelon(rows))
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        vec = [ZERO] * ncols
        vec[f] = ONE
        for c, row in piv.items():
            if f in row:
                a, b = row[f]
                p = row[c][0]
                vec[c] = GaussianRational(Fraction(-a, p), Fraction(-b, p))
        basis.append(vec)
    return basis


def nullspace(m):
    """Exact basis of the right kernel of a constant matrix (list of vectors)."""
    m = _const_qmat(m)
    return nullspace_rows(_qmat_rows(m), m.shape[1])


def inverse(m) -> QMat:
    """Exact inverse of a square constant matrix."""
    m = _const_qmat(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    full = [dict() for _ in range(n)]
    for (i, j), v in m._as_dict().items():
        full[i][j] = v
    for i in range(n):
        full[i][n + i] = (m.den, 0)
    piv = _reduce_fully(echelon(full))
    if any(c not in piv for c in range(n)):
        raise ZeroDivisionError("matrix is singular")
    ent = {}
    for c in range(n):
        row = piv[c]
        p = row[c][0]
        for k, (a, b) in row.items():
            if k >= n:
                ent[(c, k - n)] = GaussianRational(Fraction(a, p), Fraction(b, p))
    return QMat.from_entries((n, n), ent)


def vector_to_qmat(vec, shape):
    """Reshape a flat vector (row-major) into a matrix."""
    r, c = shape
    return QMat.from_entries(shape, {(k // c, k % c): v for k, v in enumerate(vec) if v})
