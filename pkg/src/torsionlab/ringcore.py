"""Exact arithmetic in Z[t, t^-1] and in the finite group ring Z[Z/q].

LaurentPoly is a sparse map exponent -> coefficient with Python big
integers, so products of long matrix words never overflow.  CycElem is a
dense length-q coefficient vector; multiplication is cyclic convolution.
Both rings carry the involution t -> t^-1 (resp. k -> -k mod q).
"""

from __future__ import annotations

import json
import threading
from typing import Iterable, Mapping


class NonUnitModulus(ValueError):
    """Evaluation point is not on the unit circle."""


class InvalidModulus(ValueError):
    """Cyclic reduction requires a positive modulus."""


class LaurentPoly:
    """Integer Laurent polynomial in one variable t, stored sparsely.

    The zero polynomial is the empty map; stored coefficients are never
    zero.  Instances are immutable and hashable.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = coeffs
        d = {}
        for k, c in items:
            c = int(c)
            if c:
                d[int(k)] = d.get(int(k), 0) + c
                if not d[int(k)]:
                    del d[int(k)]
        self.coeffs = d
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    @classmethod
    def t(cls, k: int = 1) -> "LaurentPoly":
        return cls({k: 1})

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], lo: int = 0) -> "LaurentPoly":
        """Dense coefficient list starting at exponent `lo`."""
        return cls({lo + i: c for i, c in enumerate(coeffs)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def deg_lo(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs)

    @property
    def deg_hi(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    def degree_span(self) -> int:
        """deg_hi - deg_lo, or -1 for zero."""
        if not self.coeffs:
            return -1
        return self.deg_hi - self.deg_lo

    def __getitem__(self, k: int) -> int:
        return self.coeffs.get(k, 0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        d = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = d.get(k, 0) + c
            if s:
                d[k] = s
            elif k in d:
                del d[k]
        out = LaurentPoly.__new__(LaurentPoly)
        out.coeffs = d
        out._hash = None
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentPoly.__new__(LaurentPoly)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly.const(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero()
            out = LaurentPoly.__new__(LaurentPoly)
            out.coeffs = {k: c * other for k, c in self.coeffs.items()}
            out._hash = None
            return out
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        d = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                s = d.get(k, 0) + ca * cb
                if s:
                    d[k] = s
                elif k in d:
                    del d[k]
        out = LaurentPoly.__new__(LaurentPoly)
        out.coeffs = d
        out._hash = None
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers only for units; shift exponents instead")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t^k."""
        out = LaurentPoly.__new__(LaurentPoly)
        out.coeffs = {e + k: c for e, c in self.coeffs.items()}
        out._hash = None
        return out

    def involution(self) -> "LaurentPoly":
        """The ring involution t -> t^-1."""
        out = LaurentPoly.__new__(LaurentPoly)
        out.coeffs = {-e: c for e, c in self.coeffs.items()}
        out._hash = None
        return out

    def augmentation(self) -> int:
        """Evaluation at t = 1 (the augmentation Z[Z] -> Z)."""
        return sum(self.coeffs.values())

    def content_max(self) -> int:
        """Largest absolute coefficient (0 for the zero polynomial)."""
        if not self.coeffs:
            return 0
        return max(abs(c) for c in self.coeffs.values())

    def coeff_list(self) -> list[int]:
        """Dense coefficients from deg_lo to deg_hi; [] for zero."""
        if not self.coeffs:
            return []
        lo, hi = self.deg_lo, self.deg_hi
        out = [0] * (hi - lo + 1)
        for k, c in self.coeffs.items():
            out[k - lo] = c
        return out

    def divide_exact(self, other: "LaurentPoly") -> "LaurentPoly | None":
        """Exact quotient self / other in Z[t, t^-1], or None.

        Returns None when other does not divide self exactly (including
        non-integer quotient coefficients).  Division by zero raises.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        # anchor both at exponent zero; restore the shift at the end
        a = self.shift(-self.deg_lo).coeff_list()
        b = other.shift(-other.deg_lo).coeff_list()
        shift = self.deg_lo - other.deg_lo
        if len(a) < len(b):
            return None
        lead = b[-1]
        qlen = len(a) - len(b) + 1
        quot = [0] * qlen
        rem = list(a)
        for i in range(qlen - 1, -1, -1):
            c = rem[i + len(b) - 1]
            if c % lead:
                return None
            qc = c // lead
            quot[i] = qc
            if qc:
                for j, bc in enumerate(b):
                    rem[i + j] -= qc * bc
        if any(rem):
            return None
        return LaurentPoly.from_list(quot, lo=shift)

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        terms = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}*t")
            else:
                terms.append(f"{c}*t^{k}")
        return "LaurentPoly(" + " + ".join(terms) + ")"

    # -- serialization ------------------------------------------------

    def to_json_obj(self) -> list[list]:
        return [[k, str(self.coeffs[k])] for k in sorted(self.coeffs)]

    @classmethod
    def from_json_obj(cls, obj) -> "LaurentPoly":
        return cls({int(k): int(c) for k, c in obj})

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def loads(cls, s: str) -> "LaurentPoly":
        return cls.from_json_obj(json.loads(s))


class CycElem:
    """Element of the group ring Z[Z/q], as q big-integer coefficients."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q: int, coeffs: Iterable[int] = ()):
        if q < 1:
            raise InvalidModulus(f"modulus must be positive, got {q}")
        self.q = q
        cs = [0] * q
        for i, c in enumerate(coeffs):
            cs[i % q] += int(c)
        self.coeffs = cs

    @classmethod
    def zero(cls, q: int) -> "CycElem":
        return cls(q)

    @classmethod
    def one(cls, q: int) -> "CycElem":
        return cls(q, [1])

    @classmethod
    def t(cls, q: int, k: int = 1) -> "CycElem":
        e = cls(q)
        e.coeffs[k % q] = 1
        return e

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CycElem(self.q, [other])
        if not isinstance(other, CycElem):
            return NotImplemented
        return self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, tuple(self.coeffs)))

    def _check(self, other: "CycElem"):
        if self.q != other.q:
            raise ValueError(f"modulus mismatch: {self.q} vs {other.q}")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycElem(self.q, [other])
        self._check(other)
        return CycElem(self.q, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.q, [-a for a in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycElem(self.q, [other])
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycElem(self.q, [a * other for a in self.coeffs])
        if not isinstance(other, CycElem):
            return NotImplemented
        self._check(other)
        q = self.q
        out = [0] * q
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        k = i + j
                        if k >= q:
                            k -= q
                        out[k] += a * b
        return CycElem(q, out)

    __rmul__ = __mul__

    def involution(self) -> "CycElem":
        """Anti-automorphism sending exponent k to q - k mod q."""
        q = self.q
        out = [0] * q
        for k, c in enumerate(self.coeffs):
            out[(q - k) % q] = c
        return CycElem(q, out)

    def augmentation(self) -> int:
        return sum(self.coeffs)

    def lift(self) -> LaurentPoly:
        """Lift to the honest-polynomial representative of degree < q."""
        return LaurentPoly({k: c for k, c in enumerate(self.coeffs) if c})

    def __repr__(self):
        return f"CycElem(q={self.q}, {self.coeffs})"

    def to_json_obj(self) -> dict:
        return {"q": self.q, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json_obj(cls, obj) -> "CycElem":
        return cls(int(obj["q"]), [int(c) for c in obj["coeffs"]])


# ---------------------------------------------------------------------------
# operations


def laurent_eval(p: LaurentPoly, z: complex) -> complex:
    """Evaluate p at a point z on the unit circle.

    Uses compensated (Kahan) summation of the term values.  Raises
    NonUnitModulus when z is off the circle by more than 1e-12.
    """
    if abs(abs(z) - 1.0) > 1e-12:
        raise NonUnitModulus(f"|z| = {abs(z)!r} is not 1 within 1e-12")
    total = 0 + 0j
    comp = 0 + 0j
    for k in sorted(p.coeffs):
        term = p.coeffs[k] * _unit_power(z, k)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _unit_power(z: complex, k: int) -> complex:
    # z^k for |z| = 1; negative exponents via conjugation keeps |.|=1 exact
    if k >= 0:
        return z ** k
    return z.conjugate() ** (-k)


def reduce_mod_q(p: LaurentPoly, q: int) -> CycElem:
    """Ring morphism Z[t,t^-1] -> Z[Z/q], exponent k -> k mod q."""
    if q < 1:
        raise InvalidModulus(f"modulus must be positive, got {q}")
    out = [0] * q
    for k, c in p.coeffs.items():
        out[k % q] += c
    return CycElem(q, out)


def normalize_unit(p: LaurentPoly) -> tuple[LaurentPoly, int]:
    """Shift p by the unit t^shift so it becomes an honest polynomial
    with nonzero constant term; returns (shifted polynomial, shift).

    The zero polynomial maps to (0, 0).  Signs are left untouched.
    """
    if p.is_zero():
        return p, 0
    shift = -p.deg_lo
    return p.shift(shift), shift


def circulant_expand(c: CycElem):
    """Matrix of multiplication by c on Z[Z/q] in the exponent basis.

    Returns a q x q list-of-rows of Python ints.  The assignment
    c -> matrix is a ring homomorphism.
    """
    q = c.q
    # column j is c * t^j: entry (i, j) = coeff of t^i in c*t^j = c_{i-j mod q}
    return [[c.coeffs[(i - j) % q] for j in range(q)] for i in range(q)]


def totient(n: int) -> int:
    """Euler's totient by trial-division factorization."""
    if n < 1:
        raise ValueError("totient requires n >= 1")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


_CYCLOTOMIC_CACHE: dict[int, LaurentPoly] = {}
_CYCLOTOMIC_LOCK = threading.Lock()
CYCLOTOMIC_N_MAX = 2000


def cyclotomic(n: int) -> LaurentPoly:
    """The n-th cyclotomic polynomial, by exact recursive division.

    Phi_n = (t^n - 1) / prod_{d | n, d < n} Phi_d; results are memoized
    up to CYCLOTOMIC_N_MAX.
    """
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    if n > CYCLOTOMIC_N_MAX:
        raise ValueError(f"cyclotomic index {n} exceeds cache limit {CYCLOTOMIC_N_MAX}")
    with _CYCLOTOMIC_LOCK:
        hit = _CYCLOTOMIC_CACHE.get(n)
    if hit is not None:
        return hit
    num = LaurentPoly({n: 1, 0: -1})
    for d in range(1, n):
        if n % d == 0:
            num = num.divide_exact(cyclotomic(d))
            assert num is not None, "cyclotomic division must be exact"
    with _CYCLOTOMIC_LOCK:
        _CYCLOTOMIC_CACHE[n] = num
    return num


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]
