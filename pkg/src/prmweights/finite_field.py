"""Arithmetic in small finite fields F_q, q = p^e <= 2^16.

Elements are plain integers in ``[0, q)``.  The integer ``v`` stands for the
polynomial ``sum(c_i * x^i)`` over F_p where ``c_i`` are the base-p digits of
``v`` (least significant digit = constant term), reduced modulo the field's
defining polynomial.  For ``e == 1`` this is just ``v mod p``.

The defining polynomial is the lexicographically least monic irreducible of
degree ``e``, coefficients compared constant term first.  Multiplication goes
through exp/log tables built from the least primitive element; for q <= 256
full addition and multiplication tables are also materialised.
"""

from __future__ import annotations

import functools
import itertools

MAX_ORDER = 1 << 16
FULL_TABLE_LIMIT = 256


class FieldError(ValueError):
    """Invalid field parameters or an undefined field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` as ``(p, e)`` with ``q == p**e``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise FieldError(f"q={q} is not a prime power")
    return p, e


# -- polynomials over F_p, coefficient lists low degree first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a modulo a monic b over F_p."""
    a = _trim(list(a))
    db = len(b) - 1
    while len(a) - 1 >= db:
        lead = a[-1]
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - lead * bc) % p
        _trim(a)
    return a


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division of a monic ``poly`` by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not _poly_rem(poly, list(low) + [1], p):
                return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree e over F_p (low degree first)."""
    for low in itertools.product(range(p), repeat=e):
        cand = list(low) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible polynomial of degree {e} over F_{p}")  # unreachable


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class FieldSpec:
    """The field F_q with q = p^e; immutable once built.

    Use :func:`field_new` rather than the constructor so that equal parameters
    share one instance.
    """

    __slots__ = (
        "p", "e", "q", "modulus", "exp_table", "log_table", "primitive",
        "add_table", "mul_table", "_neg", "_inv", "_frozen",
    )

    def __init__(self, p: int, e: int = 1) -> None:
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if e < 1:
            raise FieldError(f"extension degree e={e} must be >= 1")
        if p**e > MAX_ORDER:
            raise FieldError(f"q={p}^{e} exceeds the size limit {MAX_ORDER}")
        self.p = p
        self.e = e
        self.q = q = p**e
        self.modulus = least_irreducible(p, e)

        self.primitive = self._find_primitive()
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self._mul_raw(v, self.primitive)
        exp[q - 1:] = exp[: q - 1]
        self.exp_table = tuple(exp)
        self.log_table = tuple(log)

        self._neg = tuple(self._add_raw(0, a, -1) for a in range(q))
        self._inv = (None,) + tuple(exp[(q - 1 - log[a]) % (q - 1)] for a in range(1, q))

        self.add_table = self.mul_table = None
        if q <= FULL_TABLE_LIMIT:
            self.add_table = tuple(tuple(self._add_raw(a, b) for b in range(q)) for a in range(q))
            self.mul_table = tuple(tuple(self._mul_log(a, b) for b in range(q)) for a in range(q))
        self._frozen = True

    def __setattr__(self, name, value):
        if getattr(self, "_frozen", False):
            raise AttributeError("FieldSpec is immutable")
        object.__setattr__(self, name, value)

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, e={self.e})"

    def __reduce__(self):
        return (field_new, (self.p, self.e))

    # -- raw construction helpers -----------------------------------------

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, ds) -> int:
        v = 0
        for c in reversed(ds):
            v = v * self.p + c
        return v

    def _add_raw(self, a: int, b: int, sign: int = 1) -> int:
        if self.e == 1:
            return (a + sign * b) % self.p
        if self.p == 2:
            return a ^ b
        da, db = self._digits(a), self._digits(b)
        return self._undigits([(x + sign * y) % self.p for x, y in zip(da, db)])

    def _mul_raw(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_rem(prod, list(self.modulus), self.p)
        return self._undigits(rem + [0] * (self.e - len(rem)))

    def _find_primitive(self) -> int:
        q = self.q
        if q == 2:
            return 1
        factors = _prime_factors(q - 1)
        for g in range(2, q):
            if all(self._pow_raw(g, (q - 1) // f) != 1 for f in factors):
                return g
        raise FieldError("no primitive element")  # unreachable for a field

    def _pow_raw(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._mul_raw(result, base)
            base = self._mul_raw(base, base)
            n >>= 1
        return result

    def _mul_log(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[self.log_table[a] + self.log_table[b]]

    # -- public arithmetic -------------------------------------------------

    def _check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of F_{self.q}")

    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return self.add_table[a][b]
        self._check(a)
        self._check(b)
        return self._add_raw(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return self.mul_table[a][b]
        self._check(a)
        self._check(b)
        return self._mul_log(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        """``a**n`` with the convention ``0**0 == 1``; negative n needs a != 0."""
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0
        return self.exp_table[(self.log_table[a] * n) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "q": self.q, "modulus": list(self.modulus)}


@functools.lru_cache(maxsize=None)
def field_new(p: int, e: int = 1) -> FieldSpec:
    """Build (or fetch the cached) F_{p^e}."""
    return FieldSpec(p, e)


def field_of_order(q: int) -> FieldSpec:
    return field_new(*prime_power(q))
