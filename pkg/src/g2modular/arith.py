"""Exact arithmetic: quadratic field elements and truncated Laurent series in q."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class FieldMismatchError(ValueError):
    """Raised when elements of two different quadratic fields are combined."""


class PrecisionError(ValueError):
    """Raised when a coefficient beyond the known precision is requested."""


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class QuadRat:
    """The element ``a + b*sqrt(d)`` of Q(sqrt(d)).

    ``d = 0`` tags a plain rational. A rational value may also carry the tag of
    the field it lives in; two elements with different nonzero tags never mix.
    """

    __slots__ = ("d", "a", "b")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 0) -> None:
        a = _frac(a)
        b = _frac(b)
        if d == 1 or (d != 0 and not is_squarefree(d)):
            raise ValueError(f"d must be squarefree and different from 1, got {d}")
        if d == 0 and b != 0:
            raise ValueError("an irrational part needs a field tag d")
        self.d = d
        self.a = a
        self.b = b

    # construction helpers

    @classmethod
    def sqrt(cls, d: int) -> QuadRat:
        return cls(0, 1, d)

    @classmethod
    def w(cls, d: int) -> QuadRat:
        """Root (1 + sqrt(d))/2 of x^2 - x - (d-1)/4, for d = 1 mod 4."""
        if d % 4 != 1:
            raise ValueError(f"w_d is only defined for d = 1 mod 4, got {d}")
        return cls(Fraction(1, 2), Fraction(1, 2), d)

    @classmethod
    def coerce(cls, x, d: int = 0) -> QuadRat:
        if isinstance(x, QuadRat):
            return x
        return cls(_frac(x), 0, d)

    # field bookkeeping

    def _common(self, other: QuadRat) -> int:
        if self.d == other.d:
            return self.d
        if self.d == 0:
            return other.d
        if other.d == 0:
            return self.d
        raise FieldMismatchError(f"cannot combine elements of Q(sqrt({self.d})) and Q(sqrt({other.d}))")

    def with_field(self, d: int) -> QuadRat:
        if self.d == d:
            return self
        if self.b != 0:
            raise FieldMismatchError(f"{self} does not lie in Q(sqrt({d}))")
        return QuadRat(self.a, 0, d)

    # arithmetic

    def __add__(self, other) -> QuadRat:
        if not isinstance(other, QuadRat):
            if isinstance(other, (int, Fraction)):
                return QuadRat(self.a + other, self.b, self.d)
            return NotImplemented
        return QuadRat(self.a + other.a, self.b + other.b, self._common(other))

    __radd__ = __add__

    def __neg__(self) -> QuadRat:
        return QuadRat(-self.a, -self.b, self.d)

    def __pos__(self) -> QuadRat:
        return self

    def __sub__(self, other) -> QuadRat:
        if not isinstance(other, (QuadRat, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> QuadRat:
        return (-self) + other

    def __mul__(self, other) -> QuadRat:
        if not isinstance(other, QuadRat):
            if isinstance(other, (int, Fraction)):
                return QuadRat(self.a * other, self.b * other, self.d)
            return NotImplemented
        d = self._common(other)
        return QuadRat(
            self.a * other.a + d * self.b * other.b,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadRat:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in a quadratic field")
        return QuadRat(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other) -> QuadRat:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in a quadratic field")
            return QuadRat(self.a / other, self.b / other, self.d)
        if not isinstance(other, QuadRat):
            return NotImplemented
        self._common(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> QuadRat:
        return QuadRat.coerce(other, self.d) / self

    def __pow__(self, k: int) -> QuadRat:
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadRat(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> QuadRat:
        return QuadRat(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    def is_algebraic_integer(self) -> bool:
        if self.b == 0:
            return self.a.denominator == 1
        t = self.trace()
        n = self.norm()
        return t.denominator == 1 and n.denominator == 1

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def embeddings(self) -> tuple[complex, complex]:
        """Numerical images under both embeddings (display and bound checks only)."""
        if self.d >= 0:
            r = self.d ** 0.5
            return complex(float(self.a) + float(self.b) * r), complex(float(self.a) - float(self.b) * r)
        r = (-self.d) ** 0.5
        return complex(float(self.a), float(self.b) * r), complex(float(self.a), -float(self.b) * r)

    def abs_squared_bound(self, bound: Rational) -> bool:
        """True iff both embeddings satisfy |z|^2 <= bound (exact)."""
        bound = _frac(bound)
        if self.b == 0 or self.d < 0:
            return self.norm() <= bound if self.d < 0 else self.a * self.a <= bound
        # real field: (|a| + |b| sqrt d)^2 <= bound
        # <=> a^2 + d b^2 + 2|ab| sqrt(d) <= bound
        rest = bound - self.a * self.a - self.d * self.b * self.b
        if rest < 0:
            return False
        cross = 2 * abs(self.a * self.b)
        return cross * cross * self.d <= rest * rest

    # comparisons and hashing

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadRat):
            if self.b != other.b or self.a != other.a:
                return False
            return self.b == 0 or self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"QuadRat({self.a!s}, {self.b!s}, d={self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        root = "i" if self.d == -1 else f"sqrt({self.d})"
        b = "" if self.b == 1 else "-" if self.b == -1 else f"{self.b}*"
        if self.a == 0:
            return f"{b}{root}"
        sign = "+" if self.b > 0 else "-"
        b = "" if abs(self.b) == 1 else f"{abs(self.b)}*"
        return f"{self.a} {sign} {b}{root}"


def integer_sqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def rational_sqrt(x: Fraction) -> Fraction | None:
    x = _frac(x)
    if x < 0:
        return None
    p = integer_sqrt_exact(x.numerator)
    q = integer_sqrt_exact(x.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


def _is_zero(c) -> bool:
    return c == 0


class TruncSeries:
    """Truncated Laurent series  sum_{n=val}^{prec-1} c_n q^n + O(q^prec).

    Coefficients may be ``int``, ``Fraction`` or :class:`QuadRat`. Only the span
    from the leading to the last nonzero coefficient is stored; a series that is
    zero to its precision has ``coeffs == []`` and ``val == prec``.
    """

    __slots__ = ("val", "coeffs", "prec")

    def __init__(self, coeffs: Sequence, val: int = 0, prec: int | None = None) -> None:
        coeffs = list(coeffs)
        if prec is None:
            prec = val + len(coeffs)
        if prec < val + len(coeffs):
            coeffs = coeffs[: max(prec - val, 0)]
        k = 0
        while k < len(coeffs) and _is_zero(coeffs[k]):
            k += 1
        # trailing zeros are implicit up to prec
        end = len(coeffs)
        while end > k and _is_zero(coeffs[end - 1]):
            end -= 1
        self.coeffs = coeffs[k:end]
        self.val = val + k if self.coeffs else prec
        self.prec = prec

    @classmethod
    def from_dict(cls, terms: dict[int, object], prec: int) -> TruncSeries:
        if not terms:
            return cls([], prec, prec)
        lo = min(terms)
        lo = min(lo, prec)
        return cls([terms.get(n, 0) for n in range(lo, prec)], lo, prec)

    @classmethod
    def monomial(cls, n: int, coeff=1, prec: int | None = None) -> TruncSeries:
        if prec is None:
            prec = n + 1
        return cls([coeff], n, prec)

    @classmethod
    def exact_monomial(cls, n: int, coeff=1, prec: int = 10**6) -> TruncSeries:
        return cls([coeff], n, prec)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("series is zero to its working precision")
        return self.coeffs[0]

    def __getitem__(self, n: int):
        if n >= self.prec:
            raise PrecisionError(f"coefficient of q^{n} is beyond precision {self.prec}")
        k = n - self.val
        if k < 0 or k >= len(self.coeffs):
            return 0
        return self.coeffs[k]

    def coefficient(self, n: int):
        return self[n]

    def items(self) -> Iterable[tuple[int, object]]:
        for k, c in enumerate(self.coeffs):
            yield self.val + k, c

    def truncate(self, prec: int) -> TruncSeries:
        if prec >= self.prec:
            return self
        return TruncSeries(self.coeffs[: max(prec - self.val, 0)], self.val, prec)

    def map(self, fn) -> TruncSeries:
        return TruncSeries([fn(c) for c in self.coeffs], self.val, self.prec)

    # ring operations

    def __add__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            if self.prec <= 0 or _is_zero(other):
                return self
            other = TruncSeries([other], 0, self.prec)
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val, prec)
        out = [0] * (prec - lo)
        for n, c in self.items():
            if n < prec:
                out[n - lo] = c
        for n, c in other.items():
            if n < prec:
                out[n - lo] = out[n - lo] + c
        return TruncSeries(out, lo, prec)

    __radd__ = __add__

    def __neg__(self) -> TruncSeries:
        return TruncSeries([-c for c in self.coeffs], self.val, self.prec)

    def __sub__(self, other) -> TruncSeries:
        return self + (-other)

    def __rsub__(self, other) -> TruncSeries:
        return (-self) + other

    def scale(self, c) -> TruncSeries:
        if _is_zero(c):
            return TruncSeries([], self.prec, self.prec)
        return TruncSeries([c * x for x in self.coeffs], self.val, self.prec)

    def __mul__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        n = prec - val
        if n <= 0 or not self.coeffs or not other.coeffs:
            return TruncSeries([], prec, prec)
        a = self.coeffs[:n]
        b = other.coeffs[:n]
        out = [0] * n
        for i, ai in enumerate(a):
            if _is_zero(ai):
                continue
            lim = min(len(b), n - i)
            for j in range(lim):
                out[i + j] += ai * b[j]
        return TruncSeries(out, val, prec)

    __rmul__ = __mul__

    def inverse(self) -> TruncSeries:
        if not self.coeffs:
            raise ZeroDivisionError("series is zero to its working precision")
        rel = self.prec - self.val
        c0 = self.coeffs[0]
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        b = self.coeffs[:rel]
        out = [inv0]
        for k in range(1, rel):
            s = 0
            for j in range(1, min(k, len(b) - 1) + 1):
                s += b[j] * out[k - j]
            out.append(-s * inv0)
        return TruncSeries(out, -self.val, -self.val + rel)

    def __truediv__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            if _is_zero(other):
                raise ZeroDivisionError("division of a series by zero")
            inv = 1 / other if not isinstance(other, int) else Fraction(1, other)
            return self.scale(inv)
        if not other.coeffs:
            raise ZeroDivisionError("series is zero to its working precision")
        val = self.val - other.val
        rel = min(self.prec - self.val, other.prec - other.val)
        if rel <= 0:
            return TruncSeries([], val + rel, val + rel)
        # long division
        b = other.coeffs
        inv0 = 1 / b[0] if not isinstance(b[0], int) else Fraction(1, b[0])
        a = self.coeffs[:rel] + [0] * max(0, rel - len(self.coeffs))
        b = b[:rel]
        out = []
        for k in range(rel):
            s = a[k]
            for j in range(1, min(k, len(b) - 1) + 1):
                s -= b[j] * out[k - j]
            out.append(s * inv0)
        return TruncSeries(out, val, val + rel)

    def __rtruediv__(self, other) -> TruncSeries:
        return self.inverse().scale(other)

    def __pow__(self, k: int) -> TruncSeries:
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return TruncSeries([1], 0, self.prec - self.val)
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    def q_derivative(self) -> TruncSeries:
        """q d/dq: multiplies the coefficient of q^n by n."""
        return TruncSeries([c * (self.val + k) for k, c in enumerate(self.coeffs)], self.val, self.prec)

    def conjugate(self) -> TruncSeries:
        return self.map(lambda c: c.conjugate() if isinstance(c, QuadRat) else c)

    # comparison

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val, prec)
        return all(self[n] == other[n] for n in range(lo, prec))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        terms = []
        for n, c in self.items():
            if _is_zero(c):
                continue
            terms.append(f"({c})*q^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(q^{self.prec})"
