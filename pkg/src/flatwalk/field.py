"""Exact arithmetic in a real quadratic field Q(sqrt d) and plane vectors over it."""
import math
import re
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

_RATIONAL_TYPES = (int, Fraction, type(Q(0)))


def rational(x):
    """Convert int, Fraction, mpq, float (exactly) or 'p/q' text to the rational type."""
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            p, q = x.split("/")
            return Q(int(p), int(q))
        return Q(int(x))
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, float) and Q is not Fraction:
        return Q(Fraction(x))
    return Q(x)


def fmt_rational(x):
    x = Fraction(int(x.numerator), int(x.denominator))
    return f"{x.numerator}/{x.denominator}"


def _mk(a, b, d):
    s = object.__new__(FieldScalar)
    s.a = a
    s.b = b
    s.d = d if b else 0
    return s


class FieldScalar:
    """a + b*sqrt(d) with rational a, b; d square-free (d = 0 means rational)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        if isinstance(a, FieldScalar):
            a, b, d = a.a, a.b, a.d
        a = rational(a)
        b = rational(b)
        d = int(d)
        if d < 0:
            raise ValueError("discriminant must be non-negative")
        if d in (0, 1):
            a, b, d = a + b * (1 if d == 1 else 0), Q(0), 0
        self.a = a
        self.b = b
        self.d = d if b else 0

    # -- coercion ---------------------------------------------------------
    @staticmethod
    def lift(x):
        if isinstance(x, FieldScalar):
            return x
        if isinstance(x, _RATIONAL_TYPES):
            return _mk(rational(x), Q(0), 0)
        return NotImplemented

    def _d(self, o):
        if not self.d:
            return o.d
        if o.d and o.d != self.d:
            raise ValueError(f"mixed fields Q(sqrt {self.d}) and Q(sqrt {o.d})")
        return self.d

    # -- arithmetic -------------------------------------------------------
    def __add__(self, o):
        if isinstance(o, float):
            return float(self) + o
        if not isinstance(o, FieldScalar):
            o = FieldScalar.lift(o)
            if o is NotImplemented:
                return o
        return _mk(self.a + o.a, self.b + o.b, self._d(o))

    __radd__ = __add__

    def __neg__(self):
        return _mk(-self.a, -self.b, self.d)

    def __sub__(self, o):
        if isinstance(o, float):
            return float(self) - o
        if not isinstance(o, FieldScalar):
            o = FieldScalar.lift(o)
            if o is NotImplemented:
                return o
        return _mk(self.a - o.a, self.b - o.b, self._d(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, float):
            return float(self) * o
        if not isinstance(o, FieldScalar):
            o = FieldScalar.lift(o)
            if o is NotImplemented:
                return o
        if not o.b:
            return _mk(self.a * o.a, self.b * o.a, self.d)
        if not self.b:
            return _mk(self.a * o.a, self.a * o.b, o.d)
        d = self._d(o)
        return _mk(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def norm(self):
        """Field norm a^2 - d b^2 (rational)."""
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self):
        return _mk(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return _mk(self.a / n, -self.b / n, self.d)

    def __truediv__(self, o):
        if isinstance(o, float):
            return float(self) / o
        if not isinstance(o, FieldScalar):
            o = FieldScalar.lift(o)
            if o is NotImplemented:
                return o
        if not o.b:
            if not o.a:
                raise ZeroDivisionError("division by zero in Q(sqrt d)")
            return _mk(self.a / o.a, self.b / o.a, self.d)
        return self * o.inverse()

    def __rtruediv__(self, o):
        if isinstance(o, float):
            return o / float(self)
        return FieldScalar.lift(o) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = _mk(Q(1), Q(0), 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order ------------------------------------------------------------
    def sign(self):
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        if not b:
            return sa
        sb = (b > 0) - (b < 0)
        if sa == 0 or sa == sb:
            return sb
        return sa if a * a > b * b * self.d else sb

    def _cmp(self, o):
        if isinstance(o, float):
            f = float(self)
            return (f > o) - (f < o)
        diff = self - o
        if diff is NotImplemented:
            raise TypeError(f"cannot compare FieldScalar with {type(o).__name__}")
        return diff.sign()

    def __eq__(self, o):
        if isinstance(o, FieldScalar):
            return self.a == o.a and self.b == o.b and (not self.b or self.d == o.d)
        if isinstance(o, _RATIONAL_TYPES):
            return not self.b and self.a == o
        if isinstance(o, float):
            return not self.b and self.a == o
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        if not self.b:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def floor(self):
        f = math.floor(float(self))
        while self < f:
            f -= 1
        while self >= f + 1:
            f += 1
        return f

    def is_rational(self):
        return not self.b

    def is_integer(self):
        return not self.b and self.a.denominator == 1

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return int(self.a)

    def __repr__(self):
        if not self.b:
            return f"FieldScalar({fmt_rational(self.a)})"
        return f"FieldScalar({fmt_rational(self.a)} + {fmt_rational(self.b)}*sqrt{self.d})"

    def __str__(self):
        if not self.b:
            return fmt_rational(self.a)
        return f"{fmt_rational(self.a)}+{fmt_rational(self.b)}r{self.d}"


def F(a=0, b=0, d=0):
    return FieldScalar(a, b, d)


_SCALAR_RE = re.compile(r"^\s*([+-]?[0-9/]+)?\s*(?:([+-])\s*([0-9/]*)\s*\*?\s*(?:r|sqrt\(?)\s*([0-9]+)\)?)?\s*$")


def parse_scalar(text):
    """Parse 'p/q', 'a+br d' or 'a + b*sqrt(d)' (the format written by str())."""
    text = text.strip().replace("+-", "-").replace("-+", "-")
    if text.startswith(("r", "sqrt")):
        text = "0+" + text
    m = _SCALAR_RE.match(text)
    if not m or (m.group(1) is None and m.group(4) is None):
        raise ValueError(f"cannot parse field element {text!r}")
    a = rational(m.group(1)) if m.group(1) else Q(0)
    if m.group(4) is None:
        return FieldScalar(a)
    b = rational(m.group(3)) if m.group(3) else Q(1)
    if m.group(2) == "-":
        b = -b
    return FieldScalar(a, b, int(m.group(4)))


def surd(d):
    """sqrt(d) as a field element."""
    return FieldScalar(0, 1, d)


ZERO = FieldScalar(0)
ONE = FieldScalar(1)


def to_field(x):
    """Lift ints/rationals to FieldScalar; leave FieldScalar alone; None for anything else."""
    if isinstance(x, FieldScalar):
        return x
    if isinstance(x, _RATIONAL_TYPES):
        return FieldScalar(x)
    return None


def sgn(x, tol=0.0):
    """Exact sign for field elements; tolerance-based sign for floats."""
    if isinstance(x, FieldScalar):
        return x.sign()
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def field_sqrt(x, d=None):
    """Exact square root inside the same field when it exists, else None.

    A rational x carries no discriminant, so pass ``d`` to also try sqrt(x / d) * sqrt(d).
    """
    x = FieldScalar.lift(x)
    if x.sign() < 0:
        return None
    if not x.b:
        r = _rational_sqrt(x.a)
        if r is not None:
            return FieldScalar(r)
        if d and d > 1:
            r = _rational_sqrt(x.a / d)
            if r is not None:
                return FieldScalar(0, r, d)
        return None
    # (p + q sqrt d)^2 = p^2 + d q^2 + 2pq sqrt d
    n = x.norm()
    rn = _rational_sqrt(n)
    if rn is None:
        return None
    for s in (rn, -rn):
        p2 = (x.a + s) / 2
        rp = _rational_sqrt(p2)
        if rp is None or not rp:
            continue
        q = x.b / (2 * rp)
        cand = FieldScalar(rp, q, x.d)
        if cand * cand == x:
            return abs(cand)
    return None


def _rational_sqrt(r):
    if r < 0:
        return None
    num, den = int(r.numerator), int(r.denominator)
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn == num and sd * sd == den:
        return Q(sn, sd)
    return None


class Vec:
    """Plane vector with FieldScalar (or float) coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = x
        self.y = y

    def __add__(self, o):
        return Vec(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return Vec(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return Vec(-self.x, -self.y)

    def scale(self, s):
        return Vec(self.x * s, self.y * s)

    def __eq__(self, o):
        return isinstance(o, Vec) and self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Vec({self.x}, {self.y})"

    def to_float(self):
        return (float(self.x), float(self.y))

    def is_zero(self):
        return not self.x and not self.y


def cross(u, v):
    return u.x * v.y - u.y * v.x


def dot(u, v):
    return u.x * v.x + u.y * v.y


def norm2(u):
    return u.x * u.x + u.y * u.y


def vlen(u):
    return math.hypot(float(u.x), float(u.y))


def angle(u):
    """Angle in [0, 2pi) as a float (for sorting only)."""
    a = math.atan2(float(u.y), float(u.x))
    return a + 2 * math.pi if a < 0 else a


def mat_vec(m, v):
    (a, b), (c, d) = m
    return Vec(a * v.x + b * v.y, c * v.x + d * v.y)


def mat_mul(m, n):
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mat_det(m):
    (a, b), (c, d) = m
    return a * d - b * c


def mat_inv(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def field_of(values):
    """Common discriminant of a collection of FieldScalars (0 if all rational)."""
    d = 0
    for v in values:
        if isinstance(v, FieldScalar) and v.d:
            if d and v.d != d:
                raise ValueError(f"mixed discriminants {d} and {v.d}")
            d = v.d
    return d
