"""Arithmetic on naturals and the coding functions built from it.

Every function here is total on non-negative integers: division and
remainder by zero follow the usual arithmetisation convention
(``div(x, 0) = 0``, ``rem(x, 0) = x``).
"""
from __future__ import annotations

import math
from functools import lru_cache, reduce
from typing import Iterable, Sequence


def _check(*xs: int) -> None:
    for x in xs:
        if x < 0:
            raise ValueError(f"naturals only, got {x}")


def div(x: int, y: int) -> int:
    _check(x, y)
    return 0 if y == 0 else x // y


def rem(x: int, y: int) -> int:
    _check(x, y)
    return x if y == 0 else x % y


def monus(x: int, y: int) -> int:
    _check(x, y)
    return x - y if y <= x else 0


def isqrt(x: int) -> int:
    _check(x)
    return math.isqrt(x)


def pair(x: int, y: int) -> int:
    """Cantor pairing ``(x+y+1)(x+y)/2 + y``."""
    _check(x, y)
    s = x + y
    return (s + 1) * s // 2 + y


@lru_cache(maxsize=1 << 16)
def unpair(z: int) -> tuple[int, int]:
    """Inverse of :func:`pair`.

    With ``t = T1(z)`` the diagonal index and ``T2(z) = 2z - t*t``, the
    second component is ``(T2 - t) / 2`` and the first is ``t`` minus it.
    """
    _check(z)
    t = div(isqrt(8 * z + 1) + 1, 2) - 1
    t2 = 2 * z - t * t
    y = div(monus(t2, t), 2)
    return monus(t, y), y


def left(z: int) -> int:
    return unpair(z)[0]


def right(z: int) -> int:
    return unpair(z)[1]


def beta(w: int, i: int) -> int:
    """The extended beta function ``rem(L(w), R(w)*(i+1) + 1)``."""
    _check(i)
    a, b = unpair(w)
    return rem(a, b * (i + 1) + 1)


def pack_vec(v: Sequence[int]) -> int:
    """``<x1, <x2, ... xn>>``; a 1-tuple is the value itself."""
    if not v:
        raise ValueError("cannot pack an empty vector")
    out = v[-1]
    for x in reversed(v[:-1]):
        out = pair(x, out)
    return out


def unpack_vec(z: int, n: int) -> list[int]:
    if n < 1:
        raise ValueError("arity must be positive")
    out = []
    for _ in range(n - 1):
        a, z = unpair(z)
        out.append(a)
    out.append(z)
    return out


def crt(residues: Iterable[tuple[int, int]]) -> int:
    """Least ``x`` with ``x = r (mod m)`` for every ``(r, m)``.

    Raises ``ValueError`` when two moduli share a factor.
    """
    x, mod = 0, 1
    for r, m in residues:
        _check(r, m)
        if m == 0 or r >= m:
            raise ValueError(f"residue {r} out of range for modulus {m}")
        if math.gcd(mod, m) != 1:
            raise ValueError(f"modulus {m} is not coprime to the others")
        # x + mod*k = r (mod m)
        k = (r - x) * pow(mod, -1, m) % m
        x += mod * k
        mod *= m
    return x


def _lcm_upto(n: int) -> int:
    return reduce(math.lcm, range(1, n + 1), 1)


def encode_seq(a: Sequence[int], method: str = "lcm") -> int:
    """A code ``w`` with ``beta(w, i) == a[i]`` for every ``i < len(a)``.

    The moduli are ``s*(i+1) + 1``.  They are pairwise coprime as soon as
    every prime ``<= len(a)`` divides ``s``, and each exceeds ``a[i]`` once
    ``s >= max(a)``.  ``method="factorial"`` takes the classical
    ``s = max(len(a), max(a))!``; the default takes the least multiple of
    ``lcm(1..len(a))`` that is ``>= max(a)``, which keeps codes small
    enough to nest.
    """
    if not a:
        raise ValueError("cannot encode an empty sequence")
    _check(*a)
    n = len(a)
    if method == "factorial":
        s = math.factorial(max(n, max(a)))
    elif method == "lcm":
        step = _lcm_upto(n)
        s = max(step, -(-max(a) // step) * step)
    else:
        raise ValueError(f"unknown method {method!r}")
    c = crt((x, s * (i + 1) + 1) for i, x in enumerate(a))
    return pair(c, s)


def decode_seq(w: int, n: int) -> list[int]:
    return [beta(w, i) for i in range(n)]


def extend_seq(w: int, z: int, x: int, method: str = "lcm") -> int:
    """A code agreeing with ``w`` below ``z`` and holding ``x`` at ``z``."""
    return encode_seq([beta(w, i) for i in range(z)] + [x], method)
