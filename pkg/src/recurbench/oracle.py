"""Brute-force oracles.

This module deliberately imports nothing from the rest of the package: every
value is recomputed by plain enumeration (lattice points, word lists, carry
arithmetic, closed-form sequence formulas) so that agreement with the library
is a real cross-check.

Output conventions (shared with the tests):
  * return scans list times by absolute value, positive first, and write a
    pair as "±m" when both signs occur;
  * Z^d elements print as "(a,b)"; free-group words use a, b, ... with
    upper case for inverses and "e" for the identity;
  * sets are sorted by word length, then by that canonical text.
"""
from __future__ import annotations

import itertools
import math

LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ----------------------------------------------------------------- groups
def _parse_group(name: str):
    """'Z' -> ('Z', 1), 'Z2' -> ('Zd', 2), 'F2' -> ('F', 2)."""
    if name == "Z":
        return "Z", 1
    if name[0] == "Z" and name[1:].isdigit():
        return "Zd", int(name[1:])
    if name[0] == "F" and name[1:].isdigit():
        return "F", int(name[1:])
    raise ValueError(f"oracle groups are Z, Zd, Fk; got {name!r}")


def _reduce(word):
    out = []
    for c in word:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def _elements(kind: str, d: int, r: int):
    """All elements of length ≤ r, by explicit enumeration."""
    if kind == "Z":
        return [n for n in range(-r, r + 1)]
    if kind == "Zd":
        return [v for v in itertools.product(range(-r, r + 1), repeat=d) if sum(map(abs, v)) <= r]
    words = {()}
    letters = [i for i in range(1, d + 1)] + [-i for i in range(1, d + 1)]
    for n in range(1, r + 1):
        for w in itertools.product(letters, repeat=n):
            words.add(_reduce(w))
    return sorted(words, key=len)


def _length(kind, x) -> int:
    if kind == "Z":
        return abs(x)
    if kind == "Zd":
        return sum(map(abs, x))
    return len(x)


def _mul(kind, x, y):
    if kind == "Z":
        return x + y
    if kind == "Zd":
        return tuple(a + b for a, b in zip(x, y))
    return _reduce(x + y)


def _fmt(kind, x) -> str:
    if kind == "Z":
        return str(x)
    if kind == "Zd":
        return "(" + ",".join(map(str, x)) + ")"
    if not x:
        return "e"
    return "".join(LETTERS[c - 1] if c > 0 else LETTERS[-c - 1].upper() for c in x)


def _parse_element(kind, d, text: str):
    if kind == "Z":
        return int(text)
    if kind == "Zd":
        parts = [p for p in text.replace("(", " ").replace(")", " ").replace(",", " ").split()]
        return tuple(int(p) for p in parts)
    if text == "e":
        return ()
    return _reduce(tuple(LETTERS.index(ch.lower()) + 1 if ch.islower() else -(LETTERS.index(ch.lower()) + 1)
                         for ch in text))


def _sorted_text(kind, xs) -> list:
    return sorted((_fmt(kind, x) for x in xs), key=lambda s: (_length_of_text(kind, s), s))


def _length_of_text(kind, s: str) -> int:
    if kind == "Z":
        return abs(int(s))
    if kind == "Zd":
        return sum(abs(int(p)) for p in s.strip("()").split(","))
    return 0 if s == "e" else len(s)


def ball_count(group: str, r: int, closed: bool = False) -> int:
    kind, d = _parse_group(group)
    n = sum(1 for x in _elements(kind, d, r) if _length(kind, x) <= r)
    return n if closed else n - 1


def kset(group: str, g: str, closed: bool = False) -> list:
    """Elements of B_{|g|-1}·g (punctured) or Γ^{|g|-1}·g (closed), by products."""
    kind, d = _parse_group(group)
    g = _parse_element(kind, d, g)
    n = _length(kind, g)
    if n == 0:
        raise ValueError("K(e) is undefined")
    out = set()
    for b in _elements(kind, d, n - 1):
        if _length(kind, b) > n - 1 or (not closed and _length(kind, b) == 0):
            continue
        out.add(_mul(kind, b, g))
    return _sorted_text(kind, out)


def _sequence(kind, d, name: str, n: int):
    if kind == "Z":
        return {"forward": n, "backward": -n, "alternating": n if n % 2 == 0 else -n}[name]
    if kind == "Zd":
        base = [0] * d
        base[0] = {"forward": n, "backward": -n, "alternating": n if n % 2 == 0 else -n}[name]
        return tuple(base)
    letter = {"forward": 1, "backward": -1, "alternating": 1 if n % 2 == 0 else -1}[name]
    return (letter,) * n


def cone(group: str, name: str, R: int, count: int = 4) -> dict:
    """Lower/upper cone windows for the powers of the first generator."""
    kind, d = _parse_group(group)
    window = [x for x in _elements(kind, d, R) if _length(kind, x) <= R]
    seq = [_sequence(kind, d, name, n) for n in range(2 * R + 1, 2 * R + 1 + count)]

    def member(m, g):
        # m ∈ B_{|g|-1}·g  ⇔  m·g⁻¹ has length in 1..|g|-1
        if kind == "Z":
            inv = -g
        elif kind == "Zd":
            inv = tuple(-c for c in g)
        else:
            inv = tuple(-c for c in reversed(g))
        ln = _length(kind, _mul(kind, m, inv))
        return 1 <= ln <= _length(kind, g) - 1

    lower = [m for m in window if all(member(m, g) for g in seq)]
    upper = [m for m in window if any(member(m, g) for g in seq)]
    return {"lower": _sorted_text(kind, lower), "upper": _sorted_text(kind, upper),
            "stabilized": sorted(lower) == sorted(upper)}


# ----------------------------------------------------------------- sequences
def thue_morse(i: int) -> str:
    """Two-sided Thue–Morse point with x[i] = parity of the bit count of i for
    i ≥ 0 and x[i] = x[-i-1] for i < 0."""
    n = i if i >= 0 else -i - 1
    return str(bin(n).count("1") % 2)


def fibonacci(i: int) -> str:
    """One-sided Fibonacci word 0100101001001...: s(n) = 2 + ⌊nφ⌋ - ⌊(n+1)φ⌋, n ≥ 1."""
    n = i + 1

    def floor_phi(m):
        return (m + math.isqrt(5 * m * m)) // 2

    return str(2 + floor_phi(n) - floor_phi(n + 1))


def factor_scan(name: str, length: int, span: int = 1 << 14) -> int:
    """Number of distinct length-L words seen in a long stretch of the sequence
    (or, for the odometer, distinct length-L digit addresses along an orbit)."""
    if name == "thue-morse":
        s = "".join(thue_morse(i) for i in range(-span, span))
    elif name == "fibonacci":
        s = "".join(fibonacci(i) for i in range(span))
    elif name == "one-dot":
        s = "0" * span + "1" + "0" * span
    elif name.startswith("odometer"):
        base = int(name.split("-")[1]) if "-" in name else 2
        seen = set()
        digits = [0] * length
        for _ in range(base ** length + 1):
            seen.add(tuple(digits))
            _carry(digits, base, +1)
        return len(seen)
    else:
        raise ValueError(f"unknown sequence {name!r}")
    return len({s[i:i + length] for i in range(len(s) - length + 1)})


def _carry(digits: list, base: int, step: int) -> None:
    """Add ±1 to a digit list (least significant first), discarding overflow."""
    for i in range(len(digits)):
        digits[i] += step
        if 0 <= digits[i] < base:
            return
        digits[i] %= base


def return_scan(system: str, k: int, R: int, base: int = 2) -> list:
    """Times t with |t| ≤ R taking the base point back into its level-k cell."""
    if system == "odometer":
        out = []
        for sign in (+1, -1):
            digits = [0] * k
            for t in range(1, R + 1):
                _carry(digits, base, sign)
                if not any(digits):
                    out.append(sign * t)
        return [0] + sorted(out, key=lambda t: (abs(t), t < 0))
    if system == "one-dot":
        def x(i):
            return "1" if i == 0 else "0"
    elif system == "thue-morse":
        x = thue_morse
    else:
        raise ValueError(f"unknown system {system!r}")
    window = "".join(x(i) for i in range(-k, k + 1))
    hits = [t for t in range(-R, R + 1) if "".join(x(i + t) for i in range(-k, k + 1)) == window]
    return sorted(hits, key=lambda t: (abs(t), t < 0))


def format_returns(times: list) -> str:
    """'0,±8,±16' style (a lone sign is kept when only one side occurs)."""
    parts = []
    seen = set(times)
    done = set()
    for t in times:
        if t in done:
            continue
        if t != 0 and -t in seen:
            parts.append(f"±{abs(t)}")
            done.update((t, -t))
        else:
            parts.append(str(t))
            done.add(t)
    return ",".join(parts)


def max_gap(times: list) -> int:
    s = sorted(times)
    return max((b - a for a, b in zip(s, s[1:])), default=0)


def run(sub: str, args: list) -> str:
    """Dispatch an oracle subcommand given as text arguments."""
    flags = {a for a in args if a.startswith("--")}
    pos = [a for a in args if not a.startswith("--")]
    opts = {}
    for a in flags:
        if "=" in a:
            key, val = a[2:].split("=", 1)
            opts[key] = val
        else:
            opts[a[2:]] = True
    if sub == "ball-count":
        return str(ball_count(pos[0], int(pos[1]), closed="closed" in opts))
    if sub == "kset":
        return ",".join(kset(pos[0], pos[1], closed="closed" in opts))
    if sub == "cone":
        c = cone(pos[0], pos[1], int(pos[2]))
        return (f"lower={','.join(c['lower'])} upper={','.join(c['upper'])} "
                f"{'stabilized' if c['stabilized'] else 'unstabilized'}")
    if sub == "factor-scan":
        return str(factor_scan(pos[0], int(pos[1])))
    if sub == "return-scan":
        times = return_scan(pos[0], int(pos[1]), int(pos[2]), base=int(opts.get("base", 2)))
        if "gap" in opts:
            return str(max_gap(times))
        return format_returns(times)
    raise ValueError(f"unknown oracle subcommand {sub!r}")
