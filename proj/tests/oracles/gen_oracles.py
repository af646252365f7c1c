#!/usr/bin/env python3
"""Regenerates oracles.json with sympy. The C++ tests read the frozen output only."""

import itertools
import json
import random
from pathlib import Path

import sympy as sp

SEED = 20240611
CAP = 6
OUT = Path(__file__).with_name("oracles.json")


def symbols(n):
    return sp.symbols(" ".join(f"x{i + 1}" for i in range(n)))


def fmt(expr, xs):
    """Polynomial literal accepted by the C++ parser."""
    expr = sp.expand(expr)
    if expr == 0:
        return "0"
    poly = sp.Poly(expr, *xs)
    parts = []
    for exps, c in sorted(poly.terms()):
        mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(exps) if e)
        c = sp.Rational(c)
        sign = "-" if c < 0 else "+"
        parts.append((sign, f"{abs(c)}*{mono}" if mono else f"{abs(c)}"))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return text + "".join(f" {sign} {body}" for sign, body in parts[1:])


def truncate(expr, xs, cap):
    expr = sp.expand(expr)
    if expr == 0:
        return sp.Integer(0)
    poly = sp.Poly(expr, *xs)
    return sum((c * sp.prod([x**e for x, e in zip(xs, exps)]) for exps, c in poly.terms() if sum(exps) <= cap),
               sp.Integer(0))


def rand_poly(rng, xs, max_deg, terms):
    out = sp.Integer(0)
    for _ in range(terms):
        deg = rng.randint(0, max_deg)
        exps = [0] * len(xs)
        for _ in range(deg):
            exps[rng.randrange(len(xs))] += 1
        c = sp.Rational(rng.randint(-9, 9), rng.randint(1, 5))
        out += c * sp.prod([x**e for x, e in zip(xs, exps)])
    return sp.expand(out)


def rand_field(rng, xs, max_deg=2, terms=2):
    return [rand_poly(rng, xs, max_deg, terms) for _ in xs]


def apply(f, a, xs):
    return sp.expand(sum(fj * sp.diff(a, x) for fj, x in zip(f, xs)))


def bracket(f, g, xs):
    return [sp.expand(apply(f, gj, xs) - apply(g, fj, xs)) for fj, gj in zip(f, g)]


def vf(f, xs, cap=CAP):
    return [fmt(truncate(c, xs, cap), xs) for c in f]


def derive_cases(rng):
    cases = []
    for _ in range(30):
        n = rng.randint(1, 4)
        xs = symbols(n) if n > 1 else (sp.Symbol("x1"),)
        p = rand_poly(rng, xs, 7, 5)
        axis = rng.randrange(n)
        cases.append({"n": n, "p": fmt(truncate(p, xs, CAP), xs), "axis": axis,
                      "d": fmt(truncate(sp.diff(truncate(p, xs, CAP), xs[axis]), xs, CAP), xs)})
    return cases


def bracket_cases(rng):
    cases = []
    for _ in range(40):
        n = rng.randint(2, 4)
        xs = symbols(n)
        f, g = rand_field(rng, xs, 3, 3), rand_field(rng, xs, 3, 3)
        cases.append({"n": n, "f": vf(f, xs), "g": vf(g, xs), "fg": vf(bracket(f, g, xs), xs)})
    return cases


def ad_cases(rng):
    cases = []
    for _ in range(15):
        n = rng.randint(2, 3)
        xs = symbols(n)
        f0, f = rand_field(rng, xs, 2, 2), rand_field(rng, xs, 2, 2)
        L = 3
        coeffs, cur = [], f
        for l in range(L + 1):
            coeffs.append(vf([c / sp.factorial(l) for c in cur], xs))
            cur = [truncate(c, xs, CAP) for c in bracket(f0, cur, xs)]
        cases.append({"n": n, "f0": vf(f0, xs), "f": vf(f, xs), "L": L, "coefficients": coeffs})
    return cases


def eval_cases(rng):
    cases = []
    for _ in range(20):
        n = rng.randint(1, 4)
        xs = symbols(n) if n > 1 else (sp.Symbol("x1"),)
        f = rand_field(rng, xs, 5, 4)
        pt = [sp.Rational(rng.randint(-20, 20), rng.randint(1, 8)) for _ in xs]
        val = [sp.Rational(truncate(c, xs, CAP).subs(dict(zip(xs, pt)))) for c in f]
        cases.append({"n": n, "f": vf(f, xs), "x": [str(v) for v in pt], "value": [str(v) for v in val]})
    return cases


def words(m, length):
    return list(itertools.product(range(m), repeat=length))


def word_field(fields, word, xs):
    cur = fields[word[-1]]
    for i in reversed(word[:-1]):
        cur = bracket(fields[i], cur, xs)
    return cur


def growth(fields, q, xs, r_max):
    vecs, out = [], []
    for length in range(1, r_max + 1):
        for w in words(len(fields), length):
            v = [sp.Rational(c.subs(dict(zip(xs, q)))) for c in word_field(fields, w, xs)]
            vecs.append(v)
        rank = sp.Matrix(vecs).rank()
        out.append(rank)
        if rank == len(xs):
            return out
    return None


def flag_cases(rng):
    cases = []
    xs = symbols(3)
    while len(cases) < 12:
        fields = [[sp.Integer(1), sp.Integer(0), sp.Integer(0)],
                  [rand_poly(rng, xs, 1, 1), sp.Integer(1), rand_poly(rng, xs, 2, 2)]]
        q = [sp.Rational(rng.randint(-3, 3), rng.randint(1, 3)) for _ in xs]
        g = growth(fields, q, xs, 4)
        cases.append({"n": 3, "fields": [vf(f, xs) for f in fields], "q": [str(v) for v in q], "growth": g})
    return cases


def order_of(a, fields, xs, depth):
    """Smallest s with a nonzero length-s derivative at 0."""
    level = [a]
    for s in range(depth + 1):
        if any(sp.expand(p).subs({x: 0 for x in xs}) != 0 for p in level):
            return s
        level = [apply(f, p, xs) for p in level for f in fields]
    return None


def order_cases(rng):
    xs = symbols(3)
    x, y, z = xs
    heis = [[sp.Integer(1), sp.Integer(0), sp.Integer(0)], [sp.Integer(0), sp.Integer(1), x]]
    cases = []
    for _ in range(25):
        a = rand_poly(rng, xs, 3, 3)
        cases.append({"n": 3, "fields": [vf(f, xs) for f in heis], "a": fmt(a, xs), "order": order_of(a, heis, xs, 6)})
    return cases


def main():
    rng = random.Random(SEED)
    data = {
        "generator": "sympy " + sp.__version__,
        "seed": SEED,
        "cap": CAP,
        "derive": derive_cases(rng),
        "bracket": bracket_cases(rng),
        "ad_series": ad_cases(rng),
        "evaluate": eval_cases(rng),
        "growth": flag_cases(rng),
        "order": order_cases(rng),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
