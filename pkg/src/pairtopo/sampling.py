"""Seeded generators for points of the model field."""
from __future__ import annotations

import random
from fractions import Fraction

from .difffield import OmegaElement


def rng_from(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_rational(rng, height=10):
    num = rng.randint(-height, height)
    den = rng.randint(1, max(1, height // 3))
    return Fraction(num, den)


def random_omega(rng, max_order=3, height=10, terms=3, rational_function=0.15):
    """A random element: a small polynomial in t0..t_max_order, sometimes a quotient."""
    def poly():
        out = OmegaElement(0)
        for _ in range(rng.randint(1, terms)):
            c = rng.randint(-height, height) or 1
            mono = OmegaElement(c)
            for _ in range(rng.randint(0, 2)):
                mono = mono * OmegaElement.t(rng.randint(0, max_order))
            out = out + mono
        return out

    a = poly()
    if rng.random() < rational_function:
        d = poly()
        if d != 0:
            a = a / d
    return a


def random_value(rng, max_order=3, height=10):
    """Mixture: zero, rationals, single t_i, random elements."""
    r = rng.random()
    if r < 0.1:
        return OmegaElement(0)
    if r < 0.35:
        return OmegaElement(random_rational(rng, height))
    if r < 0.55:
        return OmegaElement.t(rng.randint(0, max_order))
    return random_omega(rng, max_order, height)


def random_point(rng, n, max_order=3, height=10):
    """A random point; some points are built with planted linear relations."""
    r = rng.random()
    if n >= 2 and r < 0.25:
        base = [random_value(rng, max_order, height) for _ in range(n - 1)]
        combo = OmegaElement(0)
        for b in base:
            combo = combo + b * random_rational(rng, 5)
        pt = base + [combo]
        rng.shuffle(pt)
        return tuple(pt)
    if r < 0.35:
        return tuple(OmegaElement(random_rational(rng, height)) for _ in range(n))
    return tuple(random_value(rng, max_order, height) for _ in range(n))


def generic_point(n, offset=0):
    return tuple(OmegaElement.t(offset + i) for i in range(n))


def point_pool(n, count, seed=0, max_order=3, height=10):
    rng = rng_from(seed)
    return [random_point(rng, n, max_order, height) for _ in range(count)]
