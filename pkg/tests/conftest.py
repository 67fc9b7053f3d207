"""Shared fixtures: standard cones and independent brute-force oracles."""

import itertools
import math
from fractions import Fraction as F

import pytest

from reebvol import Cone, PLConcave, PolarizedToricSetup
from reebvol.arith import dot


@pytest.fixture
def orthant2():
    return Cone.from_rays([[1, 0], [0, 1]])


@pytest.fixture
def orthant3():
    return Cone.from_rays([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.fixture
def a1_cone():
    return Cone.from_rays([[1, 0], [1, 2]])


@pytest.fixture
def square_base_cone():
    # non-simplicial rank-3 cone over a square
    return Cone.from_rays([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])


def min_form(*linears):
    return PLConcave.make([(l, 0) for l in linears])


def permutation_det(rows):
    """Sign-weighted permutation expansion; the independent determinant
    oracle for small sizes."""
    n = len(rows)
    total = F(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        prod = F(1)
        for i in range(n):
            prod *= F(rows[i][perm[i]])
        total += sign * prod
    return total


def brute_lattice_points(p, m):
    """Bounding-box enumeration: the independent oracle for lattice counts."""
    if not p.vertices:
        return []
    n = p.rank
    if m == 0:
        return [tuple(0 for _ in range(n))]
    scaled = [[F(x) * m for x in v] for v in p.vertices]
    los = [math.ceil(min(v[i] for v in scaled)) for i in range(n)]
    his = [math.floor(max(v[i] for v in scaled)) for i in range(n)]
    out = []
    for point in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his))):
        if all(dot(a, point) <= b * m for a, b in p.halfspaces):
            out.append(point)
    return out


def setup_for(cone, xi, psi=None, eta=None, **kw):
    return PolarizedToricSetup(cone, xi, eta=eta, psi=psi, **kw)
