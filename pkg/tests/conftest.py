import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from torich import (
    LatticeContext,
    build_fan,
    whole_fan_star,
    skeleton_star_set,
    star_closure,
    cartier_from_divisor,
)

SCENES = os.path.join(os.path.dirname(__file__), os.pardir, "scenes")


def scene_path(name):
    return os.path.abspath(os.path.join(SCENES, name + ".json"))


@pytest.fixture(scope="session")
def L1():
    return LatticeContext(1)


@pytest.fixture(scope="session")
def L2():
    return LatticeContext(2)


@pytest.fixture(scope="session")
def L3():
    return LatticeContext(3)


@pytest.fixture(scope="session")
def p1_fan(L1):
    return build_fan(L1, [[(1,)], [(-1,)]])


@pytest.fixture(scope="session")
def p2_fan(L2):
    return build_fan(L2, [[(1, 0), (0, 1)], [(0, 1), (-1, -1)], [(1, 0), (-1, -1)]])


@pytest.fixture(scope="session")
def tri_star(p2_fan):
    star, _ = skeleton_star_set(p2_fan, 1)
    return star


@pytest.fixture(scope="session")
def pxp_fan(L2):
    return build_fan(
        L2,
        [[(1, 0), (0, 1)], [(1, 0), (0, -1)], [(-1, 0), (0, 1)], [(-1, 0), (0, -1)]],
    )


@pytest.fixture(scope="session")
def boundary_star(pxp_fan):
    star, _ = skeleton_star_set(pxp_fan, 1)
    return star


@pytest.fixture(scope="session")
def p3_fan(L3):
    return build_fan(
        L3,
        [
            [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
            [(1, 0, 0), (0, 1, 0), (-1, -1, -1)],
            [(1, 0, 0), (0, 0, 1), (-1, -1, -1)],
            [(0, 1, 0), (0, 0, 1), (-1, -1, -1)],
        ],
    )


@pytest.fixture(scope="session")
def mixed_star(p3_fan):
    seeds = [
        p3_fan.cone_id(((0, 1, 0), (1, 0, 0))),
        p3_fan.cone_id(((0, 0, 1),)),
    ]
    return star_closure(p3_fan, seeds)


@pytest.fixture(scope="session")
def a3_fan(L3):
    return build_fan(L3, [[(1, 0, 0), (0, 1, 0), (0, 0, 1)]])


@pytest.fixture(scope="session")
def a3_star(a3_fan):
    seeds = [
        a3_fan.cone_id(((0, 1, 0), (1, 0, 0))),
        a3_fan.cone_id(((0, 0, 1),)),
    ]
    return star_closure(a3_fan, seeds)


@pytest.fixture(scope="session")
def p112_fan(L2):
    return build_fan(L2, [[(1, 0), (0, 1)], [(0, 1), (-1, -2)], [(1, 0), (-1, -2)]])


@pytest.fixture(scope="session")
def blowup_fan(L2):
    return build_fan(
        L2,
        [[(1, 0), (1, 1)], [(1, 1), (0, 1)], [(0, 1), (-1, -1)], [(-1, -1), (1, 0)]],
    )


@pytest.fixture(scope="session")
def o1_p2(p2_fan):
    return cartier_from_divisor(p2_fan, {(1, 0): 1, (0, 1): 0, (-1, -1): 0})


@pytest.fixture(scope="session")
def o11_pxp(pxp_fan):
    return cartier_from_divisor(
        pxp_fan, {(1, 0): 1, (-1, 0): 0, (0, 1): 1, (0, -1): 0}
    )


@pytest.fixture(scope="session")
def whole_p2(p2_fan):
    return whole_fan_star(p2_fan)
