import itertools
import random

import pytest

from conftest import random_matrix
from tensornet.builders.matmul import (
    bind_matmul,
    matmul_network,
    read_matmul_result,
    rect_matmul_network,
    strassen_components,
    strassen_core,
    strassen_realization,
)
from tensornet.errors import NotARealizationError
from tensornet.execution import plan_cost, run
from tensornet.fields import GF, RATIONAL
from tensornet.oracle import MatmulOracle


def test_strassen_reconstruction_all_64_positions():
    # the alpha-beta-gamma network joined on the rank mode reproduces the
    # 2x2 matrix multiplication tensor entry for entry
    core = strassen_core(RATIONAL)
    value = core.value()
    for idx in itertools.product(range(2), repeat=6):
        i1, j1, i2, j2, k1, k2 = idx
        pos = {"i1": i1, "j1": j1, "i2": i2, "j2": j2, "k1": k1, "k2": k2}
        want = 1 if (i1 == i2 and j1 == j2 and k1 == k2) else 0
        assert value.entry(pos) == want


def test_strassen_diagonal_entries():
    core = strassen_core(GF(101))
    value = core.value()
    assert value.entry({"i1": 1, "i2": 1, "j1": 0, "j2": 0, "k1": 1, "k2": 1}) == 1


def test_strassen_flattening_rank():
    from tensornet.tensor import matrix_rank

    value = strassen_core(RATIONAL).value()
    assert matrix_rank(value.flatten({"i1", "k1"})) == 4


def test_strassen_realization_base_numbers():
    from tensornet.builders.matmul import strassen_base_plan
    from tensornet.execution import amortized_cost

    snet = strassen_realization(RATIONAL)
    plan = strassen_base_plan(snet)
    assert plan_cost(snet.network, plan).max_cost == 28
    assert amortized_cost(snet, plan) == 7


def test_matmul_network_costs():
    f = GF(101)
    for n, want in ((2, 28), (4, 196), (8, 1372), (16, 9604)):
        snet, plan = matmul_network(n, f)
        report = plan_cost(snet.network, plan)
        assert report.max_cost <= want
        assert snet.meta["claimed_bound"] == want


def test_matmul_values_vs_oracle():
    f = GF(101)
    rng = random.Random(30)
    for n in (2, 3, 4, 5, 8):
        snet, plan = matmul_network(n, f)
        A, B = random_matrix(rng, f, n, n), random_matrix(rng, f, n, n)
        t, _ = run(bind_matmul(snet, A, B, f), plan)
        assert read_matmul_result(t, n, n) == MatmulOracle(n, n, n, f).evaluate([A, B])


def test_only_strassen_base_shipped():
    with pytest.raises(NotARealizationError):
        matmul_network(2, RATIONAL, c=3, d=23)


def test_rect_case_r_ge_n():
    f = GF(101)
    rng = random.Random(31)
    snet, plan = rect_matmul_network(2, 4, 2, f)
    A, B = random_matrix(rng, f, 2, 4), random_matrix(rng, f, 4, 2)
    t, report = run(bind_matmul(snet, A, B, f), plan)
    assert read_matmul_result(t, 2, 2) == MatmulOracle(2, 4, 2, f).evaluate([A, B])
    # d^k c^2 (r/n) at k=1: 7 * 4 * 2
    assert snet.meta["claimed_bound"] == 56
    assert report.max_cost <= 56


def test_rect_case_n_equals_r_reduces_to_square():
    f = GF(101)
    s_rect, p_rect = rect_matmul_network(4, 4, 4, f)
    s_sq, p_sq = matmul_network(4, f)
    assert (
        plan_cost(s_rect.network, p_rect).max_cost
        == plan_cost(s_sq.network, p_sq).max_cost
    )


def test_rect_case_r_le_n():
    f = GF(101)
    rng = random.Random(32)
    snet, plan = rect_matmul_network(4, 2, 4, f)
    A, B = random_matrix(rng, f, 4, 2), random_matrix(rng, f, 2, 4)
    t, report = run(bind_matmul(snet, A, B, f), plan)
    assert read_matmul_result(t, 4, 4) == MatmulOracle(4, 2, 4, f).evaluate([A, B])
    # d^k c^2 (n/r)^2 at k=1: 7 * 4 * 4
    assert snet.meta["claimed_bound"] == 112
    assert report.max_cost <= 112


def test_rect_three_exponent_case():
    f = GF(101)
    rng = random.Random(33)
    for (n, r, m) in ((2, 4, 8), (8, 2, 4), (3, 5, 2)):
        snet, plan = rect_matmul_network(n, r, m, f)
        A, B = random_matrix(rng, f, n, r), random_matrix(rng, f, r, m)
        t, report = run(bind_matmul(snet, A, B, f), plan)
        assert read_matmul_result(t, n, m) == MatmulOracle(n, r, m, f).evaluate([A, B])
        assert report.max_cost <= snet.meta["claimed_bound"]


def test_padding_zero_extends():
    f = RATIONAL
    snet, plan = matmul_network(3, f)
    A = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    B = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    t, _ = run(bind_matmul(snet, A, B, f), plan)
    assert read_matmul_result(t, 3, 3) == A
