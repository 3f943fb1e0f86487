import random

import pytest

from tensornet.builders.fourier import (
    bind_fft,
    bits_to_vector,
    convolution_network,
    fft_network,
    read_fft_result,
    vector_to_bits,
    wht_network,
    yates_network,
)
from tensornet.errors import CharacteristicTwoError, NoRootError
from tensornet.execution import plan_cost, run
from tensornet.fields import GF, RATIONAL
from tensornet.oracle import ConvolutionOracle, DftOracle


def test_phi_k1_gf5():
    # Phi = [[1,1],[1,rho]] with rho = 4 the primitive square root in GF(5)
    f = GF(5)
    got = DftOracle(1, f).phi()
    assert got == [[1, 1], [1, 4]]
    # fft_network(1, GF(5)) realize-checks against exactly this matrix
    fft_network(1, f)


def test_fft_impulse_all_ones():
    f = GF(17)
    snet, plan = fft_network(3, f)
    t, _ = run(bind_fft(snet, [1, 0, 0, 0, 0, 0, 0, 0], f), plan)
    assert read_fft_result(snet, t) == [1] * 8


def test_fft_sweep_cost_exact():
    f = GF(65537)
    for k in range(1, 9):
        snet, plan = fft_network(k, f)
        assert plan_cost(snet.network, plan).max_cost == 2 ** (k + 1)


def test_fft_matches_oracle():
    f = GF(65537)
    rng = random.Random(40)
    for k in range(1, 7):
        snet, plan = fft_network(k, f)
        x = [f.random(rng) for _ in range(2**k)]
        t, _ = run(bind_fft(snet, x, f), plan)
        assert read_fft_result(snet, t) == DftOracle(k, f).evaluate([x])


def test_fft_needs_a_root():
    with pytest.raises(NoRootError):
        fft_network(2, RATIONAL)  # no primitive 4th root in Q


def test_wht_equals_fft_without_twiddles():
    f = RATIONAL
    snet, plan = wht_network(3, f)
    t, rep = run(bind_fft(snet, [1, 0, 0, 0, 0, 0, 0, 0], f), plan)
    assert read_fft_result(snet, t) == [1] * 8
    assert rep.max_cost == 16


def test_wht_matches_popcount_formula():
    f = RATIONAL
    rng = random.Random(41)
    for k in (2, 4):
        snet, plan = wht_network(k, f)
        x = [f.random(rng) for _ in range(2**k)]
        t, _ = run(bind_fft(snet, x, f), plan)
        got = read_fft_result(snet, t)
        want = []
        for i in range(2**k):
            acc = f.zero
            for j in range(2**k):
                sign = -1 if bin(i & j).count("1") % 2 else 1
                acc = f.add(acc, f.mul(f.coerce(sign), x[j]))
            want.append(acc)
        assert got == want


def test_convolution_identity_element():
    f = GF(17)
    for group in ("cyclic", "xor"):
        snet, plan = convolution_network(1, f, group)
        xf = vector_to_bits([1, 0], sorted(snet.socket_modes(0)), f)
        xg = vector_to_bits([0, 1], sorted(snet.socket_modes(1)), f)
        t, _ = run(snet.bind([xf, xg]), plan)
        assert bits_to_vector(t, [m.id for m in snet.spec.output_socket]) == [0, 1]


def test_convolution_matches_oracles():
    f = GF(65537)  # primitive 2^k-th roots for every k <= 16
    rng = random.Random(42)
    for group in ("cyclic", "xor"):
        for k in range(1, 6):
            snet, plan = convolution_network(k, f, group)
            vf = [f.random(rng) for _ in range(2**k)]
            vg = [f.random(rng) for _ in range(2**k)]
            xf = vector_to_bits(vf, sorted(snet.socket_modes(0)), f)
            xg = vector_to_bits(vg, sorted(snet.socket_modes(1)), f)
            t, rep = run(snet.bind([xf, xg]), plan)
            got = bits_to_vector(t, [m.id for m in snet.spec.output_socket])
            assert got == ConvolutionOracle(k, f, group).evaluate([vf, vg])
            assert rep.max_cost == 2 ** (k + 1)


def test_convolution_xor_over_rationals():
    f = RATIONAL
    snet, plan = convolution_network(2, f, "xor")
    vf, vg = [1, 2, 3, 4], [1, 0, 0, 1]
    xf = vector_to_bits(vf, sorted(snet.socket_modes(0)), f)
    xg = vector_to_bits(vg, sorted(snet.socket_modes(1)), f)
    t, _ = run(snet.bind([xf, xg]), plan)
    got = bits_to_vector(t, [m.id for m in snet.spec.output_socket])
    assert got == ConvolutionOracle(2, f, "xor").evaluate([vf, vg])


def test_convolution_refuses_characteristic_two():
    with pytest.raises(CharacteristicTwoError):
        convolution_network(2, GF(2), "xor")


def test_zeta_of_empty_set_indicator():
    f = RATIONAL
    snet, plan = yates_network([[1, 1], [0, 1]], 2, f)
    x = vector_to_bits([1, 0, 0, 0], sorted(snet.socket_modes(0)), f)
    t, _ = run(snet.bind([x]), plan)
    got = bits_to_vector(t, sorted(m.id for m in snet.spec.output_socket))
    assert got == [1, 1, 1, 1]


def test_mobius_inverts_zeta():
    f = RATIONAL
    rng = random.Random(43)
    k = 3
    zeta, zplan = yates_network([[1, 1], [0, 1]], k, f)
    mobius, mplan = yates_network([[1, -1], [0, 1]], k, f)
    x = [f.random(rng) for _ in range(2**k)]
    t, _ = run(zeta.bind([vector_to_bits(x, sorted(zeta.socket_modes(0)), f)]), zplan)
    zx = bits_to_vector(t, sorted(m.id for m in zeta.spec.output_socket))
    t2, _ = run(
        mobius.bind([vector_to_bits(zx, sorted(mobius.socket_modes(0)), f)]), mplan
    )
    assert bits_to_vector(t2, sorted(m.id for m in mobius.spec.output_socket)) == x


def test_hadamard_power_equals_wht():
    f = RATIONAL
    k = 3
    yn, yplan = yates_network([[1, 1], [1, -1]], k, f)
    wn, wplan = wht_network(k, f)
    x = [1, 0, 0, 0, 0, 0, 0, 0]
    t1, _ = run(yn.bind([vector_to_bits(x, sorted(yn.socket_modes(0)), f)]), yplan)
    got1 = bits_to_vector(t1, sorted(m.id for m in yn.spec.output_socket))
    t2, _ = run(bind_fft(wn, x, f), wplan)
    assert got1 == read_fft_result(wn, t2) == [1] * 8


def test_yates_cost_bound():
    f = RATIONAL
    for k in (1, 3, 5):
        snet, plan = yates_network([[1, 1], [0, 1]], k, f)
        assert plan_cost(snet.network, plan).max_cost <= snet.meta["claimed_bound"]
        assert snet.meta["claimed_bound"] == 2 ** (k - 1) * 4
