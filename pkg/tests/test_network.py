"""Combination networks, the message set and optimal-distribution atoms."""
import json
import random
from fractions import Fraction as F

import pytest

from groupcast.lattice import SetFamily, W, members, rset
from groupcast.network import (CombinationNetwork, DiamondMessageSet, InfoValuation,
                               NetworkError, capacity_sum, downset_capacity,
                               evaluate_optimal_distribution, random_network,
                               random_valuation)


def link_sum(net, pred):
    """Brute force: total capacity of links whose receiver set satisfies pred."""
    return sum((c for S, c in net.capacities.items() if pred(set(members(S)))), F(0))


def test_network_validation():
    with pytest.raises(NetworkError):
        CombinationNetwork(3, {1: 1})
    caps = {S: F(1) for S in range(1, 8)}
    caps[3] = F(-1)
    with pytest.raises(NetworkError):
        CombinationNetwork(3, caps)


def test_json_roundtrip_and_missing_links(caplog):
    net = CombinationNetwork.from_json({"K": 3, "capacities": {"1": "3/2", "23": "2"}})
    assert net.C(1) == F(3, 2) and net.C(2, 3) == 2 and net.C(1, 2, 3) == 0
    assert "missing" in caplog.text
    again = CombinationNetwork.from_json(json.loads(json.dumps(net.to_json())))
    assert again == net
    with pytest.raises(NetworkError):
        CombinationNetwork.from_json({"K": 3, "capacities": {"14": "1"}})
    with pytest.raises(NetworkError):
        CombinationNetwork.from_json({"K": 3})


def test_capacity_sum_examples():
    net = CombinationNetwork.uniform(3)
    assert capacity_sum(net, W(3, 3)) == 4
    assert capacity_sum(net, SetFamily(3, ())) == 0


def test_capacity_sum_modular():
    rng = random.Random(0)
    for _ in range(200):
        K = rng.randint(2, 5)
        net = random_network(K, rng)
        A = SetFamily(K, tuple(S for S in range(1, 1 << K) if rng.random() < 0.5))
        B = SetFamily(K, tuple(S for S in range(1, 1 << K) if rng.random() < 0.5))
        assert (capacity_sum(net, A) + capacity_sum(net, B)
                == capacity_sum(net, A | B) + capacity_sum(net, A & B))


def test_downset_capacity_examples():
    rng = random.Random(1)
    net = random_network(4, rng)
    # K=4, j=1, S={3,4}: down_{W_1}{12} = {1, 12}
    assert downset_capacity(net, 1, rset(3, 4)) == net.C(1) + net.C(1, 2)
    assert downset_capacity(net, 2, 0) == capacity_sum(net, W(2, 4))
    net3 = random_network(3, rng)
    got = downset_capacity(net3, 1, rset(2, 3), antichain=True)
    assert got == capacity_sum(net3, W(1, 3)) - net3.C(1, 2, 3)


def test_message_set_names():
    M = DiamondMessageSet(4)
    assert M.rates == ("R_1234", "R_123", "R_124", "R_12")
    assert M.split_rates[0] == "R_124>1234"
    with pytest.raises(NetworkError):
        DiamondMessageSet(2)


def test_valuation_unit_k3():
    v = evaluate_optimal_distribution(CombinationNetwork.uniform(3))
    assert v.a1 == 4 and v.a2 == 4
    assert v.a3 == 2          # C_2 + C_12
    assert v.b == (4,) and v.e == (1,) and v.f == (3,)


def test_valuation_against_brute_force():
    """Each atom is the capacity of the links left unknown after conditioning."""
    rng = random.Random(2)
    for _ in range(30):
        K = rng.randint(3, 6)
        net = random_network(K, rng)
        v = evaluate_optimal_distribution(net)
        a, b = K - 1, K
        assert v.a1 == link_sum(net, lambda S: b in S)
        assert v.a2 == link_sum(net, lambda S: a in S)
        assert v.a3 == link_sum(net, lambda S: a in S and b not in S)
        assert v.a4 == link_sum(net, lambda S: b in S and a not in S)
        for j in range(1, K - 1):
            i = j - 1
            mine = lambda S, j=j: j in S
            assert v.b[i] == link_sum(net, mine)
            # U_{~K-1} reveals links seen by K
            assert v.c[i] == link_sum(net, lambda S: mine(S) and b not in S)
            assert v.d[i] == link_sum(net, lambda S: mine(S) and a not in S)
            assert v.e[i] == link_sum(net, lambda S: mine(S) and a not in S and b not in S)
            assert v.f[i] == link_sum(net, lambda S: mine(S) and not (a in S and b in S))


def test_chain_consistency_and_symmetry_identity():
    rng = random.Random(3)
    for _ in range(50):
        net = random_network(rng.randint(3, 6), rng)
        v = evaluate_optimal_distribution(net)
        assert v.a3 <= v.a2 and v.a4 <= v.a1
        assert all(e <= f <= b for e, f, b in zip(v.e, v.f, v.b))
        assert v.a3 + v.a1 == v.a4 + v.a2


def test_zero_network():
    v = evaluate_optimal_distribution(CombinationNetwork.uniform(4, 0))
    assert all(x == 0 for x in v.scalars())


def test_valuation_swap_and_json():
    v = random_valuation(5, random.Random(4), binning=True)
    w = v.swapped()
    assert (w.a1, w.a3, w.c) == (v.a2, v.a4, v.d)
    assert w.swapped() == v
    assert InfoValuation.from_json(v.to_json()) == v
    with pytest.raises(NetworkError):
        InfoValuation.from_json({"a1": "1"})
    with pytest.raises(NetworkError):
        InfoValuation(-1, 0, 0, 0, (0,), (0,), (0,), (0,), (0,))


def test_relabel_weak_pair():
    rng = random.Random(5)
    net = random_network(4, rng)
    moved = net.with_weak_pair(1, 2)
    assert moved.C(3) == net.C(1) and moved.C(4) == net.C(2)
    assert moved.C(1) == net.C(3)
    assert moved.C(1, 3, 4) == net.C(1, 2, 3)
