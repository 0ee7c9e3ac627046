import random
from collections import Counter

import pytest

from multipir.field import make_field
from multipir.gflinalg import InconsistentSystemError, SingularSystemError
from multipir.localdecode import LineDecodingError
from multipir.mpoly import random_poly
from multipir.multcode import encode, hyperplane_of, index_point, make_params
from multipir.pir import (
    ByzantineMode,
    ProtocolError,
    answer,
    corrupt_answers,
    gen_queries,
    preprocess,
    reconstruct,
    retrieve_record,
)
from multipir.transport import InProcessTransport, ShareServer


@pytest.fixture(scope="module")
def small_setup():
    gf4 = make_field(2, 2)
    params = make_params(gf4, 3, 2, 5)
    F = random_poly(gf4, 3, 5, random.Random(11))
    return params, F, encode(params, F), preprocess(params, F)


def test_preprocess_storage_accounting(gf16, rng):
    params = make_params(gf16, 2, 2, 29)
    F = random_poly(gf16, 2, 29, rng)
    shares = preprocess(params, F)
    assert len(shares) == 16
    # per server: q^{m-1} tuples = sigma*q^{m-1} = k/(Rq) field elements
    assert all(len(s.symbols) == 16 for s in shares)
    per_server_elements = 16 * params.sigma
    assert per_server_elements == 48 == params.k / (params.rate * params.q)
    # across all servers: sigma*q^m elements, i.e. a 1/R blowup of k
    total_elements = sum(len(s.symbols) * params.sigma for s in shares)
    assert total_elements == params.sigma * params.n == 768
    assert total_elements == params.k / params.rate


def test_gen_queries_batch_invariants(small_setup, rng):
    params, F, cw, shares = small_setup
    for _ in range(50):
        j = rng.randrange(params.n)
        plan = gen_queries(params, j, rng)
        target = index_point(params, j)
        assert plan.hiding_index == hyperplane_of(params, target)
        for ell in range(params.q):
            batch = plan.batches[ell]
            assert len(batch) == params.sigma
            assert len(set(batch)) == params.sigma
            assert all(hyperplane_of(params, pt) == ell for pt in batch)
            if ell != plan.hiding_index:
                assert target not in batch


def test_gen_queries_deterministic_under_seed(small_setup):
    params, F, cw, shares = small_setup
    a = gen_queries(params, 9, random.Random(123))
    b = gen_queries(params, 9, random.Random(123))
    assert a.batches == b.batches and a.directions == b.directions and a.perms == b.perms


def test_answer_is_share_lookup(small_setup):
    params, F, cw, shares = small_setup
    plan = gen_queries(params, 17, random.Random(5))
    ell = (plan.hiding_index + 1) % params.q
    got = answer(shares[ell], plan.batches[ell])
    from multipir.multcode import point_index

    for pt, tup in zip(plan.batches[ell], got):
        assert tup == cw.symbols[point_index(params, pt)]
        assert len(tup) == params.sigma


def test_answer_rejects_foreign_points(small_setup):
    params, F, cw, shares = small_setup
    inside = [pt for pt in map(lambda i: index_point(params, i), range(16))]
    with pytest.raises(ProtocolError):
        answer(shares[1], inside[: params.sigma])  # hyperplane 0 points
    with pytest.raises(ProtocolError):
        answer(shares[0], inside[:2])  # wrong count


def test_corrupt_answers_preserve_shape(small_setup, rng):
    params, F, cw, shares = small_setup
    honest = answer(shares[0], gen_queries(params, 1, rng).batches[0])
    for mode in ByzantineMode:
        got = corrupt_answers(params, honest, mode, rng)
        assert len(got) == params.sigma
        assert all(len(t) == params.sigma for t in got)
        if mode is ByzantineMode.HONEST:
            assert got == honest


def test_reconstruct_discards_hiding_server(small_setup, rng):
    params, F, cw, shares = small_setup
    servers = [ShareServer(s) for s in shares]
    transport = InProcessTransport(servers)
    for _ in range(30):
        j = rng.randrange(params.n)
        plan = gen_queries(params, j, rng)
        answers, _ = transport.fanout(plan)
        # garbage from the hiding server must not matter: it is discarded
        answers[plan.hiding_index] = [
            tuple(rng.randrange(4) for _ in range(params.sigma))
            for _ in range(params.sigma)
        ]
        try:
            assert reconstruct(plan, answers) == cw.symbols[j]
        except SingularSystemError:
            pass  # unlucky direction draw; covered by retrieve_record


def test_retrieve_end_to_end(small_setup, rng):
    params, F, cw, shares = small_setup
    transport = InProcessTransport([ShareServer(s) for s in shares])
    for _ in range(50):
        j = rng.randrange(params.n)
        symbol, report = retrieve_record(params, transport, j, rng)
        assert symbol == cw.symbols[j]
    assert report.uplink_symbols == params.q * params.sigma * (params.m - 1)
    assert report.downlink_symbols == params.q * params.sigma ** 2


@pytest.mark.parametrize("mode", [ByzantineMode.GARBAGE, ByzantineMode.FIXED, ByzantineMode.BITFLIP])
def test_byzantine_tolerance(mode, gf16, rng):
    params = make_params(gf16, 2, 2, 14)
    assert params.nu == 4
    F = random_poly(gf16, 2, 14, rng)
    cw = encode(params, F)
    shares = preprocess(params, F)
    for trial in range(20):
        bad = set(rng.sample(range(16), params.nu))
        servers = [
            ShareServer(s, mode if s.index in bad else ByzantineMode.HONEST, seed=trial)
            for s in shares
        ]
        transport = InProcessTransport(servers)
        j = rng.randrange(params.n)
        symbol, _ = retrieve_record(params, transport, j, rng)
        assert symbol == cw.symbols[j]


def test_beyond_byzantine_budget_never_silently_wrong(gf16, rng):
    params = make_params(gf16, 2, 2, 14)
    F = random_poly(gf16, 2, 14, rng)
    cw = encode(params, F)
    shares = preprocess(params, F)
    outcomes = Counter()
    for trial in range(30):
        bad = set(rng.sample(range(16), params.nu + 1))
        servers = [
            ShareServer(s, ByzantineMode.GARBAGE if s.index in bad else ByzantineMode.HONEST, seed=trial)
            for s in shares
        ]
        transport = InProcessTransport(servers)
        j = rng.randrange(params.n)
        try:
            symbol, _ = retrieve_record(params, transport, j, rng)
            assert symbol == cw.symbols[j]
            outcomes["correct"] += 1
        except (LineDecodingError, InconsistentSystemError, SingularSystemError):
            outcomes["failure"] += 1
    assert outcomes["correct"] + outcomes["failure"] == 30


def test_fake_batch_distribution_matches_real(small_setup):
    # the hiding server's fake queries and a normal server's real queries
    # should both look like uniform distinct points of the hyperplane
    params, F, cw, shares = small_setup
    rng = random.Random(99)
    j_fixed = 21
    hiding = hyperplane_of(params, index_point(params, j_fixed))
    other = (hiding + 1) % params.q
    fake_counts = Counter()
    real_counts = Counter()
    for _ in range(4000):
        plan = gen_queries(params, j_fixed, rng)
        fake_counts.update(pt[:-1] for pt in plan.batches[hiding])
        real_counts.update(pt[:-1] for pt in plan.batches[other])
    n_cells = params.points_per_share
    total = 4000 * params.sigma
    tv = sum(
        abs(fake_counts[c] - real_counts[c])
        for c in {*fake_counts, *real_counts}
    ) / (2 * total)
    assert len(fake_counts) == n_cells == len(real_counts)
    assert tv < 0.05
