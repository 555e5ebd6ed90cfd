import itertools
import random
from fractions import Fraction

import pytest

from supergraph.ce_complex import (
    CEChain,
    act,
    act_on_tensor,
    coinvariant_quotient,
    tensor_coinvariant_quotient,
    wedge_basis,
)
from supergraph.chord_iso import (
    TensorWord,
    act_on_chords,
    beta,
    ceil_map,
    duality_matrix,
    enumerate_chords,
    gamma_class,
    gamma_graph,
    graph_chord_data,
    hat,
    kappa,
    lift,
    permute_tensor,
    phi,
    phi_tensor,
    psi,
    sigma_c,
    u_coinvariant,
    verify_chain_map,
    verify_duality,
    verify_left_inverse,
    verify_right_inverse,
)
from supergraph.graph_complex import GraphChain
from supergraph.graph_core import canonicalize, enumerate_graphs, permutation_sign, theta_graph
from supergraph.super_poly import SuperDim, osp_basis, p, q, x


def test_enumerate_chords():
    assert enumerate_chords(1) == [((1, 2),)]
    assert [len(enumerate_chords(k)) for k in (2, 3, 4)] == [3, 15, 105]
    for c in enumerate_chords(3):
        assert sorted(itertools.chain(*c)) == list(range(1, 7))
    with pytest.raises(ValueError):
        enumerate_chords(0)


def test_permute_tensor():
    t = TensorWord((p(1), q(1)))
    assert permute_tensor([1, 2], t) == t
    assert permute_tensor([2, 1], t) == TensorWord((q(1), p(1)))
    assert permute_tensor([2, 1], TensorWord((x(1), x(2)))) == TensorWord((x(2), x(1)), -1)
    with pytest.raises(ValueError):
        permute_tensor([1, 1], t)


def test_permute_tensor_is_an_action():
    rng = random.Random(0)
    pool = [p(1), q(1), x(1), x(2), p(2)]
    for _ in range(200):
        t = TensorWord(tuple(rng.choice(pool) for _ in range(5)))
        s1, s2 = rng.sample(range(1, 6), 5), rng.sample(range(1, 6), 5)
        composed = [s2[s1[a] - 1] for a in range(5)]
        assert permute_tensor(s2, permute_tensor(s1, t)) == permute_tensor(composed, t)


def test_sigma_c():
    assert sigma_c(hat(((1, 2),))) == {1: 1, 2: 2}
    assert sigma_c(((1, 3), (2, 4))) == {1: 1, 3: 2, 2: 3, 4: 4}
    for c in enumerate_chords(3):
        s = sigma_c(c)
        for r, (a, b) in enumerate(c, start=1):
            assert (s[a], s[b]) == (2 * r - 1, 2 * r)


def test_kappa_examples():
    assert kappa(TensorWord((p(1), q(1), p(2), q(2)))) == 1
    assert kappa(TensorWord((p(1), q(2)))) == 0
    assert kappa(TensorWord((x(1), x(1)))) == 1
    assert kappa(TensorWord((q(1), p(1)))) == -1


def test_beta_examples():
    assert beta(hat(((1, 2),)), TensorWord((p(1), q(1)))) == 1
    assert beta(((1, 3), (2, 4)), TensorWord((p(1), p(2), q(1), q(2)))) == 1


def test_beta_pair_order_and_direction():
    rng = random.Random(1)
    pool = [p(1), q(1), p(2), q(2), x(1), x(2)]
    for _ in range(300):
        t = TensorWord(tuple(rng.choice(pool) for _ in range(6)))
        c = rng.choice(enumerate_chords(3))
        shuffled = tuple(rng.sample(c, 3))
        assert beta(shuffled, t) == beta(c, t)
        flipped = ((c[0][1], c[0][0]),) + c[1:]
        # graded symmetry of the form and the Koszul sign always combine to -1
        assert beta(flipped, t) == -beta(c, t)


def test_u_coinvariant():
    d = SuperDim(2, 0)
    assert u_coinvariant(hat(((1, 2),)), d) == TensorWord((p(1), q(1)))
    with pytest.raises(ValueError):
        u_coinvariant(hat(((1, 2), (3, 4), (5, 6))), d)


@pytest.mark.parametrize("d", [SuperDim(1, 0), SuperDim(2, 1), SuperDim(3, 0), SuperDim(3, 2)])
def test_duality(d):
    for k in range(1, d.n + 1):
        size = len(enumerate_chords(k))
        mat = duality_matrix(d, k)
        assert mat == [[1 if a == b else 0 for b in range(size)] for a in range(size)]
        assert verify_duality(d, k)["failures"] == 0


def _tensor_act(xi, t):
    (mono,) = xi.terms
    coeff = xi.terms[mono]
    return [TensorWord(w, t.coefficient * coeff * c) for w, c in act_on_tensor(mono, t.factors).items()]


def test_beta_invariance():
    rng = random.Random(2)
    d = SuperDim(2, 1)
    basis = osp_basis(d)
    vectors = d.vectors()
    for _ in range(500):
        k = rng.choice([1, 2])
        t = TensorWord(tuple(rng.choice(vectors) for _ in range(2 * k)))
        c = rng.choice(enumerate_chords(k))
        xi = rng.choice(basis)
        assert sum((beta(c, s) for s in _tensor_act(xi, t)), Fraction(0)) == 0


def test_beta_equivariance():
    rng = random.Random(3)
    vectors = SuperDim(2, 2).vectors()
    for _ in range(500):
        t = TensorWord(tuple(rng.choice(vectors) for _ in range(4)))
        c = rng.choice(enumerate_chords(2))
        sigma = rng.sample(range(1, 5), 4)
        assert beta(act_on_chords(sigma, c), permute_tensor(sigma, t)) == beta(c, t)


def test_gamma_graph_examples():
    theta = gamma_graph((3, 3), ((1, 4), (2, 5), (3, 6)))
    klass, sign = canonicalize(theta)
    assert sign != 0 and klass == canonicalize(theta_graph())[0]
    assert gamma_class((3, 3), ((1, 4), (2, 5), (3, 6))) == (klass, sign)
    assert canonicalize(gamma_graph((3, 3), ((1, 2), (3, 4), (5, 6))))[1] == 0
    with pytest.raises(ValueError):
        gamma_graph((3, 3), ((1, 2),))


SHAPES = [(3, 3), (3, 3, 3, 3), (4, 4), (3, 4, 3), (5, 3), (3, 3, 4, 4)]


@pytest.mark.parametrize("k_list", SHAPES)
def test_gamma_identities(k_list):
    rng = random.Random(hash(k_list) & 0xFFFF)
    k = sum(k_list) // 2
    chords = enumerate_chords(k)
    offsets = [sum(k_list[:t]) for t in range(len(k_list))]
    for _ in range(500):
        c = hat(rng.choice(chords))
        klass, sign = gamma_class(k_list, c)
        # flipping one chord negates
        r = rng.randrange(k)
        flipped = c[:r] + ((c[r][1], c[r][0]),) + c[r + 1:]
        k2, s2 = gamma_class(k_list, flipped)
        assert k2 == klass and s2 == -sign
        # permuting positions within blocks fixes the class
        tau = {}
        for off, size in zip(offsets, k_list):
            for a, b in zip(range(off + 1, off + size + 1), rng.sample(range(off + 1, off + size + 1), size)):
                tau[a] = b
        assert gamma_class(k_list, act_on_chords(tau, c)) == (klass, sign)
        # a block permutation contributes its sign
        order = rng.sample(range(len(k_list)), len(k_list))
        new_sizes = tuple(k_list[t] for t in order)
        new_offsets = [sum(new_sizes[:t]) for t in range(len(new_sizes))]
        relabel = {}
        for new_t, old_t in enumerate(order):
            for s in range(k_list[old_t]):
                relabel[offsets[old_t] + s + 1] = new_offsets[new_t] + s + 1
        k3, s3 = gamma_class(new_sizes, act_on_chords(relabel, c))
        assert k3 == klass
        assert s3 == permutation_sign(order) * sign


def test_gamma_class_matches_gamma_graph():
    rng = random.Random(5)
    for _ in range(120):
        k_list = rng.choice(SHAPES)
        c = tuple(rng.sample(rng.choice(enumerate_chords(sum(k_list) // 2)), sum(k_list) // 2))
        c = tuple(pair if rng.random() < 0.5 else pair[::-1] for pair in c)
        assert gamma_class(k_list, c) == canonicalize(gamma_graph(k_list, c))


def test_phi_zero():
    assert phi(CEChain()) == 0


def test_phi_invariant_under_block_permutations():
    rng = random.Random(6)
    d = SuperDim(2, 1)
    words = wedge_basis(d, 2, 6) + wedge_basis(d, 2, 8)
    for w in rng.sample(words, 150):
        factors, sizes = lift(w)
        ref = phi_tensor(TensorWord(factors), sizes)
        offsets = [sum(sizes[:t]) for t in range(len(sizes))]
        tau = []
        for off, size in zip(offsets, sizes):
            tau.extend(off + 1 + s for s in rng.sample(range(size), size))
        # tau lists images; permuting inside a symmetric power carries its Koszul sign
        assert phi_tensor(permute_tensor(tau, TensorWord(factors)), sizes) == ref
        assert phi(CEChain({w: 1})) == ref


def test_phi_kills_relations():
    rng = random.Random(7)
    d = SuperDim(2, 1)
    words = wedge_basis(d, 2, 6) + wedge_basis(d, 3, 10)
    basis = osp_basis(d)
    for _ in range(200):
        assert phi(act(rng.choice(basis), CEChain({rng.choice(words): 1}))) == 0


def test_psi_theta():
    d = SuperDim(3, 0)
    klass = canonicalize(theta_graph())[0]
    assert psi(klass, d) == CEChain.of(["p1 p2 p3", "q1 q2 q3"])
    sizes, c = graph_chord_data(klass)
    assert psi(klass, d) == ceil_map(u_coinvariant(c, d), sizes)
    assert phi(psi(klass, d)) == GraphChain({klass: 1})
    with pytest.raises(ValueError):
        psi(klass, SuperDim(2, 0))


def test_psi_choice_independent():
    rng = random.Random(8)
    for d, (i, j) in itertools.product([SuperDim(3, 0), SuperDim(3, 1)], [(2, 3), (1, 3), (2, 2)]):
        basis = coinvariant_quotient(d, i, 2 * j)
        for klass in enumerate_graphs(i, j):
            ref = basis.project(psi(klass, d))
            sizes, c = graph_chord_data(klass)
            for _ in range(30):
                # another labeling of the same oriented graph: permute blocks and positions
                order = rng.sample(range(i), i)
                offsets = [sum(sizes[:t]) for t in range(i)]
                new_sizes = tuple(sizes[t] for t in order)
                new_offsets = [sum(new_sizes[:t]) for t in range(i)]
                relabel = {}
                for new_t, old_t in enumerate(order):
                    inner = rng.sample(range(sizes[old_t]), sizes[old_t])
                    for s in range(sizes[old_t]):
                        relabel[offsets[old_t] + s + 1] = new_offsets[new_t] + inner[s] + 1
                c2 = tuple(rng.sample(act_on_chords(relabel, c), j))
                other = ceil_map(u_coinvariant(c2, d), new_sizes)
                _, sign = gamma_class(new_sizes, c2)
                _, ref_sign = gamma_class(sizes, c)
                got = basis.project(other)
                assert {kk: v * sign * ref_sign for kk, v in got.items()} == ref


def test_verify_chain_map_small():
    d = SuperDim(2, 1)
    report = verify_chain_map(d, 2, 3)
    assert report["failures"] == 0 and report["check"] == "chain_map"
    assert set(report) == {"n", "m", "i", "j", "check", "ambient_dim", "failures", "elapsed_ms"}
    empty = verify_chain_map(d, 3, 2)
    assert empty["ambient_dim"] == 0 and empty["failures"] == 0


def test_inverses_small():
    d = SuperDim(3, 1)
    for i, j in [(1, 3), (2, 3), (2, 2)]:
        assert verify_left_inverse(d, i, j)["failures"] == 0
        assert verify_right_inverse(d, i, j)["failures"] == 0


def test_injected_sign_error_detected():
    d = SuperDim(1, 1)
    words = wedge_basis(d, 3, 12, (0,))
    assert verify_chain_map(d, 3, 6, words)["failures"] == 0
    assert verify_chain_map(d, 3, 6, words, inject_sign_error=True)["failures"] > 0


def test_flipped_edge_breaks_inverses():
    d = SuperDim(3, 1)
    assert verify_right_inverse(d, 2, 3, flip_first=True)["failures"] > 0


def test_tensor_quotient_identifies_reversed_pairs():
    d = SuperDim(2, 1)
    basis = tensor_coinvariant_quotient(d, 2)
    for r in (1, 2):
        assert basis.project({(p(r), q(r)): 1, (q(r), p(r)): 1}) == {}
    assert basis.project({(p(1), q(1)): 1, (p(2), q(2)): -1}) == {}
    assert basis.project({(p(1), q(1)): 1}) != {}
