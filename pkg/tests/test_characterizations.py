import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weightreg.characterizations import (
    DomainError,
    PolynomialR,
    block_target,
    characterize,
    commutation_test,
    interlacing_report,
    leja_order,
    omega_membership,
    polynomial_identity_test,
    quotient_spectrum,
    tightness_implies_weight_regular_check,
    weight_hoffman_polynomial,
)
from weightreg.graph import (
    Graph,
    VertexPartition,
    complete,
    cycle,
    example1,
    example1_partition,
    is_bipartite,
    path,
    petersen,
    star,
)
from weightreg.partitions import is_weight_regular, quotient_matrices, weighted_view
from weightreg.spectra import eigendecompose, perron_vector

from corpus import named_corpus, random_instances

SQ2 = math.sqrt(2)


def _setup(g):
    s = eigendecompose(g)
    return s, perron_vector(g, s)


# -- commutation ------------------------------------------------------------


def test_commutation_example1():
    g = example1()
    s, nu = _setup(g)
    res = commutation_test(g, weighted_view(example1_partition(), nu))
    assert res.commutes and res.residual < 1e-12
    assert res.balance_residual < 1e-10


def test_commutation_rejects_bad_partition():
    g = path(3)
    _, nu = _setup(g)
    res = commutation_test(g, weighted_view(VertexPartition(3, ((0,), (1, 2))), nu))
    assert not res.commutes and res.balance_residual is None
    assert res.residual > 0.1


@pytest.mark.parametrize("name,g,p", list(random_instances(200, 10, seed=21)))
def test_commutation_matches_definition(name, g, p):
    _, nu = _setup(g)
    assert commutation_test(g, weighted_view(p, nu)).commutes == is_weight_regular(g, nu, p)


# -- Omega(A) ---------------------------------------------------------------


def test_omega_identity_and_singletons():
    g = example1()
    _, nu = _setup(g)
    assert omega_membership(g, np.eye(9)).member
    # every singleton class is its own unit vector
    assert np.allclose(weighted_view(VertexPartition.singletons(9), nu).projector(), np.eye(9))


def test_omega_complete_graph_average():
    g = complete(3)
    _, nu = _setup(g)
    M = weighted_view(VertexPartition.trivial(3), nu).projector()
    assert np.allclose(M, np.full((3, 3), 1 / 3))
    assert omega_membership(g, M).member


def test_omega_sub_checks_separate():
    g = path(3)
    _, nu = _setup(g)
    # nu nu^T / ||nu||^2 commutes with A but is not stochastic
    rep = omega_membership(g, weighted_view(VertexPartition.trivial(3), nu).projector())
    assert rep.commutes_with_a and rep.nonnegative
    assert not rep.rows_sum_one and not rep.cols_sum_one and not rep.member
    rep = omega_membership(g, np.full((3, 3), 1 / 3))
    assert rep.rows_sum_one and not rep.commutes_with_a


def test_omega_shape_mismatch():
    with pytest.raises(ValueError):
        omega_membership(path(3), np.eye(4))


# -- weight-Hoffman polynomial ----------------------------------------------


def test_h_complete_graph():
    H = weight_hoffman_polynomial(*_setup(complete(3)))
    assert np.allclose(H.coefficients, [1, 1])


def test_h_path3():
    H = weight_hoffman_polynomial(*_setup(path(3)))
    assert np.allclose(H.coefficients, [0, SQ2, 1])
    assert H(SQ2) == pytest.approx(4)
    assert H(0) == pytest.approx(0, abs=1e-12) and H(-SQ2) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_h_of_complete_graph_is_all_ones(n):
    g = complete(n)
    s, nu = _setup(g)
    assert np.abs(weight_hoffman_polynomial(s, nu).evaluate_matrix(g.adjacency_matrix()) - 1).max() < 1e-12


def test_h_needs_an_edge():
    with pytest.raises(DomainError):
        weight_hoffman_polynomial(*_setup(Graph(1, frozenset())))


@pytest.mark.parametrize("name,g", [x for x in named_corpus() if x[1].n > 1])
def test_h_matches_spectral_and_idempotent_routes(name, g):
    s, nu = _setup(g)
    H = weight_hoffman_polynomial(s, nu)
    A = g.adjacency_matrix()
    HA = H.evaluate_matrix(A)
    x = nu.entries
    scale = max(1.0, float((x @ x)))
    assert np.abs(HA - s.apply_function(H)).max() <= 1e-7 * scale
    assert np.abs(HA - H.horner_matrix(A)).max() <= 1e-7 * scale
    # H(A) = alpha * pi_0 * E_0 and alpha * pi_0 = ||nu||^2
    pi0 = float(np.prod(s.distinct[0] - s.distinct[1:]))
    assert H.scale * pi0 == pytest.approx(x @ x)
    assert np.abs(HA - H.scale * pi0 * s.idempotent(0)).max() <= 1e-8 * scale
    assert np.abs(HA - np.outer(x, x)).max() <= 1e-8 * scale


def test_leja_order_keeps_all_points():
    pts = [0.5, -2.0, 1.0, 3.0, -1.0]
    out = leja_order(pts)
    assert sorted(out) == sorted(pts) and out[0] == 3.0
    assert leja_order([]) == []


@given(st.lists(st.floats(-4, 4), min_size=0, max_size=6), st.floats(-3, 3))
@settings(max_examples=100, deadline=None)
def test_polynomial_forms_agree(roots, x):
    p = PolynomialR.from_roots(roots, 1.5)
    prod = 1.5 * np.prod([x - r for r in roots])
    assert p(x) == pytest.approx(prod, abs=1e-8 * max(1.0, abs(prod)) + 1e-9)
    A = np.array([[x]])
    assert p.evaluate_matrix(A)[0, 0] == pytest.approx(prod, abs=1e-9 * max(1.0, abs(prod)))


# -- polynomial identity ----------------------------------------------------


def test_identity_example1_and_block_target():
    g = example1()
    s, nu = _setup(g)
    T = block_target(nu, example1_partition())
    assert T[0, 0] == pytest.approx(4) and T[1, 5] == pytest.approx(SQ2) and T[5, 6] == pytest.approx(1)
    res = polynomial_identity_test(g, s, nu, example1_partition())
    assert res.holds and res.residual < 1e-9


def test_identity_skipped_when_nu_not_class_constant():
    g = path(3)
    s, nu = _setup(g)
    assert polynomial_identity_test(g, s, nu, VertexPartition(3, ((0,), (1, 2)))) is None


@pytest.mark.parametrize("name,g,p", list(random_instances(120, 10, seed=22)))
def test_identity_holds_whenever_weight_regular(name, g, p):
    s, nu = _setup(g)
    res = polynomial_identity_test(g, s, nu, p)
    if res is not None and is_weight_regular(g, nu, p):
        assert res.holds


def test_identity_cannot_detect_non_weight_regular_partitions():
    # H(A) = nu nu^T for every connected graph, so once nu is constant on
    # classes the block target is reached no matter what the partition is.
    g = cycle(4)
    s, nu = _setup(g)
    p = VertexPartition(4, ((0,), (1, 2, 3)))
    assert not is_weight_regular(g, nu, p)
    assert polynomial_identity_test(g, s, nu, p).holds


# -- interlacing ------------------------------------------------------------


def _quotient_mu(g, p):
    _, nu = _setup(g)
    return quotient_spectrum(quotient_matrices(weighted_view(p, nu), g.adjacency_matrix()).B_bar)


def test_interlacing_p3_bipartition_tight():
    g = path(3)
    mu = _quotient_mu(g, VertexPartition(3, ((0, 2), (1,))))
    assert np.allclose(mu, [SQ2, -SQ2])
    rep = interlacing_report(eigendecompose(g).eigenvalues, mu)
    assert rep.interlaces and rep.tight and rep.k == 1


def test_interlacing_k4_halves_tight():
    g = complete(4)
    mu = _quotient_mu(g, VertexPartition(4, ((0, 1), (2, 3))))
    assert np.allclose(mu, [3, -1])
    rep = interlacing_report(eigendecompose(g).eigenvalues, mu)
    assert rep.tight and rep.k == 1


def test_interlacing_singletons_tight():
    g = petersen()
    mu = _quotient_mu(g, VertexPartition.singletons(10))
    assert interlacing_report(eigendecompose(g).eigenvalues, mu).tight


def test_interlacing_example1_not_tight():
    g = example1()
    mu = _quotient_mu(g, example1_partition())
    assert np.allclose(mu, [2 * SQ2, 0, -2 * SQ2], atol=1e-10)
    rep = interlacing_report(eigendecompose(g).eigenvalues, mu)
    assert rep.interlaces and not rep.tight and rep.k is None


def test_interlacing_violation_and_size_error():
    rep = interlacing_report([2, 0, -2], [3, -2])
    assert not rep.interlaces and rep.violation == pytest.approx(1)
    with pytest.raises(ValueError):
        interlacing_report([1, 0], [1, 0, -1])


@pytest.mark.parametrize("name,g,p", list(random_instances(200, 10, seed=23)))
def test_interlacing_and_tightness(name, g, p):
    s, nu = _setup(g)
    rep = interlacing_report(s.eigenvalues, _quotient_mu(g, p))
    assert rep.interlaces
    assert tightness_implies_weight_regular_check(g, s, nu, p)


# -- aggregate ---------------------------------------------------------------


@pytest.mark.parametrize("g", [star(4), cycle(6), example1()])
def test_characterize_bipartitions(g):
    s, nu = _setup(g)
    p = is_bipartite(g) or example1_partition()
    v = characterize(g, s, nu, p)
    assert v.definitional and v.commutation.commutes and v.consistent
    assert np.all(np.abs(v.quotient_eigenvalues) <= s.lambda1 + 1e-9)


def test_characterize_flags_no_inconsistency_on_bad_partition(caplog):
    g = path(4)
    s, nu = _setup(g)
    with caplog.at_level(logging.WARNING):
        v = characterize(g, s, nu, VertexPartition(4, ((0,), (1, 2, 3))))
    assert not v.definitional and not v.commutation.commutes and v.consistent
    assert not caplog.records
