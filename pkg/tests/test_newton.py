import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stepchev.certificates import Formula
from stepchev.errors import PreconditionError
from stepchev.intervals import IntervalSystem, StepFunction, ValueSet, inflate
from stepchev.newton import (
    NodeSystem,
    divided_differences,
    eps_small_delta,
    newton_eval,
    partition_bound,
    partition_newton_forms,
    partition_of_unity,
    partition_residual,
    small_delta_approx,
    small_delta_for_system,
)
from stepchev.poly import sup_error

TRIANGLE = [0.0, 1.0, complex(0.5, 3**0.5 / 2)]


def test_two_point_linear():
    t = divided_differences([0.0, 1.0], [1.0, 0.0])
    assert list(t.coefficients) == [1.0, -1.0]
    assert t(0.25) == pytest.approx(0.75)


def test_hermite_cubic():
    t = divided_differences([0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, 1.0], locally_constant=True)
    z = np.linspace(-1, 2, 31)
    assert np.allclose(t(z), z**2 * (3 - 2 * z), atol=1e-14)


def test_distinct_nodes_reproduce_polynomial():
    rng = np.random.default_rng(3)
    nodes = np.sort(rng.uniform(-2, 2, 8))
    f = lambda x: 2 * x**7 - x**3 + 0.5
    t = divided_differences(list(nodes), f)
    z = rng.uniform(-2, 2, 20)
    assert np.allclose(t(z), f(z), atol=1e-10)


def test_confluency_rules():
    with pytest.raises(PreconditionError):
        divided_differences([0.0, 0.0, 1.0], [1.0, 1.0, 0.0])
    with pytest.raises(PreconditionError):
        divided_differences([0.0, 1.0, 0.0], [1.0, 0.0, 1.0], locally_constant=True)
    with pytest.raises(PreconditionError):
        divided_differences([0.0, 0.0], [1.0, 2.0], locally_constant=True)


def test_mp_divided_differences_agree():
    nodes = [0.0, 0.0, 0.0, 1.5, 1.5, 1.5]
    vals = [0, 0, 0, 1, 1, 1]
    a = divided_differences(nodes, vals, locally_constant=True)
    b = divided_differences(nodes, vals, locally_constant=True, dps=40)
    z = np.linspace(-1, 2.5, 15)
    assert np.allclose(a(z), np.array(b(z), dtype=float), atol=1e-13)


def test_newton_eval_horner():
    # 1 + 2(z-1) + 3(z-1)(z-2)
    assert newton_eval([1.0, 2.0, 3.0], [1.0, 2.0], 4.0) == 1 + 2 * 3 + 3 * 3 * 2


def test_node_system_validation():
    with pytest.raises(PreconditionError):
        NodeSystem([0.0, 0.5], 2)
    with pytest.raises(PreconditionError):
        NodeSystem([0.0, 1.0], 0)
    Z = NodeSystem([0.0, 1.0, 2.5], 8)
    assert Z.A == 72.0 and Z.degree == 23 and Z.diam == 2.5


def test_linear_partition():
    P1, P2 = partition_of_unity(NodeSystem([0.0, 1.0], 1))
    z = np.linspace(0, 1, 5)
    assert np.allclose(P1(z), 1 - z) and np.allclose(P2(z), z)


def test_cubic_partition():
    P1, P2 = partition_of_unity(NodeSystem([0.0, 1.0], 2))
    z = np.linspace(-0.5, 1.5, 41)
    assert np.max(np.abs(P2(z) - z**2 * (3 - 2 * z))) < 1e-12
    assert np.max(np.abs(P1(z) + P2(z) - 1)) < 1e-12


def test_leading_zeros_of_rotated_forms():
    Z = NodeSystem([0.0, 1.0, 2.5], 4)
    for form in partition_newton_forms(Z):
        c = form.coefficients
        assert np.all(c[: 4 * 2] == 0.0)


@pytest.mark.parametrize("centers", [[0.0, 1.0], [0.0, 1.0, 2.5], [0.0, 1.5, 3.0, 5.0]])
@pytest.mark.parametrize("n", [1, 4, 8])
def test_interpolation_and_partition(centers, n):
    Z = NodeSystem(centers, n)
    polys = partition_of_unity(Z)
    assert all(p.degree <= Z.degree for p in polys)
    for i, p in enumerate(polys):
        for j, z in enumerate(centers):
            assert abs(p(z) - (i == j)) <= 1e-10
    x = np.linspace(min(centers) - 1, max(centers) + 1, 1000)
    assert partition_residual(Z, x) <= 1e-9
    hull = np.linspace(min(centers), max(centers), 1000)
    assert np.max(np.abs(sum(p(hull) for p in polys) - 1)) <= 1e-9


@pytest.mark.parametrize("n", [2, 3, 5])
def test_derivatives_vanish_at_centers(n):
    Z = NodeSystem([0.0, 1.0, 2.5], n)
    h = 1e-5
    for p in partition_of_unity(Z):
        scale = max(1.0, float(np.max(np.abs(p(np.linspace(-0.5, 3.0, 400))))))
        for z in Z.centers:
            d1 = (p(z + h) - p(z - h)) / (2 * h)
            assert abs(d1) <= 1e-3 * scale
            if n >= 3:
                d2 = (p(z + h) - 2 * p(z) + p(z - h)) / h**2
                assert abs(d2) <= 1e-3 * scale * 1e3  # second difference loses ~3 digits


@pytest.mark.parametrize("centers,n", [([0.0, 1.0], 5), ([0.0, 1.0, 2.5], 4), ([0.0, 1.5, 3.0, 5.0], 3)])
def test_gamma_perturbation_consistency(centers, n):
    gamma = 1e-6
    Z = NodeSystem(centers, n)
    assert Z.degree <= 30
    x = np.linspace(min(centers), max(centers), 400)
    for i, form in enumerate(partition_newton_forms(Z, dps=50)):
        nodes, vals = [], []
        for j, z in enumerate(centers):
            for k in range(n):
                nodes.append(z + k * gamma / n)
                vals.append(1.0 if i == j else 0.0)
        pert = divided_differences(nodes, vals, dps=50)
        diff = np.array(pert(x), dtype=float) - np.array(form(x), dtype=float)
        assert np.max(np.abs(diff)) <= 1e-4


@pytest.mark.parametrize("Z", [NodeSystem([0, 1, 2.5], 5), NodeSystem(TRIANGLE, 5), NodeSystem([0, 1.5, 3, 5], 4)])
def test_divided_difference_magnitude(Z):
    for form in partition_newton_forms(Z):
        for k, col in enumerate(form.table):
            # column k spans k + 1 nodes
            assert np.max(np.abs(np.asarray(col, dtype=complex))) <= 2.0**k * (1 + 1e-12)


def test_complex_triangle():
    Z = NodeSystem(TRIANGLE, 4)
    assert not Z.is_real
    forms = partition_of_unity(Z)
    for i, P in enumerate(forms):
        for j, z in enumerate(TRIANGLE):
            assert abs(P(z) - (i == j)) < 1e-12
    # sum is 1 on a circle through the centers
    t = np.exp(2j * np.pi * np.linspace(0, 1, 64)) * 0.8 + complex(0.5, 0.3)
    assert np.max(np.abs(sum(P(t) for P in forms) - 1)) < 1e-9
    delta = 0.02
    bound = partition_bound(Z, delta).value
    disk = delta * np.exp(2j * np.pi * np.linspace(0, 1, 64))
    for i, P in enumerate(forms):
        for j, z in enumerate(TRIANGLE):
            if i != j:
                assert np.max(np.abs(P(z + disk))) <= bound
    w = [0.3, -1.0, complex(0.2, 0.5)]
    P, cert = small_delta_approx(Z, w, delta)
    for wi, z in zip(w, TRIANGLE):
        assert np.max(np.abs(P(z + disk) - wi)) <= cert.value


def test_partition_bound_example():
    Z = NodeSystem([0.0, 1.0, 2.5], 8)
    cert = partition_bound(Z, 0.01)
    assert cert.formula is Formula.BND_LIMIT
    assert cert.value == pytest.approx(0.0722204136308736, rel=1e-12)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
@settings(max_examples=25, deadline=None)
def test_small_delta_certificate(w):
    Z = NodeSystem([0.0, 1.0, 2.5], 8)
    P, cert = small_delta_approx(Z, w, 0.01)
    if len(set(w)) > 1:
        assert cert.value == pytest.approx(0.2888816545234944, rel=1e-12)
    assert P.degree <= 23
    for wi, z in zip(w, Z.centers):
        x = np.linspace(z - 0.01, z + 0.01, 201)
        assert np.max(np.abs(P(x) - wi)) <= cert.value


def test_small_delta_constant_w():
    P, cert = small_delta_approx(NodeSystem([0.0, 1.0, 2.5], 3), [0.4] * 3, 0.1)
    assert P.degree == 0 and P(1.7) == 0.4 and cert.value == 0.0


def test_small_delta_rejects():
    Z = NodeSystem([0.0, 1.0], 2)
    with pytest.raises(PreconditionError):
        small_delta_approx(Z, [2.0, 0.0], 0.1)
    with pytest.raises(PreconditionError):
        small_delta_approx(Z, [1.0, 0.0], 0.5)


def test_system_lagrange_case():
    f = StepFunction(IntervalSystem([(-1.05, -0.95), (0.95, 1.05)]), [-1, 1])
    P, cert = small_delta_for_system(f, 1)
    assert P.degree == 1 and cert.params["m"] == 1
    assert P(-1.0) == pytest.approx(-1.0) and P(1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 3, 5, 9])
def test_system_certificate_dominates(n):
    f = StepFunction(IntervalSystem([(-1.05, -0.95), (0.95, 1.05)]), [-1, 1])
    P, cert = small_delta_for_system(f, n)
    assert sup_error(P, f).global_error <= cert.value


def test_system_values_rescaled():
    f = StepFunction(IntervalSystem([(0, 0.01), (1, 1.01), (2, 2.01)]), [3.0, -2.0, 0.5])
    P, cert = small_delta_for_system(f, 8)
    assert cert.formula is Formula.SMALL_DELTA
    assert sup_error(P, f).global_error <= cert.value < 3.0


def test_system_m_zero_and_single():
    f = StepFunction(IntervalSystem([(0, 0.1), (1, 1.1), (2, 2.1)]), [1, -1, 1])
    P, cert = small_delta_for_system(f, 1)
    assert cert.formula is Formula.TRIVIAL and cert.value == 1.0 and P(0.5) == 0.0
    g = StepFunction(IntervalSystem([(0, 1)]), [0.3])
    P, cert = small_delta_for_system(g, 4)
    assert P(0.5) == 0.3 and cert.value == 0.0


def test_system_u_precondition():
    f = StepFunction(IntervalSystem([(0, 0.1), (1, 1.1)]), [1, -1])
    with pytest.raises(PreconditionError):
        small_delta_for_system(f, 3, u=0.99)
    with pytest.raises(PreconditionError):
        small_delta_for_system(f, 3, u=0.0)


def test_vacuous_regime_falls_back_to_zero():
    # delta/D = 0.005, sigma/D = 0.3: A * delta_tilde is about 1.93
    f = StepFunction(IntervalSystem([(0, 0.01), (0.31, 0.32), (0.99, 1.0)]), [1, -1, 1])
    raws = []
    for n in (11, 14, 17):
        P, cert = small_delta_for_system(f, n)
        assert cert.formula is Formula.TRIVIAL and cert.value == 1.0
        assert sup_error(P, f).global_error <= cert.value
        raws.append(cert.params["raw_certificate"])
    # rescaled centers are 0.99 / 0.3 apart at the extremes
    A_dt = 2 * (1 + 2 * 0.99 / 0.3) ** 2 * (0.005 / 0.3)
    assert raws[1] / raws[0] == pytest.approx(A_dt, rel=1e-9)
    assert raws[2] / raws[1] == pytest.approx(A_dt, rel=1e-9)


@pytest.mark.parametrize("n", [5, 8, 11, 20])
def test_eps_small_delta(n):
    Y = ValueSet([-1, 0, 1])
    P, cert = eps_small_delta(Y, 0.01, n)
    f = StepFunction(inflate(Y, 0.01), Y.points)
    assert sup_error(P, f).global_error <= cert.value
    if n == 5:
        assert cert.value == 1.0  # m = 2 is still vacuous here: trivial D_hat / 2


def test_eps_small_delta_trivial():
    P, cert = eps_small_delta(ValueSet([0, 1, 3]), 0.1, 1)
    assert cert.value == 1.5 and P(1.0) == 1.5
