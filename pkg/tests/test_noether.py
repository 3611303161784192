import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasinoether import expr as ex
from quasinoether.family import Generator, generator_of
from quasinoether.model import Problem, hamiltonian, solve_control
from quasinoether.noether import (
    FirstIntegral,
    GeneratorRejected,
    first_integral,
    flow_derivative,
    gauge_adjust,
    hamiltonian_generator,
    verify_symbolic,
)
from quasinoether.search import Ansatz, search_generators

P = ex.parse

EX42 = Problem.from_strings("u1^2 + u2^2", ["u1*(1 + x2)", "u1*x3", "u2", "u1*x3^2"])
SCALING42 = Generator.single(P("2*t"), [P("3*x1"), P("2 + 2*x2"), P("x3"), P("3*x4")], [P("-u1"), P("-u2")], 0)
SCALING_LAW = P("3*psi1*x1 + 2*psi2*(1 + x2) + psi3*x3 + 3*psi4*x4 "
         "- 2*t*(psi0*(u1^2 + u2^2) + psi1*u1*(1 + x2) + psi2*u1*x3 + psi3*u2 + psi4*u1*x3^2)")


def test_martinet_integral(martinet):
    g = Generator.single(P("2*t"), [P("x1"), P("x2"), P("3*x3")], [P("-u1"), P("-u2")], 0)
    c = first_integral(martinet, g)
    H = hamiltonian(martinet)
    assert c.value == P("psi1*x1 + psi2*x2 + 3*psi3*x3") - 2 * H * P("t")
    assert c.source == "generator"


def test_ex31_integral(entry):
    e = entry("ex3_1")
    c = first_integral(e.problem, generator_of(e.family))
    assert c.value == P("2*psi0*(x1 + x2) + psi1*t + psi2*t + psi3*x2^2*t/2")


def test_zero_generator_integral():
    c = first_integral(EX42, Generator.zero(4, 2))
    assert c.value.is_zero()
    assert verify_symbolic(EX42, c, Generator.zero(4, 2)).is_zero()


def test_scaling_law():
    assert first_integral(EX42, SCALING42).value == SCALING_LAW


def test_rejected_generator():
    bad = Generator.single(0, [P("x1"), 0, 0, 0], [0, 0], 0)
    with pytest.raises(GeneratorRejected):
        first_integral(EX42, bad)
    assert first_integral(EX42, bad, check=False).value == P("psi1*x1")


def test_stationarity_reduction():
    """Along the flow, dC/dt reduces to psi.phi - 2H, which stationarity makes zero."""
    c = first_integral(EX42, SCALING42)
    H = hamiltonian(EX42)
    psi_phi = H - ex.sym(ex.PSI0) * EX42.lagrangian
    reduced = flow_derivative(EX42, c, formal_udot=False)
    assert reduced == psi_phi - 2 * H
    sub = dict(zip(EX42.controls, solve_control(EX42)))
    assert ex.substitute(psi_phi - 2 * H, sub).is_zero()
    assert verify_symbolic(EX42, c, SCALING42).is_zero()


@pytest.mark.parametrize("name", ["ex3_1", "ex4_1", "ex4_2", "ex4_2_hamiltonian", "ex6_1_martinet", "ex6_2_drift",
                                  "ex6_3_timeopt4", "ex6_3_timeopt4_intu", "ex6_4_timeopt3", "ex6_4_timeopt3_intu"])
def test_corpus_integrals_certified(entry, name):
    e = entry(name)
    g = e.generator if e.generator is not None else generator_of(e.family)
    c = first_integral(e.problem, g)
    assert c.value == e.expected_integral
    assert verify_symbolic(e.problem, c, g).is_zero()


def test_corrupted_integral_has_residual(martinet):
    g = Generator.single(P("2*t"), [P("x1"), P("x2"), P("3*x3")], [P("-u1"), P("-u2")], 0)
    c = first_integral(martinet, g)
    bad = FirstIntegral(c.value + P("t"), "user", martinet)
    assert not verify_symbolic(martinet, bad, g).is_zero()


def test_gauge_adjust_time_optimal(entry):
    base4 = entry("ex6_3_timeopt4")
    c4 = first_integral(base4.problem, base4.generator)
    assert gauge_adjust(c4, P("x3")).value == entry("ex6_3_timeopt4_intu").expected_integral
    base3 = entry("ex6_4_timeopt3")
    c3 = first_integral(base3.problem, base3.generator)
    assert gauge_adjust(c3, P("x3")).value == entry("ex6_4_timeopt3_intu").expected_integral
    assert gauge_adjust(c3, 0).value == c3.value


def test_gauge_adjust_rejects_costates():
    c = first_integral(EX42, SCALING42)
    with pytest.raises(ValueError):
        gauge_adjust(c, P("psi1"))


@pytest.mark.parametrize("name", ["ex4_1", "ex4_2", "ex6_1_martinet", "ex6_2_drift", "ex6_3_timeopt4"])
def test_hamiltonian_generator(entry, name):
    p = entry(name).problem
    g = hamiltonian_generator(p)
    c = first_integral(p, g)
    assert c.value == -hamiltonian(p)
    assert verify_symbolic(p, c, g).is_zero()


def test_hamiltonian_generator_rejected_when_time_dependent():
    p = Problem.from_strings("u1^2 + t*x1", ["u1"])
    with pytest.raises(GeneratorRejected):
        first_integral(p, hamiltonian_generator(p))


def test_parameter_index():
    with pytest.raises(IndexError):
        first_integral(EX42, SCALING42, 2)


BASIS42 = search_generators(EX42, Ansatz(1))
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, st.sampled_from(range(len(BASIS42))), st.sampled_from(range(len(BASIS42))))
def test_linearity(a, b, i, j):
    g1, g2 = BASIS42[i], BASIS42[j]
    combo = g1 * a + g2 * b
    want = first_integral(EX42, g1).value * a + first_integral(EX42, g2).value * b
    c = first_integral(EX42, combo)
    assert c.value == want
    assert verify_symbolic(EX42, c, combo).is_zero()


def test_integral_must_live_in_problem_symbols():
    with pytest.raises(ValueError):
        FirstIntegral(P("x5"), "user", EX42)
    assert FirstIntegral(P("x1*psi0"), "user", EX42).value == P("psi0*x1")
