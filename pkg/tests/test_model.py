import pytest

from quasinoether import expr as ex
from quasinoether.model import (
    ExtremalPoint,
    Problem,
    ProblemError,
    UnsolvableControl,
    adjoint_rhs,
    hamiltonian,
    solve_control,
    stationarity,
)

P = ex.parse

EX42 = Problem.from_strings("u1^2 + u2^2", ["u1*(1 + x2)", "u1*x3", "u2", "u1*x3^2"], name="ex42")
EX41 = Problem.from_strings("u1^2 + u2^2", ["x3", "x4", "-x1*(x1^2 + x2^2) + u1", "-x2*(x1^2 + x2^2) + u2"])
TIMEOPT4 = Problem.from_strings("1", ["1 + x2", "x3", "u1", "x3^2 - x2^2"], m=1)


def test_hamiltonian_martinet(martinet):
    want = P("psi0*(u1^2 + u2^2) + psi1*u1 + psi2*u2 + psi3*u1*x2^2/2")
    assert hamiltonian(martinet) == want


def test_hamiltonian_ex42():
    want = P("psi0*(u1^2 + u2^2) + psi1*u1*(1 + x2) + psi2*u1*x3 + psi3*u2 + psi4*u1*x3^2")
    assert hamiltonian(EX42) == want


def test_hamiltonian_zero_problem():
    p = Problem(1, 1, ex.ZERO, (ex.ZERO,))
    assert hamiltonian(p).is_zero()


def test_adjoint_ex42():
    want = [P("0"), P("-psi1*u1"), P("-psi2*u1 - 2*psi4*u1*x3"), P("0")]
    assert list(adjoint_rhs(EX42)) == want


def test_adjoint_martinet(martinet):
    assert list(adjoint_rhs(martinet)) == [P("0"), P("-psi3*u1*x2"), P("0")]


def test_adjoint_state_free():
    p = Problem.from_strings("u1^2", ["u1", "t*u1"])
    assert all(e.is_zero() for e in adjoint_rhs(p))


def test_stationarity_ex42():
    want = [P("2*psi0*u1 + psi1*(1 + x2) + psi2*x3 + psi4*x3^2"), P("2*psi0*u2 + psi3")]
    assert list(stationarity(EX42)) == want


def test_stationarity_martinet(martinet):
    assert list(stationarity(martinet)) == [P("2*psi0*u1 + psi1 + psi3*x2^2/2"), P("2*psi0*u2 + psi2")]


def test_stationarity_time_optimal():
    assert stationarity(TIMEOPT4)[-1] == P("psi3")


def test_solve_control_martinet(martinet):
    u1, u2 = solve_control(martinet)
    assert u1 == P("-(psi1 + psi3*x2^2/2)/(2*psi0)")
    assert u2 == P("-psi2/(2*psi0)")


def test_solve_control_ex41():
    assert list(solve_control(EX41)) == [P("-psi3/(2*psi0)"), P("-psi4/(2*psi0)")]


def test_solve_control_coupled_quadratic():
    p = Problem.from_strings("u1^2 + u1*u2 + u2^2", ["u1", "u2"])
    ustar = solve_control(p)
    sub = dict(zip(p.controls, ustar))
    assert all(ex.substitute(g, sub).is_zero() for g in stationarity(p))


def test_solve_control_time_optimal():
    with pytest.raises(UnsolvableControl):
        solve_control(TIMEOPT4)


def test_solve_control_indefinite():
    with pytest.raises(UnsolvableControl):
        solve_control(Problem.from_strings("u1^2 - u2^2", ["u1", "u2"]))


@pytest.mark.parametrize("name", ["ex3_1", "ex4_1", "ex4_2", "ex6_1_martinet", "ex6_2_drift"])
def test_control_solves_stationarity(entry, name):
    p = entry(name).problem
    sub = dict(zip(p.controls, solve_control(p)))
    assert all(ex.substitute(g, sub).is_zero() for g in stationarity(p))


@pytest.mark.parametrize("name", ["ex4_1", "ex4_2", "ex6_1_martinet", "ex6_2_drift", "ex6_3_timeopt4"])
def test_autonomous_hamiltonian_is_time_free(entry, name):
    p = entry(name).problem
    assert p.is_autonomous()
    assert ex.diff(hamiltonian(p), ex.T).is_zero()


def test_problem_validation():
    with pytest.raises(ProblemError):
        Problem.from_strings("u1^2", ["x2"], n=1)
    with pytest.raises(ProblemError):
        Problem(2, 1, P("u1"), (P("u1"),))
    with pytest.raises(ProblemError):
        Problem.from_strings("psi1*u1", ["u1"])
    with pytest.raises(ProblemError):
        Problem.from_strings("u1", ["u1"], horizon=(1, 0))


def test_extremal_point_multiplier_checks():
    with pytest.raises(ValueError):
        ExtremalPoint(0.0, (1.0,), (0.0,), 0.0, (0.0,))
    with pytest.raises(ValueError):
        ExtremalPoint(0.0, (1.0,), (0.0,), 1.0, (1.0,))
    pt = ExtremalPoint(0.0, (1.0,), (2.0,), -0.5, (3.0,))
    assert ex.evaluate(hamiltonian(Problem.from_strings("u1^2", ["u1"])), pt.env()) == pytest.approx(-2 + 6)
