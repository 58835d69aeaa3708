import mpmath
import pytest

from slimtw.bounds import (BoundParams, FunctionSpec, bound_H_recursive, bound_h, bound_r_sequence, chain_check,
                           closed_form_check, log_r_sequence, psi, ratio_hypothesis, sep_slim_bound)
from slimtw.graph import GraphError


def close(x, y, rel=1e-12):
    return abs(mpmath.mpf(x) - mpmath.mpf(y)) <= rel * abs(mpmath.mpf(y))


def test_psi_value():
    assert close(psi(1, 2, 1.0), mpmath.mpf(10_000) * 36 / 99)
    assert abs(float(psi(1, 2, 1.0)) - 3636.3636) < 1e-3
    assert psi(3, 1, 2.0) == 0
    with pytest.raises(GraphError):
        psi(0, 2, 1.0)
    with pytest.raises(GraphError):
        psi(1, 2, 0)


def test_sep_slim_bound():
    assert sep_slim_bound(1024, 1) == 1
    assert close(sep_slim_bound(16, 4), mpmath.power(2, 5 * (2 + mpmath.sqrt(8))))
    with pytest.raises(GraphError):
        sep_slim_bound(1, 4)


def test_function_specs():
    assert FunctionSpec("const", 3.0)(100) == 3
    assert FunctionSpec("power", 2.0, 0.5)(16) == 8
    assert FunctionSpec("log", 1.5)(8) == 4.5
    assert FunctionSpec("power", 1.0, 0.5, True)(20) == 4
    with pytest.raises(GraphError):
        FunctionSpec("exp")


def test_params_json_round_trip():
    params = BoundParams(t=2, q=3, g=FunctionSpec("power", 0.3, 1.0, True))
    assert BoundParams.from_json(params.to_json()) == params


CONST = BoundParams(p=2, c=FunctionSpec("const", 2.0), f=FunctionSpec("const", 5.0), g=FunctionSpec("const", 3.0))


def test_recursion_base_and_one_unrolling():
    assert bound_H_recursive(10, 10, CONST) == 10
    assert bound_H_recursive(7, 10, CONST) == 7
    # f + 3 (c p)^2 + (c p)^2 H(3) with c p = 4
    assert bound_H_recursive(11, 11, CONST) == 5 + 3 * 16 + 16 * 3


def test_recursion_needs_shrinking_g():
    stuck = BoundParams(g=FunctionSpec("power", 1.0, 1.0))
    with pytest.raises(GraphError):
        bound_H_recursive(50, 50, stuck)


def test_closed_form_dominates_recursion():
    params = BoundParams(g=FunctionSpec("power", 0.5, 1.0, True))
    for n in [11, 20, 57, 100, 1000, 12345, 10 ** 5, 10 ** 6]:
        assert bound_H_recursive(n, n, params) <= bound_h(n, params)


def test_closed_form_needs_proper_g():
    with pytest.raises(GraphError):
        bound_h(10, BoundParams(g=FunctionSpec("power", 2.0, 1.0)))


def test_ratio_hypothesis():
    shrinking = BoundParams(g=FunctionSpec("power", 1.0, 0.5))
    assert ratio_hypothesis([4, 16, 64], shrinking) == [16, 64]
    linear = BoundParams(g=FunctionSpec("power", 0.5, 1.0))
    assert ratio_hypothesis([10, 100, 1000], linear) == []


def test_r_sequence_start():
    params = BoundParams(t=1, q=2, d1=2.0, d2=3.0)
    # (3 t d1^2)^d2 = 12^3 = 1728 is below psi
    assert close(bound_r_sequence(100, params, 0)[0], psi(1, 2, 1.0))
    big = BoundParams(t=1, q=2, d1=3.0, d2=4.0)
    assert close(bound_r_sequence(100, big, 0)[0], mpmath.mpf(27) ** 4)
    assert len(log_r_sequence(100, big)) == 10


def test_r_sequence_step():
    params = BoundParams()
    n = 2 ** 20
    L0, L1 = log_r_sequence(n, params, 1)
    A = L0 + mpmath.log(20, 2)
    assert close(L1, 9 * A + 5 * mpmath.sqrt(A * 20))


def test_r_sequence_domain():
    with pytest.raises(GraphError):
        log_r_sequence(1, BoundParams())


def test_closed_form_and_chain_on_a_grid():
    params = BoundParams()
    for e in (4, 10, 30, 60):
        for i in range(0, 6):
            assert closed_form_check(2 ** e, i, params)
            assert chain_check(2 ** e, i, params)


def test_explicit_c0_is_honoured():
    assert not closed_form_check(2 ** 10, 1, BoundParams(c0=1.0))
