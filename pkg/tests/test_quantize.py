import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bracket_sum_m4_2d
from torsym.errors import AliasingError, OrderError
from torsym.quantize import (TrigPolynomial, apply, apply_direct, kernel_slice,
                             operator_matrix, trace_direct, translate)
from torsym.symbols import LatticeSymbol, japanese, torus_grid


def banded_symbol(rng, B=2):
    """Random symbol that is a trigonometric polynomial of bandwidth B in x."""
    ks = rng.integers(-B, B + 1, size=(3, 2))
    amps = rng.normal(size=3) + 1j * rng.normal(size=3)
    ps = rng.uniform(-2, 0, size=3)

    def f(x, l):
        x, l = np.asarray(x), np.asarray(l)
        return sum(a * np.exp(2j * np.pi * (x @ k)) * japanese(l) ** p
                   for a, k, p in zip(amps, ks, ps))

    return LatticeSymbol(2, f, x_bandwidth=B)


def generic_symbol(rng):
    a, b = rng.normal(size=2)

    def f(x, l):
        x, l = np.asarray(x), np.asarray(l)
        return np.exp(a * np.sin(2 * np.pi * x[..., 0])) / (1 + (l[..., 0] - b) ** 2 + l[..., 1] ** 2)

    return LatticeSymbol(2, f)


def test_identity_symbol():
    rng = np.random.default_rng(1)
    f = TrigPolynomial.random(2, 6, 5, rng)
    one = LatticeSymbol.multiplier(2, lambda l: np.ones(np.shape(l)[:-1]))
    assert np.max(np.abs(apply(one, f, 16) - f.sample(16))) < 1e-12


def test_multiplier_eigenfunction():
    k = (2, -3)
    f = TrigPolynomial(2, {k: 1.0})
    mult = LatticeSymbol.multiplier(2, lambda l: japanese(l) ** -1.0)
    out = apply(mult, f, 16)
    assert np.max(np.abs(out - f.sample(16) / np.sqrt(14))) < 1e-13


def test_multiplication_operator():
    rng = np.random.default_rng(2)
    k0 = np.array([1, -1])
    s = LatticeSymbol(2, lambda x, l: np.exp(2j * np.pi * (np.asarray(x) @ k0)) *
                      np.ones(np.shape(l)[:-1]), x_bandwidth=1)
    f = TrigPolynomial.random(2, 5, 3, rng)
    xs = torus_grid(2, 16)
    expect = np.exp(2j * np.pi * xs @ k0) * f(xs)
    assert np.max(np.abs(apply(s, f, 16).ravel() - expect)) < 1e-12
    assert np.max(np.abs(apply_direct(s, f, xs) - expect)) < 1e-12


def test_single_mode_and_zero():
    rng = np.random.default_rng(3)
    s = generic_symbol(rng)
    x = rng.random((4, 2))
    f = TrigPolynomial(2, {(3, 1): 1.0})
    expect = s(x, np.array([3.0, 1.0])) * np.exp(2j * np.pi * x @ np.array([3, 1]))
    assert np.max(np.abs(apply_direct(s, f, x) - expect)) < 1e-15
    assert np.all(apply_direct(s, TrigPolynomial(2, {}), x) == 0)


def test_generic_path_matches_direct():
    rng = np.random.default_rng(4)
    s = generic_symbol(rng)
    f = TrigPolynomial.random(2, 10, 6, rng)
    xs = torus_grid(2, 32)
    assert np.max(np.abs(apply(s, f, 32).ravel() - apply_direct(s, f, xs))) < 1e-12


@pytest.mark.parametrize("N", [12, 8])
def test_aliasing_refused(N):
    f = TrigPolynomial(2, {(4, 0): 1.0})
    s = LatticeSymbol.multiplier(2, lambda l: np.ones(np.shape(l)[:-1]))
    with pytest.raises(AliasingError):
        apply(s, f, N)


def test_fft_path_accounts_for_x_bandwidth():
    rng = np.random.default_rng(5)
    s = banded_symbol(rng, B=4)
    f = TrigPolynomial(2, {(6, 0): 1.0})
    with pytest.raises(AliasingError):
        apply(s, f, 16)
    apply(s, f, 32)


@given(st.integers(0, 2**31))
def test_parseval_round_trip(seed):
    rng = np.random.default_rng(seed)
    f = TrigPolynomial.random(2, 8, 7, rng)
    g = TrigPolynomial.from_samples(f.sample(16), tol=1e-13)
    assert g.coeffs.keys() == f.coeffs.keys()
    assert max(abs(g.coeffs[k] - f.coeffs[k]) for k in f.coeffs) < 1e-12
    energy = np.mean(np.abs(f.sample(16)) ** 2)
    assert energy == pytest.approx(sum(abs(c) ** 2 for c in f.coeffs.values()), rel=1e-12)


@given(st.integers(0, 2**31))
def test_translation_covariance(seed):
    # Op(tau sigma) = tau Op(sigma) tau^-1 with tau f = f(. - x0)
    rng = np.random.default_rng(seed)
    s = generic_symbol(rng)
    f = TrigPolynomial.random(2, 6, 5, rng)
    x0 = rng.random(2)
    x = rng.random((8, 2))
    lhs = apply_direct(translate(s, x0), f, x)
    rhs = apply_direct(s, f.translate(-x0), np.mod(x - x0, 1.0))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_translate_examples():
    rng = np.random.default_rng(6)
    s = generic_symbol(rng)
    x, l = rng.random((5, 2)), rng.integers(-5, 6, (5, 2)).astype(float)
    assert np.array_equal(translate(s, [0, 0])(x, l), s(x, l))
    k = np.array([2, -1])
    ch = LatticeSymbol(2, lambda x, l: np.exp(2j * np.pi * (np.asarray(x) @ k)))
    x0 = np.array([0.3, 0.45])
    assert np.max(np.abs(translate(ch, x0)(x, l) - np.exp(-2j * np.pi * x0 @ k) * ch(x, l))) < 1e-12


def test_trace_direct_examples():
    delta = LatticeSymbol(2, lambda x, l: (np.sum(np.abs(l), -1) == 0).astype(float), True)
    assert trace_direct(delta, -10, 5).value == 1
    s = LatticeSymbol(2, lambda x, l: japanese(l) ** -4.0, True)
    est = trace_direct(s, -4, 200)
    exact = bracket_sum_m4_2d(2000)
    assert abs(est.value - exact) < 1e-4
    # tail estimate is of the right size (pi/R^2)
    assert 0.3 < est.tail / (np.pi / 200**2) < 3
    mean_zero = LatticeSymbol(2, lambda x, l: np.sin(2 * np.pi * np.asarray(x)[..., 0]) *
                              japanese(l) ** -4.0)
    assert abs(trace_direct(mean_zero, -4, 50).value) < 1e-12


def test_trace_direct_refuses_low_decay():
    s = LatticeSymbol(2, lambda x, l: japanese(l) ** -2.0, True)
    with pytest.raises(OrderError):
        trace_direct(s, -2, 10)


def test_kernel_slice_factorisation():
    k0 = np.array([1, 2])
    base = LatticeSymbol(2, lambda x, l: japanese(l) ** -4.0, True)
    mod = LatticeSymbol(2, lambda x, l: np.exp(2j * np.pi * (np.asarray(x) @ k0)) * japanese(l) ** -4.0)
    x = np.array([0.2, 0.7])
    a = kernel_slice(base, x, 16, grid=32)
    b = kernel_slice(mod, x, 16, grid=32)
    assert np.max(np.abs(b.values - np.exp(2j * np.pi * x @ k0) * a.values)) < 1e-12


def test_kernel_slice_converges():
    s = LatticeSymbol(2, lambda x, l: japanese(l) ** -4.0, True)
    slices = [kernel_slice(s, [0, 0], R, grid=32).values for R in (64, 128)]
    assert np.max(np.abs(slices[1] - slices[0])) < 1e-3


def test_kernel_slice_of_one_is_dirichlet_kernel():
    one = LatticeSymbol(2, lambda x, l: np.ones(np.shape(l)[:-1]), True)
    sl = kernel_slice(one, [0, 0], 8, grid=16)
    count = sum(1 for a in range(-8, 9) for b in range(-8, 9) if a * a + b * b <= 64)
    assert sl.values[0, 0] == pytest.approx(count)
    assert np.argmax(np.abs(sl.values)) == 0


def test_operator_matrix_diagonal_matches_trace():
    s = LatticeSymbol(2, lambda x, l: (1 + 0.5 * np.cos(2 * np.pi * np.asarray(x)[..., 0]))
                      * japanese(l) ** -4.0, x_bandwidth=1)
    modes, mat = operator_matrix(s, 12)
    diag_sum = np.trace(mat)
    inside = np.sum(modes**2, axis=-1) <= 12**2
    direct = trace_direct(s, -4, 12).value
    assert abs(np.sum(np.diag(mat)[inside]) - direct) < 1e-12
    # corner modes outside the ball carry the remaining mass
    assert abs(diag_sum - direct) < 2 * np.pi / 12**2
