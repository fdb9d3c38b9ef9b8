import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modineq.errors import ParameterError, UnknownIdError
from modineq.gfuncs import (
    BURES,
    INV_SQRT,
    K_BURES,
    K_CATALOG,
    K_INV_SQRT,
    K_LOWER,
    K_MAX,
    K_UPPER,
    NEG_LOG,
    SQUARE_DIFF,
    X_LOG_X,
    KFunction,
    catalog,
    g_from_k,
    log_grid,
    parse_g,
    symmetrize,
    tilde,
    wyd,
)

GRID = log_grid(1e-3, 1e3, 301)
CATALOG = catalog()
wyd_params = st.floats(-1.0, 2.0).filter(lambda t: abs(t) > 1e-3 and abs(t - 1) > 1e-3)


def close(a, b, tol=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    return np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.abs(b)))


def test_hand_values():
    assert wyd(0.5)(4.0) == pytest.approx(-4.0)
    assert NEG_LOG(1.0) == 0.0
    assert BURES(1.0) == 0.0
    assert SQUARE_DIFF(3.0) == 4.0


def test_wyd_domain():
    for t in (0.0, 1.0):
        with pytest.raises(ParameterError, match=r"t must avoid \{0,1\}"):
            wyd(t)
    for t in (-1.5, 2.5, float("nan")):
        with pytest.raises(ParameterError):
            wyd(t)
    assert wyd(-1.0).param == -1.0 and wyd(2.0).param == 2.0


def test_catalog_contents_and_values_at_one():
    ids = {g.id for g in CATALOG}
    for required in ("neg_log", "x_log_x", "square_diff", "inv_sqrt", "bures", "tilde:inv_sqrt"):
        assert required in ids
    assert {"wyd:-1", "wyd:0.5", "wyd:2"} <= ids
    for g in CATALOG:
        assert g.value_at_one == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("g", CATALOG, ids=lambda g: g.id)
def test_finite_on_wide_domain(g):
    x = np.logspace(-14, 14, 281)
    assert np.all(np.isfinite(g(x)))


@pytest.mark.parametrize("g", CATALOG, ids=lambda g: g.id)
def test_midpoint_scalar_convexity(g):
    rng = np.random.default_rng(7)
    x, y = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), (2, 100)))
    lhs = g((x + y) / 2)
    rhs = (g(x) + g(y)) / 2
    assert np.all(lhs <= rhs + 1e-12 * (1.0 + np.abs(rhs)))


def test_tilde_examples():
    assert tilde(NEG_LOG) is X_LOG_X
    assert close(tilde(NEG_LOG)(GRID), GRID * np.log(GRID))
    for t in (-1.0, 0.5, 1.5, 2.0):
        expected = (GRID - GRID ** (1 - t)) / (t * (1 - t))
        assert close(tilde(wyd(t))(GRID), expected, 1e-10)


@given(st.sampled_from(CATALOG))
def test_tilde_is_involution(g):
    assert close(tilde(tilde(g))(GRID), g(GRID))
    assert tilde(g)(1.0) == pytest.approx(g(1.0), abs=1e-15)


@given(wyd_params)
def test_tilde_involution_generic(t):
    g = wyd(t)
    gt = tilde(g)
    # generic construction, not a structural shortcut
    raw = GRID * g(1.0 / GRID)
    assert close(gt(GRID), raw, 1e-10)
    assert close(tilde(gt)(GRID), g(GRID), 1e-10)


def test_symmetrize_examples():
    s = symmetrize(NEG_LOG)
    assert close(s(GRID), (GRID - 1) * np.log(GRID))
    sq = symmetrize(SQUARE_DIFF)
    assert close(sq(GRID), (1 - GRID) ** 2 * (1 + GRID) / GRID)
    for g in CATALOG:
        assert symmetrize(g)(1.0) == pytest.approx(0.0, abs=1e-15)


@given(st.sampled_from(CATALOG))
def test_symmetrize_is_tilde_fixed_point(g):
    s = symmetrize(g)
    assert close(GRID * s(1.0 / GRID), s(GRID))


@pytest.mark.parametrize("k", list(K_CATALOG.values()), ids=lambda k: k.id)
def test_k_invariants(k):
    assert close(GRID * k(GRID), k(1.0 / GRID))
    assert np.all(K_LOWER(GRID) <= k(GRID) + 1e-12)
    assert np.all(k(GRID) <= K_UPPER(GRID) + 1e-12)


@pytest.mark.parametrize("k", list(K_CATALOG.values()), ids=lambda k: k.id)
def test_g_from_k_is_tilde_symmetric(k):
    g = g_from_k(k)
    assert close(GRID * g(1.0 / GRID), g(GRID))


def test_g_from_k_examples():
    assert close(g_from_k(K_BURES)(GRID), BURES(GRID))
    assert close(g_from_k(K_MAX)(GRID), (1 - GRID) ** 2 * (1 + GRID) / (2 * GRID))
    assert close(g_from_k(K_INV_SQRT)(GRID), symmetrize(INV_SQRT)(GRID), 1e-10)
    with pytest.raises(ParameterError):
        g_from_k(KFunction("bad", lambda x: 1.0 + 0 * x))


def test_parse_g():
    assert parse_g("neg_log") is NEG_LOG
    assert parse_g("wyd:0.5").id == "wyd:0.5"
    assert parse_g("tilde:neg_log") is X_LOG_X
    assert parse_g("sym:neg_log").id == "sym:neg_log"
    assert parse_g("k:bures").id == "k:bures"
    with pytest.raises(UnknownIdError, match="neg_log"):
        parse_g("nope")
    with pytest.raises(UnknownIdError):
        parse_g("k:nope")
    with pytest.raises(ParameterError):
        parse_g("wyd:abc")
    with pytest.raises(ParameterError, match=r"\{0,1\}"):
        parse_g("wyd:0")


# -- limits of the WYD family ---------------------------------------------------

LIMIT_GRID = log_grid(1e-2, 1e2, 201)
LOGX = np.log(LIMIT_GRID)


@pytest.mark.parametrize("h", [1e-2, 1e-3])
def test_wyd_small_t_tends_to_neg_log(h):
    err = np.abs(wyd(h)(LIMIT_GRID) + LOGX)
    assert np.all(err <= 5 * h * (1 + LOGX**2))


@pytest.mark.parametrize("h", [1e-2, 1e-3])
def test_tilde_wyd_small_t_tends_to_x_log_x(h):
    err = np.abs(tilde(wyd(h))(LIMIT_GRID) - LIMIT_GRID * LOGX)
    assert np.all(err <= 5 * h * (1 + LOGX**2) * LIMIT_GRID)


@pytest.mark.parametrize("h", [1e-2, 1e-3])
def test_wyd_near_one_is_tilde_wyd_plus_affine(h):
    # wyd(1-h) = tilde(wyd(h)) + (1-x)/(h(1-h)): so t -> 1 recovers x log x
    # only after the divergent affine part (which cancels in every builder)
    lhs = wyd(1 - h)(LIMIT_GRID)
    rhs = tilde(wyd(h))(LIMIT_GRID) + (1 - LIMIT_GRID) / (h * (1 - h))
    assert close(lhs, rhs, 1e-9)


def test_wyd_near_one_is_not_pointwise_neg_log():
    # the pointwise statement wyd(1-h) -> -log x does not hold: the affine
    # part (1-x)/h blows up, so the deviation grows as h shrinks
    devs = [np.max(np.abs(wyd(1 - h)(LIMIT_GRID) + LOGX)) for h in (1e-2, 1e-3)]
    assert devs[1] > devs[0] > 1.0
