import numpy as np
import pytest

from kkplab.diagnostics.charges import Rectangle, closed_form_charge, state_charge
from kkplab.model import LineWave, ModelParams
from kkplab.spectral import Grid2D, SpectralState, init_line_soliton

P = ModelParams(-1.0, 1)
W = LineWave.zero_background(P, 0.5)
BIG = Rectangle(-30.0, 30.0, -10.0, 10.0)


@pytest.mark.parametrize("charge_id", [1, 2])
def test_closed_form_charge_vanishes_on_nested_rectangles(charge_id):
    for frac in (0.0, 0.25, 0.5):
        assert abs(closed_form_charge(charge_id, P, W, BIG.shrunk(frac), t=0.3)) < 1e-9


@pytest.mark.parametrize("sigma", [1, -1])
def test_closed_form_charge_other_members(sigma):
    p = ModelParams(-4.0, sigma)
    w = LineWave.from_kappa(p, 1.5, -0.4)
    rect = Rectangle(-12.0, 9.0, -4.0, 6.0)
    for cid in (1, 2):
        assert abs(closed_form_charge(cid, p, w, rect, t=0.7)) < 1e-8


def test_rectangle():
    r = BIG.shrunk(0.5)
    assert (r.x0, r.x1, r.y0, r.y1) == (-15.0, 15.0, -5.0, 5.0)
    with pytest.raises(ValueError):
        Rectangle(1.0, 0.0, 0.0, 1.0)


def test_bad_charge_id():
    with pytest.raises(ValueError):
        closed_form_charge(3, P, W, BIG)


@pytest.fixture(scope="module")
def tilted_state():
    g = Grid2D(256, 64, 100.0, 50.0)
    p = ModelParams(-1.0, 1)
    w = LineWave.zero_background(p, 2.0)
    return p, SpectralState.from_physical(g, init_line_soliton(g, p, w))


@pytest.mark.parametrize("charge_id", [1, 2])
def test_state_charge_vanishes(tilted_state, charge_id):
    p, s = tilted_state
    g = s.grid
    rect = Rectangle(g.x[40], g.x[200], g.y[10], g.y[50])
    scale = float(np.max(np.abs(s.u))) * g.lx * g.ly
    assert abs(state_charge(charge_id, s, p, rect)) < 1e-10 * scale


def test_state_charge_zero_field():
    g = Grid2D(32, 16, 10.0, 5.0)
    s = SpectralState.from_physical(g, np.zeros((32, 16)))
    rect = Rectangle(g.x[4], g.x[20], g.y[2], g.y[10])
    assert state_charge(1, s, P, rect) == 0.0
    assert state_charge(2, s, P, rect) == 0.0


def test_state_charge_guards(tilted_state):
    p, s = tilted_state
    g = s.grid
    with pytest.raises(ValueError, match="seam"):
        state_charge(1, s, p, Rectangle(g.x[0], g.x[10], g.y[5], g.y[9]))
    with pytest.raises(ValueError):
        state_charge(1, s, p, Rectangle(g.x[4] + 0.01, g.x[10], g.y[5], g.y[9]))
    g1 = Grid2D(32, 1, 10.0, 1.0)
    with pytest.raises(ValueError, match="2D"):
        state_charge(1, SpectralState.from_physical(g1, np.zeros((32, 1))), p,
                     Rectangle(g1.x[2], g1.x[5], -0.1, 0.1))
