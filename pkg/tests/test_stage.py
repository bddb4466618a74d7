import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccosim.stage import (
    SINGLE_STARTUP,
    PHASE_CURRENTS,
    DegenerateCurrentError,
    Rails,
    StageCaps,
    StageTopology,
    delay_ratio,
    load_capacitance,
    phase_currents,
    stage_delay,
)

T = StageTopology
CAPS = StageCaps()


def test_load_capacitance_formulas():
    c = StageCaps(1.0, 2.0)
    assert load_capacitance(T.Conventional8T, c) == 8 + 8
    assert load_capacitance(T.ProposedBothStartup, c) == 6 + 6
    assert load_capacitance(T.ProposedPmosStartup, c) == 7 + 6
    assert load_capacitance(T.ProposedNmosStartup, c) == 7 + 6
    assert load_capacitance(T.Proposed4T, c) == 5 + 6


def test_load_ratio_is_three_quarters_when_cgs_is_twice_cgd():
    assert load_capacitance(T.ProposedBothStartup, CAPS) / load_capacitance(T.Conventional8T, CAPS) == pytest.approx(0.75, abs=1e-15)


@given(st.floats(1e-18, 1e-12), st.floats(1e-18, 1e-12))
def test_proposed_always_lighter(cgd, cgs):
    c = StageCaps(cgd, cgs)
    conv = load_capacitance(T.Conventional8T, c)
    for t in (T.ProposedBothStartup, *SINGLE_STARTUP, T.Proposed4T):
        assert load_capacitance(t, c) < conv


def test_phase_currents_composition():
    conv = phase_currents(T.Conventional8T)
    prop = phase_currents(T.ProposedBothStartup)
    assert conv.composed == pytest.approx((0.01, 0.06, 0.09, 0.04))
    assert prop.composed == pytest.approx((0.01, 0.06, 0.07, 0.02))
    assert conv.rule() == "MP1 + MP3 - MN3"
    assert prop.rule() == "MP1 - MN3"


def test_table_values():
    assert PHASE_CURRENTS["MP1"] == (0.02, 0.07, 0.07, 0.02)
    assert PHASE_CURRENTS["MP3"] == (0.0, 0.0, 0.02, 0.02)
    assert PHASE_CURRENTS["MN3"] == (0.01, 0.01, 0.0, 0.0)


def test_delay_ratio_value():
    # frequency ratio 1 / 0.8662 = 1.1545
    assert delay_ratio() == pytest.approx(0.86618, abs=1e-4)
    assert 1 / delay_ratio() == pytest.approx(1.156, abs=0.01)


@given(st.floats(1e-9, 1e-3))
def test_delay_inversely_proportional_to_drive(i):
    d1 = stage_delay(T.Conventional8T, CAPS, Rails(), i)
    d2 = stage_delay(T.Conventional8T, CAPS, Rails(), 2 * i)
    assert d1 == pytest.approx(2 * d2)


def test_penalty_slows_stage():
    a = stage_delay(T.ProposedBothStartup, CAPS, Rails(), 1e-6)
    b = stage_delay(T.ProposedBothStartup, CAPS, Rails(), 1e-6, penalty=0.2)
    assert b == pytest.approx(a / 0.8)


def test_degenerate_current_rejected():
    with pytest.raises(DegenerateCurrentError):
        stage_delay(T.Conventional8T, CAPS, Rails(), 0.0)


def test_rails_validation():
    with pytest.raises(ValueError):
        Rails(dv=(0.1, 0.1, 0.1, 0.1))
    with pytest.raises(ValueError):
        Rails(vmin=0.7)
    assert Rails().swing == pytest.approx(0.6)


def test_topology_parse():
    assert T.parse("conventional8t") is T.Conventional8T
    assert T.parse("Proposed4T") is T.Proposed4T
    with pytest.raises(ValueError):
        T.parse("nope")
