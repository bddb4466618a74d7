import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccosim.lockstate import UNKNOWN, BooleanRingState, is_fixed_point, lock_state_analysis, next_state
from ccosim.stage import StageTopology as T

STARTUP = (T.ProposedPmosStartup, T.ProposedNmosStartup, T.ProposedBothStartup, T.Conventional8T)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_only_bare_cell_locks(n):
    assert len(lock_state_analysis(T.Proposed4T, n)) >= 1
    for t in STARTUP:
        assert lock_state_analysis(t, n) == set()


def test_bare_cell_count_n4():
    assert len(lock_state_analysis(T.Proposed4T, 4)) == 6


def test_lock_states_hold_on_floating_nodes():
    for s in lock_state_analysis(T.Proposed4T, 4):
        assert s.floating_nodes(T.Proposed4T)
        # a startup device removes the lock
        assert not is_fixed_point(T.ProposedBothStartup, s)


@given(st.integers(0, 255))
def test_next_state_levels(bits):
    s = BooleanRingState(bits, 4)
    nxt = next_state(T.Conventional8T, s)
    assert len(nxt) == 8
    assert set(nxt) <= {0, 1, UNKNOWN}


def test_state_bounds():
    with pytest.raises(ValueError):
        BooleanRingState(256, 4)


def test_enumeration_limit():
    with pytest.raises(ValueError):
        lock_state_analysis(T.Proposed4T, 9)


def test_state_str():
    assert str(BooleanRingState(0b00001111, 4)) == "10 10 10 10"
