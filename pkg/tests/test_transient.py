import numpy as np
import pytest

from ccosim.ring import RingConfig, frequency
from ccosim.stage import StageTopology as T
from ccosim.transient import STAGE_DEVICES, crossing_phase, ring_wiring, transient_oracle


@pytest.fixture(scope="module")
def runs():
    cfg = RingConfig()
    return {t: transient_oracle(cfg.with_topology(t)) for t in T}


def test_device_counts():
    assert len(STAGE_DEVICES[T.Conventional8T]) == 8
    assert len(STAGE_DEVICES[T.ProposedBothStartup]) == 6
    assert len(STAGE_DEVICES[T.ProposedPmosStartup]) == 5
    assert len(STAGE_DEVICES[T.Proposed4T]) == 4


def test_even_ring_crosses_pair_at_wrap():
    w = ring_wiring(T.Proposed4T, 4)
    # stage 0 MP1 gate is INP, wired to outn of the last stage (node 7)
    assert w[0, 1] == 7


def test_crossing_phase_mapping():
    ph = crossing_phase(np.array([0, 1, 0, 1]), np.array([1, 0, 0, 1]), 4)
    assert list(ph) == [0, 1, 4, 5]


def test_oscillating_topologies(runs):
    for t in (T.Conventional8T, T.ProposedBothStartup, T.ProposedPmosStartup, T.ProposedNmosStartup):
        r = runs[t]
        assert not r.locked
        r.edges.validate()
        assert r.frequency > 0


def test_bare_cell_locks_from_uniform_state(runs):
    assert runs[T.Proposed4T].locked
    assert runs[T.Proposed4T].frequency == 0.0


def test_proposed_faster_than_conventional(runs):
    assert runs[T.ProposedBothStartup].frequency > runs[T.Conventional8T].frequency


def test_single_startup_slower_than_conventional(runs):
    assert runs[T.ProposedPmosStartup].frequency < runs[T.Conventional8T].frequency


def test_step_convergence():
    cfg = RingConfig()
    a = transient_oracle(cfg, steps_per_period=1000).frequency
    b = transient_oracle(cfg, steps_per_period=2000).frequency
    assert b == pytest.approx(a, rel=1e-3)


def test_oracle_scales_with_current():
    cfg = RingConfig()
    a = transient_oracle(cfg.with_current(1e-7)).frequency
    b = transient_oracle(cfg.with_current(1e-6)).frequency
    assert b / a == pytest.approx(10, rel=1e-3)


def test_bad_initial_state_shape():
    with pytest.raises(ValueError):
        transient_oracle(RingConfig(), initial_state=np.zeros(3))


def test_phase_model_is_slower_than_oracle():
    # structural gap between the phase-average engine and node integration
    cfg = RingConfig()
    assert frequency(cfg) < transient_oracle(cfg).frequency
