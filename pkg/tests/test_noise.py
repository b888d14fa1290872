import math

import numpy as np
import pytest

from freqgate.atom_photon import AtomQubit, cadmium_like, excite_and_decay_pi_filtered
from freqgate.gate import beam_splitter, herald, ideal_output, zz_measurement_gate
from freqgate.noise import (BALANCED, SPEED_OF_LIGHT, EmissionEnvelope, InterferometerPhases,
                            TrapParams, differential_phase_fidelity, doppler_fidelity_sweep,
                            doppler_regime_check, doppler_sigma, interferometer_phase_gate,
                            mode_overlap, path_mismatch_phase, position_phase,
                            sample_doppler_overlaps)
from freqgate.quantum_core import reorder, tensor

from oracles import overlap_quadrature

GAMMA = 2 * math.pi * 50e6


@pytest.fixture
def cd():
    return cadmium_like(eta_b=0.5)


def gate_with_emission_phases(a, b, phi1, phi2):
    s1 = position_phase(excite_and_decay_pi_filtered(a, 1), phi1)
    s2 = position_phase(excite_and_decay_pi_filtered(b, 2), phi2)
    joint = reorder(tensor(s1, s2), ["atom1", "atom2", "arm1_nu0", "arm1_nu1",
                                     "arm2_nu0", "arm2_nu1"])
    rho, p = herald(beam_splitter(joint))
    return rho / p, p


def test_position_phase_zero_is_identity():
    s = excite_and_decay_pi_filtered(AtomQubit(0.6, 0.8j))
    np.testing.assert_array_equal(position_phase(s, 0.0).amplitudes, s.amplitudes)


def test_position_phase_is_global_on_atom_photon_state():
    s = excite_and_decay_pi_filtered(AtomQubit(0.6, 0.8j))
    t = position_phase(s, 1.234)
    np.testing.assert_allclose(t.amplitudes, np.exp(1.234j) * s.amplitudes, atol=1e-15)


def test_emission_phase_pi_on_one_atom(rng):
    a, b = AtomQubit.haar(rng), AtomQubit.haar(rng)
    rho, _ = gate_with_emission_phases(a, b, math.pi, 0.0)
    psi = ideal_output(a, b).amplitudes
    assert np.vdot(psi, rho @ psi).real == pytest.approx(1.0, abs=1e-12)


def test_common_arm_phase_is_harmless(rng):
    for _ in range(20):
        a, b = AtomQubit.haar(rng), AtomQubit.haar(rng)
        phases = InterferometerPhases.common(*rng.uniform(0, 2 * math.pi, 2))
        assert interferometer_phase_gate(a, b, phases).fidelity > 1 - 1e-12


@pytest.mark.parametrize("delta", [0.0, 0.3, math.pi / 2, math.pi, 5.0])
def test_differential_phase_fidelity(delta):
    res = interferometer_phase_gate(BALANCED, BALANCED, InterferometerPhases.differential(delta))
    assert res.fidelity == pytest.approx(math.cos(delta / 2) ** 2, abs=1e-12)
    assert differential_phase_fidelity(delta) == pytest.approx(math.cos(delta / 2) ** 2)


def test_relative_phase_bookkeeping():
    p = InterferometerPhases(0.1, 0.5, 0.2, 0.3)
    assert p.relative_phase == pytest.approx(0.3)
    # only the relative phase matters for the heralded state
    a = interferometer_phase_gate(BALANCED, BALANCED, p)
    b = interferometer_phase_gate(BALANCED, BALANCED, InterferometerPhases.differential(0.3))
    assert a.fidelity == pytest.approx(b.fidelity, abs=1e-12)


def test_identical_envelopes_overlap_one():
    e = EmissionEnvelope(GAMMA)
    assert mode_overlap(e, e) == pytest.approx(1.0, abs=1e-15)


def test_detuned_overlap_matches_quadrature():
    e1, e2 = EmissionEnvelope(GAMMA), EmissionEnvelope(GAMMA, detuning=GAMMA)
    j = mode_overlap(e1, e2)
    assert abs(j) ** 2 == pytest.approx(0.5, abs=1e-12)
    ref = overlap_quadrature(e1, e2, 60 / GAMMA)
    assert abs(j - ref) < 1e-9


def test_delayed_overlap_matches_quadrature():
    tau = 0.7 / GAMMA
    e1, e2 = EmissionEnvelope(GAMMA), EmissionEnvelope(GAMMA, emission_time_offset=tau)
    j = mode_overlap(e1, e2)
    assert abs(j) == pytest.approx(math.exp(-GAMMA * tau / 2), abs=1e-12)
    ref = overlap_quadrature(e1, e2, 60 / GAMMA)
    assert abs(j - ref) < 1e-9


def test_unequal_linewidths_match_quadrature():
    e1 = EmissionEnvelope(GAMMA, detuning=0.3 * GAMMA, emission_time_offset=0.2 / GAMMA)
    e2 = EmissionEnvelope(1.7 * GAMMA, detuning=-0.4 * GAMMA)
    ref = overlap_quadrature(e1, e2, 60 / GAMMA)
    assert abs(mode_overlap(e1, e2) - ref) < 1e-9
    assert abs(mode_overlap(e1, e2)) <= 1.0


def test_doppler_regime_cases(cd):
    assert doppler_regime_check(cd, TrapParams(2 * math.pi * 1e6, 0.0)).passed
    l_unit = cd.gamma / (cd.k_mag * 2 * math.pi * 1e6)
    rep = doppler_regime_check(cd, TrapParams(2 * math.pi * 1e6, l_unit))
    assert rep.ratio == pytest.approx(1.0)
    assert rep.status == "warn"


def test_doppler_default_operating_point(cd):
    trap = TrapParams(2 * math.pi * 1e6, 50e-9)
    rep = doppler_regime_check(cd, trap)
    # |k| nu_t l_s / gamma with k = 2pi/214.5nm, nu_t = 2pi MHz, gamma = 2pi 50 MHz
    expected = (2 * math.pi / 214.5e-9) * 1e6 * 50e-9 / 50e6
    assert rep.ratio == pytest.approx(expected, rel=1e-12)
    assert rep.ratio == pytest.approx(0.0293, abs=1e-4)
    assert rep.passed


def test_sampled_doppler_overlaps_near_one_in_regime(cd, rng):
    trap = TrapParams(2 * math.pi * 1e6, 50e-9)
    j = sample_doppler_overlaps(cd, trap, rng, 10_000)
    assert np.all(np.abs(j) <= 1 + 1e-12)
    sigma = doppler_sigma(cd, trap) / cd.gamma
    # E|J|^2 = E[1/(1+x^2)] with x ~ N(0, 2 sigma^2): ~1 - 2 sigma^2
    assert np.mean(np.abs(j) ** 2) == pytest.approx(1 - 2 * sigma ** 2, abs=5e-4)


def test_doppler_sweep_endpoints_and_monotonic(cd):
    trap = TrapParams(2 * math.pi * 1e6, 50e-9)
    sweep = doppler_fidelity_sweep(cd, trap, np.linspace(0, 3, 31))
    fid = [r.fidelity for r in sweep.rows]
    assert fid[0] == pytest.approx(1.0, abs=1e-12)
    assert all(x >= y - 1e-15 for x, y in zip(fid, fid[1:]))
    row = sweep.rows[10]  # delta = gamma
    assert row.overlap_sq == pytest.approx(0.5, abs=1e-12)
    # balanced inputs: F = (1 + |J|^2) / (2 (2 - |J|^2)), p = (2 - |J|^2)/4
    assert row.fidelity == pytest.approx(0.5, abs=1e-12)
    assert row.coincidence_prob == pytest.approx(0.375, abs=1e-12)


def test_path_mismatch_phase_values(cd):
    split = 2 * math.pi * (14e9 + 2.1e9)
    assert path_mismatch_phase(cd, 1e-3) == pytest.approx(split * 1e-3 / SPEED_OF_LIGHT)
    # 1 um of arm mismatch is harmless; 1 mm already costs about 2%
    dphi_um = path_mismatch_phase(cd, 1e-6)
    assert dphi_um == pytest.approx(3.374e-4, rel=1e-3)
    res = interferometer_phase_gate(BALANCED, BALANCED, InterferometerPhases.differential(dphi_um))
    assert res.fidelity > 0.999999
    dphi_mm = path_mismatch_phase(cd, 1e-3)
    assert math.cos(dphi_mm / 2) ** 2 == pytest.approx(0.9719, abs=1e-4)


def test_phase_gate_reports_null_for_symmetric_inputs():
    res = interferometer_phase_gate(AtomQubit(1, 0), AtomQubit(1, 0),
                                    InterferometerPhases.differential(0.1))
    assert res.state is None and math.isnan(res.fidelity)
    assert zz_measurement_gate(AtomQubit(1, 0), AtomQubit(1, 0)).probability == 0


def test_large_detuning_limit(cd):
    # J -> 0: all four branches herald incoherently; for balanced inputs the
    # overlap with (|01> - |10>)/sqrt2 tends to 1/4 and p(1,1) to 1/2
    trap = TrapParams(2 * math.pi * 1e6, 50e-9)
    row = doppler_fidelity_sweep(cd, trap, [1e4]).rows[0]
    assert row.overlap_sq < 1e-7
    assert row.fidelity == pytest.approx(0.25, abs=1e-7)
    assert row.coincidence_prob == pytest.approx(0.5, abs=1e-7)
