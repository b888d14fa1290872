"""Which imperfections hurt the gate, and which do not.

Run with ``python3 demos/02_noise.py``.
"""
# %%
import math

import numpy as np

from freqgate.atom_photon import cadmium_like
from freqgate.noise import (BALANCED, EmissionEnvelope, InterferometerPhases, TrapParams,
                            doppler_fidelity_sweep, doppler_regime_check,
                            interferometer_phase_gate, mode_overlap, path_mismatch_phase)

species = cadmium_like(eta_b=0.5)

# %% [markdown]
# A path phase common to both frequencies of an arm factors out.

# %%
for phi in (0.3, 1.7, math.pi):
    res = interferometer_phase_gate(BALANCED, BALANCED, InterferometerPhases.common(phi))
    print(f"common phase {phi:.3f}: fidelity {res.fidelity:.15f}")

# %% [markdown]
# A phase between the two frequencies does not; the loss is cos^2(dphi/2).
# Arm-length mismatch produces such a phase through the 16.1 GHz splitting.

# %%
for mismatch in (1e-6, 1e-4, 1e-3, 1e-2):
    dphi = path_mismatch_phase(species, mismatch)
    res = interferometer_phase_gate(BALANCED, BALANCED, InterferometerPhases.differential(dphi))
    print(f"mismatch {mismatch * 1e3:8.3f} mm: phase {dphi:.3e} rad, fidelity {res.fidelity:.6f}")

# %% [markdown]
# Doppler shifts detune the two photons.  Overlap of the emission envelopes
# sets how much which-path information survives.

# %%
g = species.gamma
print("|J|^2 at delta = gamma:", abs(mode_overlap(EmissionEnvelope(g),
                                                   EmissionEnvelope(g, detuning=g))) ** 2)
trap = TrapParams.from_config({"nu_t_hz": 1e6, "l_s_nm": 50})
print(doppler_regime_check(species, trap).describe())

sweep = doppler_fidelity_sweep(species, trap, np.linspace(0, 2, 9))
for row in sweep.rows:
    print(f"delta/gamma {row.delta_over_gamma:4.2f}  |J|^2 {row.overlap_sq:.4f}  "
          f"fidelity {row.fidelity:.4f}  p(1,1) {row.coincidence_prob:.4f}")
