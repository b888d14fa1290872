"""Two atoms, two photons, one beam splitter: the heralded ZZ measurement.

Run with ``python3 demos/01_zz_gate.py``.
"""
# %%
import math

import numpy as np

from freqgate.atom_photon import AtomQubit, excite_and_decay_pi_filtered, haar_amplitudes
from freqgate.gate import (EfficiencyModel, coincidence_probability, interfere,
                           pattern_probabilities, simulate_success_count, success_probability,
                           zz_measurement_gate)

# %% [markdown]
# Each atom emits one photon whose frequency records the qubit state.

# %%
r = 1 / math.sqrt(2)
atom = AtomQubit(r, r)
print(excite_and_decay_pi_filtered(atom).to_json())

# %% [markdown]
# After the beam splitter the detector statistics depend on the inputs.
# Identical photons always leave through the same port.

# %%
for c, d in [((1, 0), (1, 0)), ((1, 0), (0, 1)), ((r, r), (r, r))]:
    probs = pattern_probabilities(interfere(AtomQubit(*c), AtomQubit(*d)))
    shown = {k: round(v, 4) for k, v in sorted(probs.items())}
    label = f"c=({c[0]:.3g}, {c[1]:.3g}) d=({d[0]:.3g}, {d[1]:.3g})"
    print(f"{label:<34} {shown}")

# %% [markdown]
# One click per detector heralds c0 d1|01> - c1 d0|10>.

# %%
res = zz_measurement_gate(AtomQubit(0.6, 0.8), AtomQubit(0.8, 0.6))
print("coincidence probability", round(res.probability, 6))
print("heralded state", np.round(res.state.amplitudes, 6))

# %% [markdown]
# Averaged over random inputs the coincidence probability is 1/4, which is
# where the factor 1/4 in the success probability comes from.

# %%
rng = np.random.default_rng(7)
c, d = haar_amplitudes(rng, 200_000), haar_amplitudes(rng, 200_000)
print("Haar average", coincidence_probability(c, d).mean())

eff = EfficiencyModel(eta_d=0.8, eta_c=0.5, eta_b=0.5)
n = 1_000_000
wins = simulate_success_count(n, eff, 1.0, rng)
print(f"simulated rate {wins / n:.5f}, formula {success_probability(eff):.5f}")
