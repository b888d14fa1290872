"""Numerical tolerances shared by every module."""

AMPLITUDE_ATOL = 1e-12
NORM_ATOL = 1e-12
NULL_PROBABILITY = 1e-14
PURITY_ATOL = 1e-10
# amplitudes below this are dropped from JSON debug dumps
DUMP_CUTOFF = 1e-14
# CLI amplitude flags are renormalized (with a log note) beyond this
INPUT_NORM_ATOL = 1e-9
