"""Quench dynamics and recurrences in systems with strong long-range couplings."""

from .errors import CondensedPhaseError, NumericalError
from .kitaev import (BogolyubovField, QuenchProtocol, bogolyubov_angle, evolve, magnetization_trace, mode_frequency,
                     prepare_ground_state, run_quench, transverse_magnetization)
from .recurrence import (RecurrenceEstimate, SpectralEnsemble, avg_frequency, ball_volume, characteristic_function,
                         fidelity, first_recurrence_scan, kitaev_recurrence_bridge, recurrence_estimate, uniform_Q)
from .series import TimeSeries
from .spectra import (CouplingSpec, ModeSpectrum, discrete_spectrum, fourier_couplings, gap_scan,
                      hopping_coeff_limit, hopping_fourier_finite, lattice_coeff_ddim, pairing_coeff_limit,
                      pairing_fourier_finite, polylog_couplings)
from .spherical import (DensityOfStates, SphericalQuench, cesaro_fluctuation, critical_coupling, dos_powerlaw,
                        dos_semicircle, ermakov_width, fit_equilibration_time, quench_observable, solve_constraint)

__all__ = [name for name in dir() if not name.startswith("_")]
