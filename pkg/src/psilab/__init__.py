"""psilab: a desk-scale laboratory for wave mechanics on a periodic 1-D grid.

The wave equation and its density/phase (hydrodynamic) form are implemented
side by side; every expectation value comes in multiple algebraically
equivalent routes so the standard identities — local energy balance, the
quantum-potential decomposition, the Fisher-information relation, continuity,
dispersion, potential recovery, tunneling, and the classical limit — run as
executable checks.
"""

from .errors import (ConfigurationError, DegenerateStateError, DensityFloorError,
                     DivergenceError, NumericalError, PsilabError,
                     ScenarioParseError, StructuralError, UnsupportedMethodError)
from .grid import (DEFAULT_FLOOR, Grid, MadelungField, PhaseGradient, WaveField,
                   compose, decompose, from_momentum, integrate, phase_gradient,
                   spectral_gradient, spectral_laplacian, to_momentum)
from .states import (GaussianPacket, HOCoherent, HOEigenstate, PlaneWave,
                     StateSpec, Superposition, free_packet_width,
                     hermite_functions, ho_energy, oscillator_length, sample)
from .potentials import (Barrier, Constant, Harmonic, PotentialSpec, Quartic,
                         Tabulated, TimeRamped, Well, Zero, is_time_independent,
                         potential_gradient, sample_potential)
from .observables import (Expectation, LocalFields, fisher_information,
                          local_fields, mean_kinetic, mean_momentum,
                          mean_quantum_potential, mean_total_energy,
                          quantum_potential)
from .propagators import (EvolutionResult, apply_hamiltonian, evolve, step_cn,
                          step_split, time_derivative)
from .hydro import (HARD_FLOOR, EquivalenceReport, HydroResult, HydroState,
                    equivalence_report, hydro_step, madelung_rhs, phase_winding,
                    run_hydro)
from .verify import (ClassicalRun, RecoveredPotential, ResidualSeries,
                     TunnelingReport, classical_limit_sweep, classical_rk4,
                     dispersion_check, recover_potential, residuals,
                     tunneling_probe)

__version__ = "0.1.0"
