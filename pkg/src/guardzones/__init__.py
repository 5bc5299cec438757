"""Finite DS-CDMA ad hoc networks with exclusion and CSMA guard zones."""
from .channel import (ChannelConfig, ChannelSample, NormalizedPowers, chip_function,
                      draw_channel_sample, effective_gain, ensemble_powers,
                      normalized_powers, path_loss)
from .metrics import (ExperimentResult, MonteCarloEnsemble, MonteCarloSpec,
                      TargetUnachievableError, average_outage, evaluate, latency,
                      min_guard_radius, min_spreading_gain, transmission_capacity)
from .oracle import OracleConfig, empirical_outage
from .outage import (NumericalConsistencyError, OutageParams, conditional_outage, g_ell,
                     h_coefficients, h_t, psi, truncated_product)
from .spatial import (NetworkEnsemble, NetworkGeometry, NetworkRealization,
                      PlacementInfeasibleError, Point, apply_guard_zones, guard_zone_flags,
                      place_ensemble, place_network)

__version__ = "0.1.0"
