"""Link-level Monte Carlo simulator for adaptive multi-user mmWave channel
estimation with random beamforming: sparse geometric channels, unitary beam
codebooks, Bernoulli-Gaussian GAMP recovery, stability-based stopping,
usage- and estimate-driven beam-probability adaptation, and effective-rate
evaluation against exhaustive and fixed-duration baselines.
"""
from ._kernels import HAS_NUMBA, backend_name
from .channel import (
    CellUser,
    ChannelRealization,
    PathSet,
    assemble_channel,
    draw_cell_user,
    draw_channel,
    draw_paths,
    rescale_gains,
    virtual_channel,
)
from .codebook import Codebook, build_codebook, steering_vector
from .config import ExperimentConfig, SchemeSpec, config_from_file, dbm_to_watts, parse_scheme
from .evaluation import (
    DataBeamSelection,
    achievable_rate,
    effective_rate,
    empirical_cdf,
    schedule_first_k,
    select_data_beams,
    shared_band_effective_rate,
)
from .gamp import GampConfig, GampDivergence, GampPrior, GampResult, gamp_estimate
from .harness import ExperimentResult, ResultRow, run_experiment, write_results
from .measurement import (
    BeamSelection,
    MeasurementLedger,
    PilotConfig,
    select_beams,
    sensing_block,
    simulate_measurement,
)
from .numerics import (
    complex_gaussian,
    kron,
    poisson_sample,
    rng_fork,
    unvec,
    vec,
    weighted_sample_without_replacement,
)
from .session import (
    COMPLETE,
    CONTINUE,
    TIMEOUT,
    BsBeamScheduler,
    FeedbackEvent,
    SwiftConfig,
    SystemGeometry,
    UserSession,
    binarize,
    check_stopping,
    fpa_bs_weights,
    fpa_ue_weights,
    pepa_ue_weights,
    run_single_session,
)

__version__ = "0.1.0"
