"""Link-level simulator and closed-form analytics for RIS-aided spatial
scattering modulation over sparse mmWave MIMO channels."""

from .analytics import (
    LinkBudget,
    UPEP_METHODS,
    abep_union,
    cpep_correct_beam,
    cpep_wrong_beam,
    diversity_gain,
    ergodic_capacity_lb,
    system_throughput,
    upep_asymptotic_correct,
    upep_asymptotic_wrong,
    upep_mgf_correct,
    upep_mgf_wrong,
    upep_pdf_correct,
    upep_pdf_wrong,
    upep_qapprox_correct,
    upep_qapprox_wrong,
)
from .channel import (
    AngleSet,
    ArrayGeometry,
    ChannelRealization,
    RisPhaseProfile,
    align_ris_phases,
    composite_channel,
    composite_phase_factor,
    effective_branch_gain,
    los_channel,
    orthogonality_leakage,
    sample_angles,
    sample_channel,
    sv_channel,
    ula_steering,
    upa_steering,
)
from .modulation import (
    Constellation,
    ErrorEvent,
    SsmConfig,
    build_constellation,
    demap_indices,
    hamming_distance,
    make_config,
    map_bits,
)
from .montecarlo import (
    SCHEMES,
    SweepResult,
    TrialPlan,
    run_ber_point,
    simulate_abep,
    simulate_benchmark,
    simulate_capacity,
    simulate_random_selection,
)
from .orderstats import (
    OrderedGainLaw,
    ordered_cdf,
    ordered_mgf,
    ordered_pdf,
    sample_sorted_gains,
    unsorted_pdf,
)

__version__ = "0.1.0"
