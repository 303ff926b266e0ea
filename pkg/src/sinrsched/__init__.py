"""Slotted-time simulator and algorithm library for wireless link scheduling
under the SINR physical interference model."""

from .arrivals import (
    RateVector,
    build_rate_vector,
    parse_rate_vector,
    rate_vector_to_text,
    sample,
    validate_rate_vector,
    zero_rate_vector,
)
from .model import (
    Instance,
    Link,
    Point,
    distance,
    generate_instance,
    instance_to_text,
    length_diversity,
    load_instance,
    parse_instance,
    save_instance,
)
from .scheduling import (
    PacketBatch,
    Schedule,
    schedule_greedy,
    schedule_length,
    validate_schedule,
)
from .simulator import (
    KERNEL_BACKEND,
    InvariantViolation,
    SimConfig,
    StabilityResult,
    Trace,
    default_theta,
    diagnostic_out_affectance,
    estimate_stability,
    run_centralized,
    run_distributed,
)
from .sinr import (
    DeadLinkError,
    PowerAssignment,
    affectance,
    affectance_matrix,
    affectance_sum,
    classify_power,
    find_dead_links,
    is_feasible,
    max_avg_affectance,
    power,
)

__version__ = "0.1.0"
