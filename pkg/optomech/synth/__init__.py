from .rng import bin_generator, gamma_factors, normal_factors
from .synthesizer import (
    SynthRequest,
    apply_periodogram_noise,
    model_spectrum,
    relative_bin_sd,
    synthesize,
    synthesize_group_delay,
)
