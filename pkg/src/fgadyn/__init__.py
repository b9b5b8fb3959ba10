"""Outer automorphisms of free groups: words, graph maps, strata, currents and dynamics."""

__version__ = "0.1.0"

from .automorphisms import (  # noqa: E402
    Automorphism,
    abelianization,
    apply,
    apply_class,
    compose,
    free_product,
    identity,
    in_IA_mod3,
    power,
)
from .currents import (  # noqa: E402
    CurrentVector,
    FrequencyVector,
    from_class,
    marked_letter_fraction,
    proj_distance,
    push_forward,
    scale,
)
from .dynamics import (  # noqa: E402
    ExperimentConfig,
    atoroidal_scan,
    gns_experiment,
    growth_profile,
    ns_experiment,
    orbit,
    pingpong,
    subgroup_scan,
)
from .graphs import (  # noqa: E402
    GraphSelfMap,
    MarkedGraph,
    Turn,
    bcc_empirical,
    bcc_upper,
    legal_goodness,
    nielsen_search,
    relative_goodness,
    rose_map,
    tighten,
)
from .strata import classify_stratum, extension_kind, maximal_filtration, pf_eigenvalue  # noqa: E402
from .words import CyclicWord, Word, cyclic_canonical, occurrences, parse_word, reduce  # noqa: E402
