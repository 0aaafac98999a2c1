"""Bracket products, module norms and filters for lattice translation systems.

Core layout:

- ``lattice``: dilation matrices, embeddings, cosets, annihilators
- ``signal``: analytic and grid signals, Fourier transforms, group actions
- ``bracket``: time/Fourier bracket products, module actions, bridge check
- ``modnorm``: module norms and their level relations
- ``filters``: filter extraction, cascade iteration, built-in systems
- ``verify``: multiwavelet orthonormality/completeness verification
- ``service``/``cli``: FastAPI front end and its thin-client CLI
"""
from .bracket import (
    FilterSeq,
    bracket_fourier,
    bracket_fourier_level,
    bracket_level,
    bracket_time,
    bridge_check,
    module_action_fourier,
    module_action_level,
    module_action_time,
)
from .errors import (
    Divergence,
    DomainMismatch,
    GridMismatch,
    IncompatibleGrids,
    LevelOverflow,
    NotExpanding,
    RangeTooSmall,
    SingularMatrix,
    SupportClipped,
    TailTooLarge,
    UnknownName,
    Unsupported,
    WavebracketError,
    WindowTooSmall,
    WrongWaveletCount,
)
from .filters import (
    FilterBank,
    builtin,
    cascade,
    db4_scaling_taps,
    extract_filters,
    extract_filters_fourier,
    reconstruction_residual,
)
from .lattice import (
    DilationMatrix,
    Embedding,
    coset_reps,
    dual_fiber_offsets,
    identity_embedding,
    level_embedding,
    make_dilation,
)
from .modnorm import (
    NormReport,
    dilation_isometry_check,
    norm_chain_check,
    refinement_residual,
    x_norm,
    y_norm,
)
from .signal import (
    AnalyticSignal,
    GridSignal,
    Piece,
    TorusFunction,
    dilate,
    fourier,
    fourier_dilate,
    inverse_fourier,
    random_band_signal,
    sample,
    translate,
)
from .verify import (
    VerifyReport,
    classify,
    haar_test_corpus,
    shannon_test_corpus,
    verify_completeness,
    verify_orthonormality,
    verify_system,
)

__version__ = "0.1.0"
