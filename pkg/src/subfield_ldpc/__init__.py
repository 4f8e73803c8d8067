"""Decoding non-binary LDPC codes over F_{p^r} on Tanner graphs expanded to a subfield F_{p^m}."""

from types import ModuleType as _ModuleType

from .channel import bi_awgn_symbol_probs, noise_sigma
from .codes import (
    AlistFormatError,
    EncodeError,
    ParityCheckMatrix,
    encode,
    is_codeword,
    load_pcm,
    random_regular_binary,
    random_relabel,
    save_pcm,
    syndrome,
)
from .decoders import (
    ALGORITHMS,
    DecodeConfig,
    Decoder,
    DecodeResult,
    Message,
    OpCounters,
    check_update_fft,
    check_update_llr_qspa,
    check_update_minmax,
    convergence_test,
    decode,
    init_cpvs,
    recommended_scaling,
    variable_update,
)
from .expansion import ExpandedGraph, expand, expand_codeword, expand_graph
from .gf import (
    ExtensionRep,
    FieldConstructionError,
    FieldTable,
    SubfieldError,
    build_extension_rep,
    build_field,
    psi_star,
    subfield_beta,
)
from .kernels import available as available_backends
from .kernels import default_backend
from .lattice import (
    CosetLattice,
    LocalCode,
    alt_rep,
    build_lattice,
    build_local_code,
    edge_rule,
    recover_symbol,
)
from .opcount import op_count_report
from .sim import FerRecord, SimConfig, Setup, run_fer, sweep_scaling

__version__ = "0.1.0"

__all__ = [k for k, v in dict(globals()).items() if not k.startswith("_") and not isinstance(v, _ModuleType)]
