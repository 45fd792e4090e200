"""Code endomorphisms of linear block codes and endomorphism ensemble
decoding (EED): GF(p) linear algebra, code constructions, the endomorphism
structure/reconstruction/search toolkit, BP/SC/ML decoders, the ensemble
pipeline, and a reproducible Monte-Carlo FER simulator.
"""

from .codes import (
    LinearCode,
    Permutation,
    PolarCode,
    code_from_pcm,
    extended_golay,
    hamming_7_4,
    is_automorphism,
    is_endomorphism_matrix,
    overcomplete_pcm,
    polar_32_16,
    polar_code,
    rm_frozen_set,
)
from .decoders import (
    LLR_MAX,
    BpDecoder,
    DecodeOutcome,
    MlDecoder,
    ScDecoder,
    boxplus,
    boxplus_fold,
    bp_decode,
    llr_correlation,
    ml_decode,
    sc_decode,
)
from .eed import EedDecoder, EedPath, EedResult, eed_decode, load_ensemble, make_paths, path_decode, preprocess
from .endo import (
    Ccm,
    Endomorphism,
    NotEndomorphismError,
    Reconstruction,
    bundle_read,
    bundle_write,
    compute_ccm,
    coset_expand,
    endo_code_pcm,
    endo_from_matrix,
    endo_from_vec,
    endo_from_z,
    lta_sample,
    octad_involutions,
    reconstruction,
    sample_endomorphisms,
    superpose,
)
from .gfmat import (
    FieldMatrix,
    FieldVector,
    ShapeError,
    column_m_form,
    inverse,
    kron,
    mat_mul,
    null_space_basis,
    rank,
    row_diagonalize,
    unvec,
    vec,
)
from .sim import FerRecord, SimConfig, awgn_llr, read_csv, run_fer, run_paired_fer, write_csv

__version__ = "0.1.0"
