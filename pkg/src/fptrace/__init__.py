"""Multimedia fingerprinting codes traceable under averaging attacks with adversarial noise."""

from .attack import (
    CarrierBasis,
    NoiseSpec,
    Syndrome,
    SyndromeExtractor,
    embed,
    extract_syndrome,
    forge,
    make_carriers,
    make_host,
)
from .construct import (
    ConversionResult,
    Gf2mField,
    T_from_delta,
    bch_parity_matrix,
    delta_from_T,
    random_code,
)
from .core import (
    BinaryCode,
    CodeFormatError,
    Coalition,
    DeltaStats,
    Signature,
    average_signature,
    binary_entropy,
    delta_stats,
    load_code,
    save_code,
)
from .estimate import (
    PModel,
    RateEstimate,
    exact_bad_row_prob,
    expected_bad_pairs_log2,
    find_code,
    mc_bad_row_prob,
    rate_lower_bound,
)
from .trace import CoalitionTracer, TraceResult, trace_euclidean, trace_hamming
from .verify import (
    VerificationReport,
    check_2t_independence,
    enumerate_coalitions,
    is_euclidean_ltc,
    is_hamming_ltc,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryCode",
    "CarrierBasis",
    "Coalition",
    "CoalitionTracer",
    "CodeFormatError",
    "ConversionResult",
    "DeltaStats",
    "Gf2mField",
    "NoiseSpec",
    "PModel",
    "RateEstimate",
    "Signature",
    "Syndrome",
    "SyndromeExtractor",
    "T_from_delta",
    "TraceResult",
    "VerificationReport",
    "average_signature",
    "bch_parity_matrix",
    "binary_entropy",
    "check_2t_independence",
    "delta_from_T",
    "delta_stats",
    "embed",
    "enumerate_coalitions",
    "exact_bad_row_prob",
    "expected_bad_pairs_log2",
    "extract_syndrome",
    "find_code",
    "forge",
    "is_euclidean_ltc",
    "is_hamming_ltc",
    "load_code",
    "make_carriers",
    "make_host",
    "mc_bad_row_prob",
    "random_code",
    "rate_lower_bound",
    "save_code",
    "trace_euclidean",
    "trace_hamming",
]
