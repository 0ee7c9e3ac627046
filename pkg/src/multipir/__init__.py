"""Storage-efficient Byzantine-robust PIR over multiplicity codes.

The database becomes the coefficients of an m-variate polynomial; the
codeword stores, at every point of F_q^m, the polynomial's Hasse
derivatives up to order s-1.  Splitting the codeword along the q affine
hyperplanes x_m = const gives each of q servers a 1/q slice, and any
symbol can be fetched privately with sigma transversal-line queries per
server, tolerating nu byzantine servers.
"""

from .field import Field, FieldError, binom_mod_p, field_of_order, make_field
from .gflinalg import InconsistentSystemError, SingularSystemError
from .mpoly import MultiPoly, random_poly
from .multcode import (
    CodeParams,
    Codeword,
    ParameterError,
    Share,
    encode,
    make_params,
    partition,
    scheme_table,
)
from .localdecode import LineDecodingError, local_decode, recover_symbol
from .pir import (
    ByzantineMode,
    ProtocolError,
    QueryPlan,
    answer,
    gen_queries,
    preprocess,
    reconstruct,
    retrieve_record,
)
from .transport import (
    Endpoint,
    InProcessTransport,
    ShareServer,
    SocketTransport,
    TransportError,
    read_share,
    serve,
    write_share,
)
from .unidecode import LineWord, bw_decode, decoding_radius, hermite_interpolate

__all__ = [
    "Field",
    "FieldError",
    "binom_mod_p",
    "field_of_order",
    "make_field",
    "InconsistentSystemError",
    "SingularSystemError",
    "MultiPoly",
    "random_poly",
    "CodeParams",
    "Codeword",
    "ParameterError",
    "Share",
    "encode",
    "make_params",
    "partition",
    "scheme_table",
    "LineDecodingError",
    "local_decode",
    "recover_symbol",
    "ByzantineMode",
    "ProtocolError",
    "QueryPlan",
    "answer",
    "gen_queries",
    "preprocess",
    "reconstruct",
    "retrieve_record",
    "Endpoint",
    "InProcessTransport",
    "ShareServer",
    "SocketTransport",
    "TransportError",
    "read_share",
    "serve",
    "write_share",
    "LineWord",
    "bw_decode",
    "decoding_radius",
    "hermite_interpolate",
]

__version__ = "0.1.0"
