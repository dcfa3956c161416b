from polarkern.logger import setup_logger
from polarkern.metrics import Pdp, error_exponent, partial_distance_profile, target_pdp  # noqa: F401
from polarkern.models.binmatrix import BinMatrix, BinVector, read_kernel, write_kernel  # noqa: F401
from polarkern.rmld.decoder import build_decoder, decode_phase, decoder_complexity  # noqa: F401

root_logger = setup_logger("root")
