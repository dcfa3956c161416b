from polarkern.rmld.complexity import comb_complexity  # noqa: F401
from polarkern.rmld.decoder import (  # noqa: F401
    RmldDecoder,
    build_decoder,
    compare_reuse,
    decode_kernel,
    decode_kernel_batch,
    decode_phase,
    decode_phase_batch,
    decoder_complexity,
    kernel_complexity,
)
from polarkern.rmld.extended import ExtendedKernel, extend_kernel  # noqa: F401
from polarkern.rmld.sections import SectionNode, SectionParts, build_punctured  # noqa: F401
from polarkern.rmld.tables import WvabTable, build_wvab  # noqa: F401
