from polarkern.bler.channel import ChannelConfig  # noqa: F401
from polarkern.bler.code import PolarCode, encode, polar_transform, sc_decode, sc_decode_genie  # noqa: F401
from polarkern.bler.frozen import FrozenSetEstimator, estimate_frozen_set, select_frozen  # noqa: F401
from polarkern.bler.simulation import BlerResult, BlerSimulator, bler_frame, simulate_bler  # noqa: F401
