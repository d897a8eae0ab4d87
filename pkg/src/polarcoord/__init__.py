"""Polar codes for channel resolvability and two-node strong coordination."""

__version__ = "0.1.0"

from .channels import (ChannelSpec, TargetSpec, capacity, cascade, is_degraded, joint_channel,
                       make_bec, make_bsc, parse_preset, sample_output)
from .construction import (CoordinationCode, ConstructionParams, IndexPartition, build_code,
                           build_partition, select_good)
from .errors import CapExceeded, ConfigError, InvariantViolation, PolarCoordError
from .polar import PolarParams, encode_transform, sc_likelihood
from .synthesis import (QuantizationBudget, SynthesizedBitChannel, synthesize, synthesize_bec,
                        synthesize_general)
