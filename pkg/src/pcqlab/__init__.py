"""Point cloud codec evaluation toolkit.

Objective quality metrics (point-to-point, point-to-plane and color
PSNR), codec parameter tables with bitrate-matched search, subjective
experiment session tooling, and the statistics that turn raw votes into
mean opinion scores, JOD scales and superiority verdicts.
"""

__version__ = "0.1.0"

from .cloud import CONTENT_CATALOG, ContentDescriptor, PointCloud, stimulus_name
from .ctc import (classify_pg, gpcc_ctc_params, gpcc_strategy_qp, jpeg_config_lookup,
                  next_pqs, pqs_ladder, vpcc_ctc_params, vpcc_strategy_params)
from .lab import grid_sweep, isorate_search
from .metrics import (LOSSLESS, MetricReport, YuvWeights, color_psnr, d1_psnr,
                      d2_psnr, evaluate_triple)
from .neighbors import NeighborIndex, build_index, transfer_colors
from .normals import NormalField, estimate_normals
from .pairwise import PairwiseTally, Vote, build_tally, not_sure_profile
from .plan import ExperimentPlan, generate_plan
from .ply import load_ply, save_ply
from .relations import ConfigRelation, config_relation
from .scores import ScoreMatrix, mos_ci
from .screening import screen_outliers
from .session import SessionStore, TrialRecord
from .thurstone import JodScale, bootstrap_jod, thurstone_jod
from .verdicts import assemble_diagram, jod_superior, welch_superior

__all__ = [
    "CONTENT_CATALOG", "ContentDescriptor", "PointCloud", "stimulus_name",
    "classify_pg", "gpcc_ctc_params", "gpcc_strategy_qp", "jpeg_config_lookup",
    "next_pqs", "pqs_ladder", "vpcc_ctc_params", "vpcc_strategy_params",
    "grid_sweep", "isorate_search",
    "LOSSLESS", "MetricReport", "YuvWeights", "color_psnr", "d1_psnr", "d2_psnr",
    "evaluate_triple",
    "NeighborIndex", "build_index", "transfer_colors",
    "NormalField", "estimate_normals",
    "PairwiseTally", "Vote", "build_tally", "not_sure_profile",
    "ExperimentPlan", "generate_plan",
    "load_ply", "save_ply",
    "ConfigRelation", "config_relation",
    "ScoreMatrix", "mos_ci", "screen_outliers",
    "SessionStore", "TrialRecord",
    "JodScale", "bootstrap_jod", "thurstone_jod",
    "assemble_diagram", "jod_superior", "welch_superior",
]
