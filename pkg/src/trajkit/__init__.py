"""Virtual-world camera trajectory synthesis, capture and evaluation toolkit.

Pipeline stages, each a standalone module:

* :mod:`trajkit.trajectory` — sparse waypoint plans, dense 6DOF pose streams;
* :mod:`trajkit.poseio` — plain-text pose file formats;
* :mod:`trajkit.conditions` — environment settings and their degradation;
* :mod:`trajkit.simworld` — synthetic capture backend and fake reconstruction;
* :mod:`trajkit.align` — robust similarity alignment and metric error reports;
* :mod:`trajkit.cli` — the ``trajkit`` command line.
"""

from .align import (
    DEFAULT_METERS_PER_UNIT,
    AlignmentReport,
    RansacParams,
    SimilarityTransform,
    apply,
    calibrate_unit_scale,
    evaluate,
    ransac_align,
    umeyama,
)
from .conditions import (
    DEFAULT_DEGRADATION,
    ConditionSet,
    DegradationProfile,
    DegradationTable,
    TimeOfDay,
    Weather,
    degradation,
    validate,
)
from .errors import InputError, InvariantViolation, TrajkitError
from .poseio import (
    CaptureManifest,
    CaptureRecord,
    ReconstructedSet,
    read_dense,
    read_manifest,
    read_reconstruction,
    read_sparse,
    write_dense,
    write_manifest,
    write_reconstruction,
    write_report,
)
from .simworld import (
    Box,
    Intrinsics,
    ObservationSet,
    World,
    default_intrinsics,
    generate_world,
    retrace,
    simulate_reconstruction,
)
from .trajectory import (
    DenseTrajectory,
    DensifyParams,
    EulerRotation,
    PoseSample,
    SparseTrajectory,
    densify,
    expand_visitation,
    path_polyline,
    perturb,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentReport",
    "Box",
    "CaptureManifest",
    "CaptureRecord",
    "ConditionSet",
    "DEFAULT_DEGRADATION",
    "DEFAULT_METERS_PER_UNIT",
    "DegradationProfile",
    "DegradationTable",
    "DenseTrajectory",
    "DensifyParams",
    "EulerRotation",
    "InputError",
    "Intrinsics",
    "InvariantViolation",
    "ObservationSet",
    "PoseSample",
    "RansacParams",
    "ReconstructedSet",
    "SimilarityTransform",
    "SparseTrajectory",
    "TimeOfDay",
    "TrajkitError",
    "Weather",
    "World",
    "apply",
    "calibrate_unit_scale",
    "default_intrinsics",
    "degradation",
    "densify",
    "evaluate",
    "expand_visitation",
    "generate_world",
    "path_polyline",
    "perturb",
    "ransac_align",
    "read_dense",
    "read_manifest",
    "read_reconstruction",
    "read_sparse",
    "retrace",
    "simulate_reconstruction",
    "umeyama",
    "validate",
    "write_dense",
    "write_manifest",
    "write_reconstruction",
    "write_report",
]
