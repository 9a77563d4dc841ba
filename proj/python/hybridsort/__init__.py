"""Multi-object tracking core with weak-cue association (C++ extension)."""

from ._hybridsort import (
    AssignmentResult,
    Box,
    Detection,
    EvalReport,
    InputError,
    KalmanState,
    Match,
    NoiseConfig,
    NumericalError,
    ResultRow,
    Scenario,
    ScenarioSpec,
    TrackedObject,
    Tracker,
    TrackerConfig,
    angle_difference,
    confidence_cost,
    cosine_appearance_cost,
    evaluate_scenario,
    format_result_row,
    generate,
    hiou,
    hmiou,
    iou,
    kalman_box,
    kalman_init,
    kalman_predict,
    kalman_update,
    linear_confidence_prediction,
    read_results,
    rocm_cost,
    solve,
    track_scenario,
    wmiou,
    write_results,
)

__version__ = "0.1.0"
