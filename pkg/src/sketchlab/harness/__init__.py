from .emit import emit_results, read_csv, to_csv, to_json, to_svg
from .experiments import (
    CSV_COLUMNS,
    ExperimentResult,
    ExperimentSpec,
    SpecError,
    TrialRecord,
    aggregate,
    gen_lowrank_matrix,
    gen_lowtubal_tensor,
    run_data_tensor_comparison,
    run_matrix_experiment,
    run_tensor_experiment,
    scale_to_frobenius,
)
from .tns import TnsParseError, decode_tensor, encode_tensor, load_tensor_file, save_tensor_file
