from .config import BETA_GRID, TrainConfig, load_config_file
from .gradcheck import gradient_check
from .lm import EvalLM, LMConfig, load_eval_lm, train_eval_lm
from .loop import FitResult, encode_windows, evaluate, fit
from .loss import LossBreakdown, beta_schedule, compute_loss

__all__ = [
    "BETA_GRID",
    "EvalLM",
    "FitResult",
    "LMConfig",
    "LossBreakdown",
    "TrainConfig",
    "beta_schedule",
    "compute_loss",
    "encode_windows",
    "evaluate",
    "fit",
    "gradient_check",
    "load_config_file",
    "load_eval_lm",
    "train_eval_lm",
]
