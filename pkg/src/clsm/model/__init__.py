from .checkpoint import load_checkpoint, restore_into, save_checkpoint
from .clsm import CLSM, target_mask
from .config import ModelConfig
from .flow import AffineCoupling, FlowStack
from .gaussian import GaussianParams, kl_to_standard_normal, standard_normal
from .masks import AttentionMask, batch_decoder_masks, build_decoder_mask

__all__ = [
    "AffineCoupling",
    "AttentionMask",
    "CLSM",
    "FlowStack",
    "GaussianParams",
    "ModelConfig",
    "batch_decoder_masks",
    "build_decoder_mask",
    "kl_to_standard_normal",
    "load_checkpoint",
    "restore_into",
    "save_checkpoint",
    "standard_normal",
    "target_mask",
]
