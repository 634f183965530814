from .synth import BallEpisode, gen_video_data
from .metrics import frame_metrics, mse, psnr, ssim
from .model import F2FConfig, F2FModel
from .trainer import F2FTrainConfig, f2f_eval, f2f_predict, f2f_train

__all__ = [
    "BallEpisode",
    "gen_video_data",
    "frame_metrics",
    "mse",
    "psnr",
    "ssim",
    "F2FConfig",
    "F2FModel",
    "F2FTrainConfig",
    "f2f_train",
    "f2f_predict",
    "f2f_eval",
]
