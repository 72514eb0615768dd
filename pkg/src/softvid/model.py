"""The full restoration network."""

from __future__ import annotations

import torch
import torch.nn as nn

from .audio_branch import AudioBranch
from .config import ModelConfig
from .emotion_branch import AuPredictor, ChannelGate
from .errors import ValidationError
from .features import assert_gate_open
from .fusion import AudioVideoFusion, SpatialAttention, TriModalFusion
from .reconstruction import Reconstructor
from .video_branch import VideoBranch


class Restorer(nn.Module):
    """Video + audio + emotion in, restored center frame out.

    Wiring: the video branch digests the frame window and the audio
    branch the matching MFCC rows; the emotion branch predicts action
    units from pooled video features and turns them into a channel gate;
    spatial attention gates the audio maps before the audio-video merge;
    the channel gate and tiled one-hot condition the second merge; the
    reconstruction head upscales on top of a bicubic skip.
    """

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        cfg.validate()
        self.cfg = cfg
        self.video = VideoBranch(cfg)
        self.audio = AudioBranch(cfg)
        self.au_predictor = AuPredictor(cfg)
        self.channel_gate = ChannelGate(cfg)
        self.spatial_attention = SpatialAttention(cfg)
        self.av_fusion = AudioVideoFusion(cfg)
        self.tri_fusion = TriModalFusion(cfg)
        self.reconstruct = Reconstructor(cfg)

    def forward(
        self,
        lq: torch.Tensor,
        mfcc: torch.Tensor,
        emotion: torch.Tensor,
        debug: bool = False,
    ):
        """Restore the window's center frame.

        Args:
            lq: (B, 2N+1, 3, h, w) low-quality frames in [0, 1].
            mfcc: (B, 2N+1, 13) audio coefficients.
            emotion: (B, 15) one-hot states.
            debug: also return intermediate maps after checking the
                attention-range and finiteness invariants.

        Returns:
            (restored, au_pred), plus a dict of intermediates when debug.
        """
        fv = self.video(lq)
        fa = self.audio(mfcc)
        au_pred = self.au_predictor(fv, emotion)
        gate = self.channel_gate(au_pred)
        attn = self.spatial_attention(fv, fa)
        fva = self.av_fusion(fv, fa, attn)
        fvae = self.tri_fusion(fva, gate, emotion)
        center = lq[:, lq.shape[1] // 2]
        restored = self.reconstruct(fvae, center)
        if not debug:
            return restored, au_pred
        intermediates = {
            "video_maps": fv.data,
            "audio_maps": fa.data,
            "spatial_attention": attn.data,
            "channel_gate": gate.data,
            "audio_video_maps": fva.data,
            "trimodal_maps": fvae.data,
            "au_pred": au_pred,
            "restored": restored,
        }
        assert_gate_open(attn.data, "spatial attention")
        assert_gate_open(gate.data, "channel gate")
        for name, t in intermediates.items():
            if not torch.isfinite(t).all():
                raise ValidationError(f"{name} contains non-finite values")
        return restored, au_pred, intermediates
