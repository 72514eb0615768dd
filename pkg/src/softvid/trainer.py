"""The optimization loop: alternating discriminator/generator updates.

Runs are deterministic by construction: the model is built under a fixed
seed, each epoch's sample order is a pure function of (seed, epoch), and
checkpoints carry the RNG state, so a resumed run retraces exactly the
steps an uninterrupted one would have taken.  The adversarial term is
held at zero for the warmup epochs and the discriminator is not touched
during them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import torch

from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig, config_dict, model_config_from_dict
from .discriminator import Discriminator
from .errors import TrainingDiverged, ValidationError
from .losses import LossBreakdown, discriminator_loss, total_loss
from .model import Restorer
from .windows import WindowDataset, collate

CHECKPOINT_NAME = "checkpoint.pkl"
LOSS_LOG_NAME = "loss_log.jsonl"


@dataclass
class TrainState:
    cfg: TrainConfig
    model: Restorer
    disc: Discriminator
    opt_g: torch.optim.Adam
    opt_d: torch.optim.Adam
    epoch: int = 0
    step: int = 0


def init_state(cfg: TrainConfig) -> TrainState:
    cfg.validate()
    if cfg.deterministic:
        torch.use_deterministic_algorithms(True)
    torch.manual_seed(cfg.seed)
    mcfg = cfg.model()
    model = Restorer(mcfg)
    disc = Discriminator(mcfg)
    opt_g = torch.optim.Adam(model.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
    return TrainState(cfg, model, disc, opt_g, opt_d)


def state_payload(state: TrainState) -> dict:
    return {
        "train_config": config_dict(state.cfg),
        "model_config": config_dict(state.cfg.model()),
        "epoch": state.epoch,
        "step": state.step,
        "model": state.model.state_dict(),
        "discriminator": state.disc.state_dict(),
        "opt_g": state.opt_g.state_dict(),
        "opt_d": state.opt_d.state_dict(),
        "torch_rng": torch.get_rng_state(),
    }


def save_state(state: TrainState, path: str | Path) -> None:
    save_checkpoint(path, state_payload(state))


def load_state(path: str | Path) -> TrainState:
    payload = load_checkpoint(path)
    cfg = TrainConfig(**payload["train_config"]).validate()
    state = init_state(cfg)
    state.model.load_state_dict(payload["model"])
    state.disc.load_state_dict(payload["discriminator"])
    state.opt_g.load_state_dict(payload["opt_g"])
    state.opt_d.load_state_dict(payload["opt_d"])
    state.epoch = payload["epoch"]
    state.step = payload["step"]
    torch.set_rng_state(payload["torch_rng"])
    return state


def load_model(path: str | Path) -> Restorer:
    """Load just the restoration network from a training checkpoint, in eval mode."""
    payload = load_checkpoint(path)
    mcfg = model_config_from_dict(payload["model_config"])
    model = Restorer(mcfg)
    model.load_state_dict(payload["model"])
    model.eval()
    return model


def epoch_permutation(seed: int, epoch: int, n: int) -> np.ndarray:
    """Sample order for one epoch, a pure function of its arguments."""
    return np.random.default_rng([seed, epoch]).permutation(n)


def adv_enabled(cfg: TrainConfig, epoch: int) -> bool:
    return epoch >= cfg.warmup_epochs


def train_step(state: TrainState, batch: dict) -> tuple[LossBreakdown, float | None]:
    """One alternating update; discriminator first, then generator.

    Raises TrainingDiverged naming the offending samples if any loss
    goes non-finite.
    """
    cfg = state.cfg
    adv = adv_enabled(cfg, state.epoch)
    lq, mfcc, emotion = batch["lq"], batch["mfcc"], batch["emotion"]
    hq, au_target = batch["hq"], batch["au"]

    d_loss_value = None
    if adv:
        with torch.no_grad():
            fake, _ = state.model(lq, mfcc, emotion)
        d_loss = discriminator_loss(
            state.disc(hq, emotion), state.disc(fake, emotion)
        )
        if not torch.isfinite(d_loss):
            raise TrainingDiverged(
                f"non-finite discriminator loss at epoch {state.epoch} step "
                f"{state.step} on batch {batch['ids']}"
            )
        state.opt_d.zero_grad()
        d_loss.backward()
        state.opt_d.step()
        d_loss_value = float(d_loss.detach())

    restored, au_pred = state.model(lq, mfcc, emotion)
    p_fake = state.disc(restored, emotion) if adv else None
    breakdown = total_loss(
        restored, hq, p_fake, au_pred, au_target,
        cfg.lambda_adv, cfg.lambda_au, adv_enabled=adv,
    )
    if not torch.isfinite(breakdown.total):
        raise TrainingDiverged(
            f"non-finite loss at epoch {state.epoch} step {state.step} "
            f"on batch {batch['ids']}: {breakdown.detached()}"
        )
    state.opt_g.zero_grad()
    breakdown.total.backward()
    state.opt_g.step()
    state.step += 1
    return breakdown, d_loss_value


def check_dataset_shapes(dataset: WindowDataset, cfg: TrainConfig) -> None:
    mcfg = cfg.model()
    s = dataset[0]
    want_lq = (mcfg.window_len, 3, mcfg.lq_height, mcfg.lq_width)
    want_hq = (3, mcfg.hq_height, mcfg.hq_width)
    if s.lq.shape != want_lq or s.hq.shape != want_hq:
        raise ValidationError(
            f"dataset windows are {s.lq.shape}/{s.hq.shape} but the model "
            f"expects {want_lq}/{want_hq}; check the miniature flag, n, and "
            "the fixture resolution"
        )


def train(
    cfg: TrainConfig,
    dataset: WindowDataset,
    out_dir: str | Path,
    resume: str | Path | None = None,
) -> TrainState:
    """Run (or continue) training, writing checkpoints and a loss log.

    The loss log is one JSON record per step; checkpoints are written at
    every epoch boundary to ``checkpoint.pkl`` in out_dir.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if resume is not None:
        state = load_state(resume)
        ours, theirs = config_dict(cfg.validate()), config_dict(state.cfg)
        ours.pop("epochs"), theirs.pop("epochs")
        if ours != theirs:
            raise ValidationError(
                "resume config differs from checkpoint config; only the "
                "epoch count may change between runs"
            )
        state.cfg = replace(state.cfg, epochs=cfg.epochs)
    else:
        state = init_state(cfg)
    check_dataset_shapes(dataset, state.cfg)

    batch = state.cfg.batch_size
    per_epoch = math.ceil(len(dataset) / batch)
    with open(out_dir / LOSS_LOG_NAME, "a") as log:
        while state.epoch < state.cfg.epochs:
            order = epoch_permutation(state.cfg.seed, state.epoch, len(dataset))
            for b in range(state.step - state.epoch * per_epoch, per_epoch):
                idx = order[b * batch : (b + 1) * batch]
                samples = [dataset[int(i)] for i in idx]
                breakdown, d_loss = train_step(state, collate(samples))
                record = {
                    "epoch": state.epoch,
                    "step": state.step,
                    **breakdown.detached(),
                    "d_loss": d_loss,
                }
                log.write(json.dumps(record) + "\n")
            state.epoch += 1
            save_state(state, out_dir / CHECKPOINT_NAME)
    return state
