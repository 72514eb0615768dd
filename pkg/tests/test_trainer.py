"""Training-loop guarantees: warmup, determinism, resume, diagnostics."""

import json
import pickle

import pytest
import torch

from softvid.checkpoint import FORMAT_VERSION, load_checkpoint
from softvid.config import train_config
from softvid.errors import CheckpointError, TrainingDiverged, ValidationError
from softvid.trainer import (
    CHECKPOINT_NAME,
    LOSS_LOG_NAME,
    adv_enabled,
    epoch_permutation,
    init_state,
    load_model,
    load_state,
    save_state,
    train,
    train_step,
)
from softvid.windows import collate


def mini_train_cfg(**kw):
    base = dict(miniature=True, batch_size=4, epochs=1, warmup_epochs=1, seed=3)
    base.update(kw)
    return train_config(None, **base)


def batch_from(dataset, size=4):
    return collate([dataset[i] for i in range(size)])


def read_log(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def test_epoch_permutation_is_a_pure_function():
    a = epoch_permutation(5, 2, 10)
    b = epoch_permutation(5, 2, 10)
    assert (a == b).all()
    assert sorted(a.tolist()) == list(range(10))
    assert not (a == epoch_permutation(5, 3, 10)).all()


def test_adversarial_term_switches_on_after_warmup():
    cfg = mini_train_cfg(epochs=4, warmup_epochs=2)
    assert not adv_enabled(cfg, 0)
    assert not adv_enabled(cfg, 1)
    assert adv_enabled(cfg, 2)
    assert adv_enabled(cfg, 3)


def test_warmup_leaves_discriminator_bit_unchanged(train_dataset, tmp_path):
    cfg = mini_train_cfg(epochs=1, warmup_epochs=1)
    state = train(cfg, train_dataset, tmp_path)
    reference = init_state(cfg)
    for got, want in zip(state.disc.parameters(), reference.disc.parameters()):
        assert torch.equal(got, want)
    for record in read_log(tmp_path / LOSS_LOG_NAME):
        assert record["adv"] == 0.0
        assert record["d_loss"] is None


def test_training_is_bit_reproducible(train_dataset, tmp_path):
    was = torch.are_deterministic_algorithms_enabled()
    try:
        cfg = mini_train_cfg(deterministic=True)
        train(cfg, train_dataset, tmp_path / "a")
        train(cfg, train_dataset, tmp_path / "b")
    finally:
        torch.use_deterministic_algorithms(was)
    a = (tmp_path / "a" / CHECKPOINT_NAME).read_bytes()
    b = (tmp_path / "b" / CHECKPOINT_NAME).read_bytes()
    assert a == b
    assert (tmp_path / "a" / LOSS_LOG_NAME).read_text() == (
        tmp_path / "b" / LOSS_LOG_NAME
    ).read_text()


def test_resume_matches_uninterrupted_run(train_dataset, tmp_path):
    # two epochs straight through, with the adversarial phase engaging
    # in the second, must equal one epoch plus a resumed second
    full = mini_train_cfg(epochs=2, warmup_epochs=1)
    train(full, train_dataset, tmp_path / "one")

    half = mini_train_cfg(epochs=1, warmup_epochs=1)
    train(half, train_dataset, tmp_path / "two")
    train(full, train_dataset, tmp_path / "two", resume=tmp_path / "two" / CHECKPOINT_NAME)

    one = (tmp_path / "one" / CHECKPOINT_NAME).read_bytes()
    two = (tmp_path / "two" / CHECKPOINT_NAME).read_bytes()
    assert one == two
    assert (tmp_path / "one" / LOSS_LOG_NAME).read_text() == (
        tmp_path / "two" / LOSS_LOG_NAME
    ).read_text()


def test_resume_rejects_changed_settings(train_dataset, tmp_path):
    cfg = mini_train_cfg(epochs=1)
    train(cfg, train_dataset, tmp_path)
    changed = mini_train_cfg(epochs=2, lr=5e-4)
    with pytest.raises(ValidationError, match="epoch count"):
        train(changed, train_dataset, tmp_path, resume=tmp_path / CHECKPOINT_NAME)


def test_checkpoint_roundtrip_is_byte_identical(train_dataset, tmp_path):
    state = init_state(mini_train_cfg())
    train_step(state, batch_from(train_dataset))
    save_state(state, tmp_path / "a.pkl")
    reloaded = load_state(tmp_path / "a.pkl")
    save_state(reloaded, tmp_path / "b.pkl")
    assert (tmp_path / "a.pkl").read_bytes() == (tmp_path / "b.pkl").read_bytes()


def test_checkpoint_stores_named_parameters(train_dataset, tmp_path):
    state = init_state(mini_train_cfg())
    save_state(state, tmp_path / "c.pkl")
    payload = load_checkpoint(tmp_path / "c.pkl")
    assert "video.stem.weight" in payload["model"]
    assert "reconstruct.to_rgb.bias" in payload["model"]
    assert payload["train_config"]["seed"] == 3


def test_version_mismatch_names_both_versions(tmp_path):
    path = tmp_path / "old.pkl"
    with open(path, "wb") as fh:
        pickle.dump({"version": 99, "payload": {}}, fh)
    with pytest.raises(CheckpointError, match=r"version 99, expected 1"):
        load_checkpoint(path)
    assert FORMAT_VERSION == 1


def test_missing_and_corrupt_checkpoints(tmp_path):
    with pytest.raises(CheckpointError, match="not found"):
        load_checkpoint(tmp_path / "nope.pkl")
    bad = tmp_path / "bad.pkl"
    bad.write_bytes(b"not a pickle at all")
    with pytest.raises(CheckpointError, match="corrupt"):
        load_checkpoint(bad)
    wrong = tmp_path / "wrong.pkl"
    with open(wrong, "wb") as fh:
        pickle.dump(["some", "list"], fh)
    with pytest.raises(CheckpointError, match="not a checkpoint"):
        load_checkpoint(wrong)


def test_divergence_names_the_offending_samples(train_dataset):
    state = init_state(mini_train_cfg())
    with torch.no_grad():
        state.model.reconstruct.to_rgb.bias.fill_(float("nan"))
    with pytest.raises(TrainingDiverged, match=r"clip_000:0"):
        train_step(state, batch_from(train_dataset, size=2))


def test_every_parameter_receives_gradient(train_dataset):
    cfg = mini_train_cfg(epochs=1, warmup_epochs=0)
    state = init_state(cfg)
    train_step(state, batch_from(train_dataset))
    for name, p in state.model.named_parameters():
        assert p.grad is not None, name
        assert p.grad.abs().sum() > 0, name
    for name, p in state.disc.named_parameters():
        assert p.grad is not None, name
        assert p.grad.abs().sum() > 0, name


def test_dataset_shape_mismatch_is_caught(train_dataset, tmp_path):
    cfg = train_config(None, miniature=False, n=1, epochs=1, warmup_epochs=1)
    with pytest.raises(ValidationError, match="miniature"):
        train(cfg, train_dataset, tmp_path)


def test_loss_log_has_one_record_per_step(train_dataset, tmp_path):
    cfg = mini_train_cfg(epochs=2, warmup_epochs=2, batch_size=4)
    state = train(cfg, train_dataset, tmp_path)
    records = read_log(tmp_path / LOSS_LOG_NAME)
    assert len(records) == state.step
    assert {"epoch", "step", "l1", "adv", "au", "total", "d_loss"} <= set(records[0])


def test_load_model_recovers_trained_weights(train_dataset, tmp_path):
    cfg = mini_train_cfg(epochs=1)
    state = train(cfg, train_dataset, tmp_path)
    model = load_model(tmp_path / CHECKPOINT_NAME)
    assert not model.training
    batch = batch_from(train_dataset, size=2)
    state.model.eval()
    with torch.no_grad():
        want, _ = state.model(batch["lq"], batch["mfcc"], batch["emotion"])
        got, _ = model(batch["lq"], batch["mfcc"], batch["emotion"])
    assert torch.equal(got, want)


def test_miniature_checkpoint_stays_small(train_dataset, tmp_path):
    cfg = mini_train_cfg(epochs=1)
    train(cfg, train_dataset, tmp_path)
    size = (tmp_path / CHECKPOINT_NAME).stat().st_size
    assert size < 50 * 1024 * 1024
