"""
Three-step training scheme.

Step 1 learns an initial latent space from paired photos and sketches with
the joint loss minus AdaCos. Step 2 pre-trains the mapping network with
AdaCos alone on a photo-only set. Step 3 trains everything on the target
pairs with the full joint loss.

Per batch the discriminators update first on detached synthesized images,
then the mapping network, generators and AdaCos update with the
discriminators frozen.
"""

import copy
from collections import defaultdict
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional

import torch
import torch.nn as nn

from ..config.settings import AppConfig, ConfigLoader
from ..data.datasets import PairedImageDataset, RecordImageDataset, make_loader
from ..data.manifest import Manifest
from ..losses import (
    LossComponents,
    joint_loss,
    loss_adacos,
    loss_collaborative,
    loss_gan_discriminator,
    loss_gan_generator,
    loss_similarity,
)
from ..networks.model import BidirectionalSynthesisNetwork, init_params
from ..utils.exception_handler import ConfigError, DataError
from ..utils.logging_utils import ProgressTracker, WorkflowLogger
from .checkpoint import Checkpoint
from .loss_log import LossLog

# model fields that select behavior but not parameter shapes
VARIANT_FIELDS = {"synthesis", "adacos_mode", "adacos_modalities", "generator_activation", "leaky_slope",
                  "init_std", "adain_eps"}

STEP_DESCRIPTIONS = {
    1: "Synthesis pre-training (joint loss without AdaCos)",
    2: "Photo identity pre-training (AdaCos only)",
    3: "Full joint training on target pairs",
}


def step_generator(seed: int, step: int) -> torch.Generator:
    """Generator for re-initializations made when a step starts."""
    return torch.Generator().manual_seed(seed * 1009 + step)


def data_seed(seed: int, step: int) -> int:
    return seed * 10 + step


@contextmanager
def frozen(modules: Iterable[nn.Module]) -> Iterator[None]:
    """Temporarily disable gradients for ``modules``."""
    params = [p for m in modules for p in m.parameters()]
    flags = [p.requires_grad for p in params]
    for p in params:
        p.requires_grad_(False)
    try:
        yield
    finally:
        for p, flag in zip(params, flags):
            p.requires_grad_(flag)


class StepTrainer:
    """Runs the epochs of one training step on one model."""

    def __init__(self, model: BidirectionalSynthesisNetwork, step: int, dataset,
                 output_dir: Optional[Path] = None):
        self.model = model
        self.step = step
        self.config: AppConfig = model.config
        self.step_config = self.config.train.for_step(step)
        self.dataset = dataset
        self.output_dir = Path(output_dir) if output_dir else None
        self.epoch = 0
        self.iteration = 0
        self.last_accuracy: Optional[float] = None

        lr, betas = self.step_config.learning_rate, tuple(self.step_config.betas)
        if step == 2:
            g_params = list(model.mapping.parameters()) + list(model.adacos.parameters())
        else:
            g_params = list(model.generator_parameters(include_adacos=step == 3))
        self.opt_g = torch.optim.Adam(g_params, lr=lr, betas=betas)

        d_params = list(model.discriminator_parameters()) if step != 2 else []
        self.opt_d = torch.optim.Adam(d_params, lr=lr, betas=betas) if d_params else None

    def restore(self, checkpoint: Checkpoint) -> None:
        """Continue from a mid-step checkpoint."""
        self.epoch = checkpoint.epoch
        self.iteration = checkpoint.iteration
        if checkpoint.optimizer_g is not None:
            self.opt_g.load_state_dict(checkpoint.optimizer_g)
        if self.opt_d is not None and checkpoint.optimizer_d is not None:
            self.opt_d.load_state_dict(checkpoint.optimizer_d)

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            model=self.model,
            step=self.step,
            epoch=self.epoch,
            iteration=self.iteration,
            optimizer_g=self.opt_g.state_dict(),
            optimizer_d=self.opt_d.state_dict() if self.opt_d is not None else None,
            rng_state=torch.get_rng_state(),
        )

    # batch updates

    def _adacos_term(self, w_photo: torch.Tensor, w_sketch: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        head = self.model.adacos
        if self.config.model.adacos_modalities == "sketch":
            loss, _ = loss_adacos(w_sketch, labels, head)
            return loss
        # equal halves, so this is the mean of the photo and sketch losses with one scale update
        loss, _ = loss_adacos(torch.cat([w_photo, w_sketch]), torch.cat([labels, labels]), head)
        return loss

    def train_paired_batch(self, photos: torch.Tensor, sketches: torch.Tensor,
                           labels: torch.Tensor) -> Dict[str, float]:
        model = self.model
        w_photo = model.encode(photos)
        w_sketch = model.encode(sketches)

        # (generator, discriminator, code, conditioning image, real target)
        directions = []
        if model.synthesizes_sketches:
            directions.append((model.gen_sketch, model.disc_sketch, w_photo, photos, sketches))
        if model.synthesizes_photos:
            directions.append((model.gen_photo, model.disc_photo, w_sketch, sketches, photos))
        fakes = [generator(w) for generator, _, w, _, _ in directions]

        d_value = 0.0
        if self.opt_d is not None and directions:
            d_loss = sum(
                loss_gan_discriminator(disc(cond, real), disc(cond, fake.detach()))
                for (_, disc, _, cond, real), fake in zip(directions, fakes)
            )
            self.opt_d.zero_grad(set_to_none=True)
            d_loss.backward()
            self.opt_d.step()
            d_value = d_loss.item()

        with frozen(model.discriminators()):
            components = LossComponents()
            if directions:
                components.gan = sum(
                    loss_gan_generator(disc(cond, fake))
                    for (_, disc, _, cond, _), fake in zip(directions, fakes)
                )
                components.similarity = sum(
                    loss_similarity(fake, real, self.step_config.similarity)
                    for (_, _, _, _, real), fake in zip(directions, fakes)
                )
                components.collaborative = loss_collaborative(w_photo, w_sketch)
            if self.step == 3:
                components.adacos = self._adacos_term(w_photo, w_sketch, labels)
            joint = joint_loss(components, self.step_config.weights)
            self.opt_g.zero_grad(set_to_none=True)
            joint.total.backward()
            self.opt_g.step()
        # step 1 leaves the head untouched
        if self.step == 3:
            model.adacos.renormalize_()

        record = components.as_floats()
        record["total"] = joint.total.item()
        record["discriminator"] = d_value
        return record

    def train_photo_batch(self, photos: torch.Tensor, labels: torch.Tensor) -> Dict[str, float]:
        head = self.model.adacos
        w_photo = self.model.encode(photos)
        correct = int((head.predict(w_photo.detach()) == labels).sum())
        adacos, _ = loss_adacos(w_photo, labels, head)
        joint = joint_loss(LossComponents(adacos=adacos), self.step_config.weights)
        self.opt_g.zero_grad(set_to_none=True)
        joint.total.backward()
        self.opt_g.step()
        head.renormalize_()

        record = joint.components.as_floats()
        record["total"] = joint.total.item()
        record["correct"] = correct
        record["count"] = int(labels.shape[0])
        return record

    def train_batch(self, batch) -> Dict[str, float]:
        if self.step == 2:
            photos, labels = batch
            return self.train_photo_batch(photos, labels)
        photos, sketches, labels = batch
        return self.train_paired_batch(photos, sketches, labels)

    # epochs

    def run(self) -> Checkpoint:
        epochs = self.step_config.epochs
        log = None
        if self.output_dir is not None:
            log = LossLog(self.output_dir / f"losses_step{self.step}.csv", append=self.iteration > 0)
        report_every = max(1, epochs // 10)
        seed = data_seed(self.config.seed, self.step)
        self.model.train()

        with ProgressTracker.create_epoch_bar() as progress:
            task = progress.add_task(f"Step {self.step}", total=epochs, completed=self.epoch)
            for epoch in range(self.epoch, epochs):
                totals: Dict[str, float] = defaultdict(float)
                batches = 0
                for batch in make_loader(self.dataset, self.step_config.batch_size, seed, epoch):
                    record = self.train_batch(batch)
                    self.iteration += 1
                    batches += 1
                    for key, value in record.items():
                        totals[key] += value
                    if log is not None:
                        log.append(self.iteration, record["total"], record, float(self.model.adacos.scale))
                self.epoch = epoch + 1

                if self.epoch % report_every == 0 or self.epoch == epochs:
                    WorkflowLogger.print_epoch(self.step, epoch, epochs, self._epoch_summary(totals, batches))
                every = self.step_config.checkpoint_every
                if self.output_dir is not None and every and self.epoch % every == 0 and self.epoch < epochs:
                    path = self.checkpoint().save(self.output_dir / f"step{self.step}_epoch{self.epoch}.pt")
                    WorkflowLogger.print_checkpoint_saved(str(path), self.step, self.epoch)
                progress.advance(task)

        checkpoint = self.checkpoint()
        if self.output_dir is not None:
            checkpoint.save(self.output_dir / f"step{self.step}.pt")
            WorkflowLogger.print_checkpoint_saved(str(checkpoint.path), self.step, self.epoch)
        return checkpoint

    def _epoch_summary(self, totals: Dict[str, float], batches: int) -> Dict[str, float]:
        batches = max(batches, 1)
        summary = {"L": totals["total"] / batches}
        if self.step == 2:
            summary["L_adacos"] = totals["adacos"] / batches
            summary["accuracy"] = totals["correct"] / max(totals["count"], 1)
            self.last_accuracy = summary["accuracy"]
        else:
            if self.step == 3:
                summary["L_adacos"] = totals["adacos"] / batches
            summary["L_gan"] = totals["gan"] / batches
            summary["L_s"] = totals["similarity"] / batches
            summary["L_w"] = totals["collaborative"] / batches
            summary["D"] = totals["discriminator"] / batches
        summary["s"] = float(self.model.adacos.scale)
        return summary


# step entry points

def _adopt_config(model: BidirectionalSynthesisNetwork, config: AppConfig) -> None:
    """Run a carried-over model under the current config; the architecture must match."""
    carried = model.config
    if carried.model.model_dump(exclude=VARIANT_FIELDS) != config.model.model_dump(exclude=VARIANT_FIELDS) or (
        carried.data.image_size, carried.data.photo_channels, carried.data.sketch_channels
    ) != (config.data.image_size, config.data.photo_channels, config.data.sketch_channels):
        raise ConfigError("Checkpoint was built with a different model or image geometry than the current config")
    model.config = config


def _start_model(config: AppConfig, step: int, n_classes: int,
                 checkpoint_in: Optional[Checkpoint], resume: Optional[Checkpoint]) -> BidirectionalSynthesisNetwork:
    if resume is not None:
        if resume.step != step:
            raise ConfigError(f"Cannot resume step {step} from a step-{resume.step} checkpoint")
        model = copy.deepcopy(resume.model)
        _adopt_config(model, config)
        return model

    if checkpoint_in is not None:
        model = copy.deepcopy(checkpoint_in.model)
        _adopt_config(model, config)
    else:
        model = init_params(config, config.seed, n_classes=max(2, n_classes))

    generator = step_generator(config.seed, step)
    if step in (2, 3):
        model.reset_adacos(n_classes, generator)
    if step == 3 and checkpoint_in is not None and config.train.reinit_discriminators:
        model.reset_discriminators(generator)
    return model


def _run_step(config: AppConfig, step: int, model: BidirectionalSynthesisNetwork, dataset,
              resume: Optional[Checkpoint], output_dir: Optional[Path]) -> Checkpoint:
    WorkflowLogger.print_step(step, STEP_DESCRIPTIONS[step])
    if output_dir is not None:
        ConfigLoader.save(config, Path(output_dir) / "config.yaml")
    trainer = StepTrainer(model, step, dataset, output_dir)
    if resume is not None:
        trainer.restore(resume)
        WorkflowLogger.print_info(f"Resuming step {step} at epoch {resume.epoch}")
    checkpoint = trainer.run()
    if trainer.last_accuracy is not None:
        WorkflowLogger.print_info(f"Training identity accuracy: {100 * trainer.last_accuracy:.2f}%")
    return checkpoint


def _require_pairs(manifest: Manifest, step: int) -> None:
    if not manifest.records:
        raise DataError(f"Step {step} manifest {manifest.path} is empty")
    if not manifest.is_paired:
        raise DataError(f"Step {step} needs paired photos and sketches; {manifest.path} has no sketches")


def train_step1(config: AppConfig, paired_manifest: Manifest, resume: Optional[Checkpoint] = None,
                output_dir: Optional[Path] = None) -> Checkpoint:
    """Learn the initial latent space; AdaCos is not trained."""
    if config.model.synthesis == "none":
        raise ConfigError("Step 1 trains the synthesis networks and cannot run with model.synthesis=none")
    _require_pairs(paired_manifest, 1)
    model = _start_model(config, 1, len(paired_manifest.identities), None, resume)
    dataset = PairedImageDataset(paired_manifest, config.data, train=True, seed=data_seed(config.seed, 1))
    return _run_step(config, 1, model, dataset, resume, output_dir)


def train_step2(config: AppConfig, photo_manifest: Manifest, checkpoint_in: Optional[Checkpoint] = None,
                resume: Optional[Checkpoint] = None, output_dir: Optional[Path] = None) -> Checkpoint:
    """Pre-train the mapping network with AdaCos on photos; everything else is frozen."""
    photos = photo_manifest.photos()
    if not photos:
        raise DataError(f"Step 2 manifest {photo_manifest.path} has no photos")
    identities = sorted({r.identity for r in photos})
    if len(identities) < 2:
        raise ConfigError(f"Step 2 needs at least 2 photo identities, found {len(identities)}")
    model = _start_model(config, 2, len(identities), checkpoint_in, resume)
    class_index = {identity: i for i, identity in enumerate(identities)}
    dataset = RecordImageDataset(photos, config.data, train=True, seed=data_seed(config.seed, 2),
                                 class_index=class_index)
    return _run_step(config, 2, model, dataset, resume, output_dir)


def train_step3(config: AppConfig, target_manifest: Manifest, checkpoint_in: Optional[Checkpoint] = None,
                resume: Optional[Checkpoint] = None, output_dir: Optional[Path] = None) -> Checkpoint:
    """Train all components with the full joint loss on the target pairs.

    Without ``checkpoint_in`` the model starts from fresh parameters
    (the step-3-only ablation).
    """
    _require_pairs(target_manifest, 3)
    n_classes = len(target_manifest.identities)
    if n_classes < 2:
        raise ConfigError(f"Step 3 needs at least 2 target identities, found {n_classes}")
    model = _start_model(config, 3, n_classes, checkpoint_in, resume)
    dataset = PairedImageDataset(target_manifest, config.data, train=True, seed=data_seed(config.seed, 3))
    return _run_step(config, 3, model, dataset, resume, output_dir)
