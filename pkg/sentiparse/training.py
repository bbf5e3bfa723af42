"""
Training loop: teacher forcing over oracle transition sequences with
the joint loss ``L = L_tran + L_label``, Adam, gradient-norm clipping,
learning-rate decay on dev plateaus and checkpointing of the model with
the best development LF1.
"""

import copy
import math
import random

import torch
from monotonic import monotonic
from recordclass import recordclass

from . import metrics, utils
from .config import check_config
from .core import label_vocabulary
from .errors import TrainingError
from .model import ParserModel, build_vocabularies
from .transitions import oracle
from .workers import map_sentences


class EpochReport(recordclass('EpochReport',
                              ['epoch', 'loss_tran', 'loss_label', 'dev_uf1',
                               'dev_lf1', 'lr', 'seconds'])):
    """
    Summary of one training epoch.

    :param epoch:  1-based epoch number
    :param loss_tran:  Summed transition (pointer) loss
    :param loss_label:  Summed label loss
    :param dev_uf1:  Development UF1, :const:`None` when not evaluated
    :param dev_lf1:  Development LF1, :const:`None` when not evaluated
    :param lr:  Learning rate in use during the epoch
    :param seconds:  Wall time of the epoch
    """


def seed_everything(seed):
    """Seed torch and return a :class:`random.Random` for shuffling."""
    torch.manual_seed(seed)
    return random.Random(seed)


def predict(model, sentences, beam=1, external=None, jobs=1, handlers=()):
    """
    Parse a list of sentences.

    :param external: Optional dict ``sent_id -> vectors``.
    :return: List of :class:`DependencyGraph`, in input order.
    """
    external = external or {}

    def parse_one(sentence):
        return model.parse(sentence, beam, external.get(sentence.sent_id))

    model.eval()
    return map_sentences(parse_one, sentences, jobs, handlers)


def evaluate(model, graphs, beam=1, external=None, jobs=1, handlers=()):
    """UF1 and LF1 of the model on gold dependency graphs."""
    predicted = predict(model, [g.sentence for g in graphs], beam, external,
                        jobs, handlers)
    return (metrics.dependency_f1(graphs, predicted, labeled=False),
            metrics.dependency_f1(graphs, predicted, labeled=True))


class Trainer(object):
    """
    Trains a :class:`ParserModel` on dependency graphs.
    """

    def __init__(self, config, handlers=()):
        """
        :param config:
            The full configuration map

        :param handlers:
            Log handlers to add to the trainer's logger

        :exception ConfigurationError:
            Raised if the train section is invalid
        """
        self.check_config(config)
        self.config = config
        self.cfg = config['train']
        self.handlers = list(handlers)
        self._logger = utils.start_logger('sentiparse.training',
                                          self.handlers)
        self.history = []

    @staticmethod
    def check_config(config):
        for section in ('representation', 'model', 'train', 'decode'):
            check_config(section, config[section])
        return True

    def build_model(self, train_graphs, word_vectors=None,
                    lemma_vectors=None):
        """
        Create a model whose vocabularies and labels come from the
        training graphs. Pretrained tables fix the word or lemma
        dimension.
        """
        config = copy.deepcopy(self.config)
        if word_vectors is not None:
            config['representation']['word_dim'] = word_vectors.dim
        if lemma_vectors is not None:
            config['representation']['lemma_dim'] = lemma_vectors.dim
        vocabularies = build_vocabularies([g.sentence for g in train_graphs])
        labels = label_vocabulary(train_graphs)
        model = ParserModel(config, vocabularies, labels)
        if word_vectors is not None:
            model.load_pretrained('word', word_vectors)
        if lemma_vectors is not None and model.use_lemma:
            model.load_pretrained('lemma', lemma_vectors)
        return model

    def run(self, train_graphs, dev_graphs=None, out=None, external=None,
            word_vectors=None, lemma_vectors=None, jobs=1):
        """
        Train, keeping the parameters with the best dev LF1.

        :param train_graphs: List of gold :class:`DependencyGraph`.
        :param dev_graphs: Optional list of gold development graphs.
        :param out: Optional checkpoint path, written on every improvement.
        :param external: Optional dict ``sent_id -> vectors``.
        :param word_vectors: Optional pretrained :class:`EmbeddingTable`.
        :param lemma_vectors: Optional pretrained :class:`EmbeddingTable`.
        :param jobs: Workers for dev decoding.

        :return: The trained :class:`ParserModel`.

        :exception TrainingError: The loss became non-finite.
        """
        cfg = self.cfg
        external = external or {}
        rng = seed_everything(cfg['seed'])

        examples = [(g.sentence, oracle(g)) for g in train_graphs]
        model = self.build_model(train_graphs, word_vectors, lemma_vectors)
        optimizer = torch.optim.Adam(model.parameters(), lr=cfg['lr'],
                                     betas=(cfg['beta1'], cfg['beta2']))
        lr = cfg['lr']
        beam = self.config['decode']['beam']
        self._logger.info(
            "Training on %d sentences, %d labels, input dimension %d",
            len(examples), len(model.labels), model.input_dim)

        best_lf1 = None
        best_state = None
        stale = 0
        order = list(range(len(examples)))
        for epoch in range(1, cfg['epochs'] + 1):
            start = monotonic()
            model.train()
            rng.shuffle(order)
            total_tran = total_label = 0.0
            for first in range(0, len(order), cfg['batch_size']):
                batch = order[first:first + cfg['batch_size']]
                optimizer.zero_grad()
                loss_tran = loss_label = 0.0
                for index in batch:
                    sentence, sequence = examples[index]
                    tran, label = model.loss(
                        sentence, sequence, external.get(sentence.sent_id))
                    loss_tran = loss_tran + tran
                    loss_label = loss_label + label
                loss = loss_tran + loss_label
                if not torch.is_tensor(loss) or not loss.requires_grad:
                    continue
                if not math.isfinite(float(loss)):
                    raise TrainingError(
                        "Epoch %d: non-finite loss %s (transition %s, label "
                        "%s) on sentences %s"
                        % (epoch, float(loss), float(loss_tran),
                           float(loss_label),
                           ', '.join(examples[i][0].sent_id for i in batch)))
                loss.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), cfg['clip'])
                optimizer.step()
                total_tran += float(loss_tran)
                total_label += float(loss_label)

            report = EpochReport(epoch, total_tran, total_label, None, None,
                                 lr, 0.0)
            if dev_graphs and epoch % cfg['eval_every'] == 0:
                report.dev_uf1, report.dev_lf1 = evaluate(
                    model, dev_graphs, beam, external, jobs, self.handlers)
                if best_lf1 is None or report.dev_lf1 > best_lf1:
                    best_lf1 = report.dev_lf1
                    best_state = copy.deepcopy(model.state_dict())
                    stale = 0
                    if out is not None:
                        model.save(out)
                        self._logger.info("Saved checkpoint %s (dev LF1 %.4f)",
                                          out, best_lf1)
                else:
                    stale += 1
                    if stale >= cfg['patience']:
                        lr *= cfg['decay']
                        for group in optimizer.param_groups:
                            group['lr'] = lr
                        stale = 0
                        self._logger.info("Learning rate decayed to %g", lr)
            report.seconds = monotonic() - start
            self.history.append(report)
            self.log_report(report)

        if best_state is not None:
            model.load_state_dict(best_state)
        elif out is not None:
            model.save(out)
            self._logger.info("Saved checkpoint %s", out)
        model.eval()
        return model

    def log_report(self, report):
        if report.dev_lf1 is None:
            self._logger.info(
                "Epoch %d: loss %.4f (transition %.4f, label %.4f), %.1fs",
                report.epoch, report.loss_tran + report.loss_label,
                report.loss_tran, report.loss_label, report.seconds)
        else:
            self._logger.info(
                "Epoch %d: loss %.4f (transition %.4f, label %.4f), dev UF1 "
                "%.4f LF1 %.4f, %.1fs",
                report.epoch, report.loss_tran + report.loss_label,
                report.loss_tran, report.loss_label, report.dev_uf1,
                report.dev_lf1, report.seconds)


def train(train_graphs, config, dev_graphs=None, handlers=(), out=None,
          **kwargs):
    """
    Train a parser; see :meth:`Trainer.run`.

    :return: ``(model, history)`` with one :class:`EpochReport` per epoch.
    """
    trainer = Trainer(config, handlers)
    model = trainer.run(train_graphs, dev_graphs, out, **kwargs)
    return model, trainer.history
