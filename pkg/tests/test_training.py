import math
import os
import random

import numpy as np
import pytest
import torch

from sentiparse import training
from sentiparse.codec import encode
from sentiparse.config import load_config
from sentiparse.core import Arc, DependencyGraph, Sentence
from sentiparse.errors import TrainingError
from sentiparse.model import ParserModel
from sentiparse.transitions import oracle

from conftest import example_graph, random_graph

TINY = {
    'word_dim': 16, 'pos_dim': 4, 'lemma_dim': 4, 'char_dim': 8,
    'char_filters': 8, 'char_window': 3, 'dropout': 0.0,
    'encoder_hidden': 32, 'encoder_layers': 1, 'decoder_hidden': 32,
    'pointer_mlp': 32, 'label_mlp': 16, 'batch_size': 2, 'lr': 0.005,
    'beam': 1,
}


def tiny_config(**overrides):
    values = dict(TINY)
    values.update(overrides)
    return load_config(overrides=values)


def tiny_corpus():
    graph = example_graph()
    head_first = encode(graph, 'head-first')
    other = Sentence.from_forms('short', ['great', 'food', 'here'])
    short = DependencyGraph(other, [Arc(0, 1, 'exp:pos'),
                                    Arc(1, 2, 'target')])
    return [head_first, short]


class TestTrainer:

    def test_loss_decreases(self):
        _, history = training.train(tiny_corpus(), tiny_config(epochs=15))
        assert len(history) == 15
        first = history[0].loss_tran + history[0].loss_label
        last = history[-1].loss_tran + history[-1].loss_label
        assert last < first
        assert all(report.dev_lf1 is None for report in history)

    def test_same_seed_same_parameters(self):
        first, _ = training.train(tiny_corpus(), tiny_config(epochs=3))
        second, _ = training.train(tiny_corpus(), tiny_config(epochs=3))
        for name, value in first.state_dict().items():
            assert torch.equal(value, second.state_dict()[name])

    def test_checkpoint_keeps_best_dev_model(self, tmp_path):
        graphs = tiny_corpus()
        out = str(tmp_path / 'best.pt')
        model, history = training.train(graphs, tiny_config(epochs=4),
                                        dev_graphs=graphs, out=out)
        assert os.path.exists(out)
        assert all(report.dev_lf1 is not None for report in history)
        best = max(report.dev_lf1 for report in history)
        reloaded = ParserModel.load(out)
        assert training.evaluate(reloaded, graphs)[1] == pytest.approx(best)
        assert training.evaluate(model, graphs)[1] == pytest.approx(best)

    def test_learning_rate_decays_on_plateau(self):
        # a dev set without arcs always scores 0
        sentence = Sentence.from_forms('dev', ['nothing', 'here'])
        dev = [DependencyGraph(sentence)]
        _, history = training.train(
            tiny_corpus(), tiny_config(epochs=4, patience=1, decay=0.5),
            dev_graphs=dev)
        assert [report.lr for report in history] \
            == [0.005, 0.005, 0.0025, 0.00125]

    def test_non_finite_loss(self, monkeypatch):
        def broken_loss(self, sentence, sequence, external=None):
            nan = torch.tensor(float('nan'), requires_grad=True)
            return nan, nan * 0
        monkeypatch.setattr(ParserModel, 'loss', broken_loss)
        with pytest.raises(TrainingError) as info:
            training.train(tiny_corpus(), tiny_config(epochs=1))
        assert 'non-finite' in str(info.value)

    def test_external_vectors_are_used(self):
        graphs = tiny_corpus()
        external = {g.sent_id: np.zeros((g.sentence.n, 3), dtype=np.float32)
                    for g in graphs}
        model, _ = training.train(graphs, tiny_config(epochs=1,
                                                      external_dim=3),
                                  external=external)
        assert model.input_dim == 16 + 4 + 4 + 8 + 3


def memorization_corpus(size=50, seed=7):
    """Head-first graphs of 5 to 15 tokens with 1 to 3 opinions each."""
    rng = random.Random(seed)
    graphs = []
    while len(graphs) < size:
        graph = random_graph(rng, n=rng.randint(5, 15),
                             sent_id=str(len(graphs)))
        if graph.opinions:
            graphs.append(encode(graph, 'head-first'))
    return graphs


class TestMemorizationCorpus:

    def test_corpus_shape(self):
        graphs = memorization_corpus()
        assert len(graphs) == 50
        assert len({g.sent_id for g in graphs}) == 50
        assert all(5 <= g.sentence.n <= 15 for g in graphs)
        assert all(1 <= g.root_multiplicity() <= 3 for g in graphs)
        words = {form for g in graphs for form in g.sentence.forms}
        assert len(words) <= 200


@pytest.mark.slow
class TestMemorization:

    def test_training_set_is_learned(self):
        graphs = memorization_corpus()
        config = tiny_config(
            word_dim=32, char_dim=16, char_filters=16,
            encoder_hidden=128, encoder_layers=2, decoder_hidden=128,
            pointer_mlp=128, label_mlp=32, lr=0.002, batch_size=1,
            epochs=200, eval_every=5, patience=4, decay=0.5)
        # the training set doubles as dev set: the best epoch is kept
        model, history = training.train(graphs, config, dev_graphs=graphs)
        assert math.isfinite(history[-1].loss_tran)

        uf1, lf1 = training.evaluate(model, graphs)
        assert uf1 >= 0.99
        assert lf1 >= 0.99
        mismatched = [g.sent_id for g in graphs
                      if oracle(model.parse(g.sentence, beam=1)) != oracle(g)]
        assert mismatched == []
