import math

import pytest
import torch
import torch.nn as nn

from sentiparse.layers import (MLP, Biaffine, BiLSTMEncoder, CharCNN,
                               DecoderCell, LabelScorer, PointerScorer,
                               VariationalLSTM, biaffine_score, dropout_mask,
                               uniform_init_)


@pytest.fixture(autouse=True)
def seeded():
    torch.manual_seed(0)


def copy_cell_into(lstm, cell, suffix=''):
    with torch.no_grad():
        getattr(lstm, 'weight_ih_l0' + suffix).copy_(cell.weight_ih)
        getattr(lstm, 'weight_hh_l0' + suffix).copy_(cell.weight_hh)
        getattr(lstm, 'bias_ih_l0' + suffix).copy_(cell.bias_ih)
        getattr(lstm, 'bias_hh_l0' + suffix).copy_(cell.bias_hh)


class TestBiaffine:

    def test_matches_explicit_formula(self):
        block = Biaffine(3, 4, 2)
        for parameter in block.parameters():
            nn.init.normal_(parameter)
        x = torch.randn(3)
        y = torch.randn(5, 4)
        scores = block(x, y)
        assert scores.shape == (5, 2)
        for k in range(5):
            for o in range(2):
                expected = (x @ block.W[o] @ y[k] + block.U[o] @ x
                            + block.V[o] @ y[k] + block.b[o])
                assert scores[k, o].item() == pytest.approx(expected.item(),
                                                            rel=1e-5)

    def test_zero_parameters_give_uniform_pointer(self):
        scorer = PointerScorer(6, 8, 5)
        logits = scorer(torch.randn(6), torch.randn(4, 8))
        probabilities = torch.softmax(logits, dim=-1)
        assert torch.allclose(probabilities, torch.full((4,), 0.25))

    def test_batched_pointer(self):
        scorer = PointerScorer(6, 8, 5)
        uniform_init_(scorer)
        d = torch.randn(3, 6)
        C = torch.randn(7, 8)
        batched = scorer(d, C)
        assert batched.shape == (3, 7)
        assert torch.allclose(batched[1], scorer(d[1], C), atol=1e-6)

    def test_equal_label_blocks_give_uniform_labels(self):
        scorer = LabelScorer(6, 8, 5, 4)
        uniform_init_(scorer)
        with torch.no_grad():
            for name in ('W', 'U', 'V', 'b'):
                parameter = getattr(scorer.biaffine, name)
                parameter.copy_(parameter[:1].clone().expand_as(parameter))
        logits = scorer(torch.randn(6), torch.randn(8))
        probabilities = torch.softmax(logits, dim=-1)
        assert torch.allclose(probabilities, torch.full((4,), 0.25))


class TestCharCNN:

    def test_padding_does_not_change_output(self):
        cnn = CharCNN(10, 4, 6, 3)
        chars = torch.tensor([[1, 2, 3, 0], [4, 5, 0, 0]])
        wider = torch.cat([chars, torch.zeros(2, 3, dtype=torch.long)], 1)
        assert torch.allclose(cnn(chars), cnn(wider))
        assert cnn(chars).shape == (2, cnn.n_out)

    def test_word_without_characters(self):
        cnn = CharCNN(10, 4, 6, 3)
        out = cnn(torch.tensor([[0, 0, 0], [1, 2, 0]]))
        assert torch.equal(out[0], torch.zeros(6))
        assert torch.isfinite(out).all()


class TestRecurrent:

    def test_forward_lstm_matches_reference(self):
        layer = VariationalLSTM(5, 7)
        reference = nn.LSTM(5, 7)
        copy_cell_into(reference, layer.cell)
        inputs = torch.randn(6, 5)
        expected, _ = reference(inputs.unsqueeze(1))
        assert torch.allclose(layer(inputs), expected.squeeze(1), atol=1e-6)

    def test_backward_lstm_matches_reversed_reference(self):
        layer = VariationalLSTM(5, 7, reverse=True)
        reference = nn.LSTM(5, 7)
        copy_cell_into(reference, layer.cell)
        inputs = torch.randn(6, 5)
        expected, _ = reference(inputs.flip(0).unsqueeze(1))
        assert torch.allclose(layer(inputs), expected.squeeze(1).flip(0),
                              atol=1e-6)

    def test_bidirectional_matches_reference(self):
        encoder = BiLSTMEncoder(5, 7, 1)
        reference = nn.LSTM(5, 7, bidirectional=True)
        copy_cell_into(reference, encoder.forward_layers[0].cell)
        copy_cell_into(reference, encoder.backward_layers[0].cell, '_reverse')
        inputs = torch.randn(4, 5)
        expected, _ = reference(inputs.unsqueeze(1))
        output = encoder(inputs)
        assert output.shape == (4, encoder.n_out)
        assert torch.allclose(output, expected.squeeze(1), atol=1e-6)

    def test_empty_sequence(self):
        assert VariationalLSTM(5, 7)(torch.zeros(0, 5)).shape == (0, 7)

    def test_dropout_masks_are_shared_across_steps(self):
        decoder = DecoderCell(4, 3, dropout=0.5)
        decoder.train()
        carry = decoder.initial_carry(torch.zeros(1))
        masks = carry[2:]
        for _ in range(3):
            _, carry = decoder(torch.randn(4), carry)
        assert carry[2] is masks[0] and carry[3] is masks[1]

    def test_eval_has_no_masks(self):
        decoder = DecoderCell(4, 3, dropout=0.5)
        decoder.eval()
        carry = decoder.initial_carry(torch.zeros(1))
        assert carry[2] is None and carry[3] is None


class TestHelpers:

    def test_dropout_mask_values(self):
        mask = dropout_mask((1000,), 0.25, True, torch.zeros(1))
        values = set(mask.unique().tolist())
        assert all(v == 0.0 or v == pytest.approx(1 / 0.75) for v in values)
        assert dropout_mask((10,), 0.25, False, torch.zeros(1)) is None
        assert dropout_mask((10,), 0.0, True, torch.zeros(1)) is None

    def test_uniform_init_bounds(self):
        module = MLP(16, 4)
        uniform_init_(module, scale=2.0)
        bound = 2.0 / math.sqrt(16)
        assert module.linear.weight.abs().max().item() <= bound
        assert torch.equal(module.linear.bias, torch.zeros(4))


def gradcheck_module(module, inputs=(), forward=None):
    """
    Compare analytic and finite-difference gradients with respect to
    every parameter of ``module`` and every tensor of ``inputs``.
    """
    module.double()
    names = [name for name, _ in module.named_parameters()]
    parameters = tuple(p.detach().clone().requires_grad_(True)
                       for _, p in module.named_parameters())

    def run(*tensors):
        state = dict(zip(names, tensors[:len(names)]))

        def call(*args):
            return torch.func.functional_call(module, state, args)
        rest = tensors[len(names):]
        return forward(call, *rest) if forward else call(*rest)
    return torch.autograd.gradcheck(run, parameters + tuple(inputs),
                                    eps=1e-6, atol=1e-5, rtol=1e-4)


def double(*shape):
    return torch.randn(*shape, dtype=torch.double, requires_grad=True)


@pytest.mark.parametrize('seed', range(20))
class TestGradients:

    def test_biaffine_score(self, seed):
        torch.manual_seed(seed)
        inputs = (double(3), double(4, 2), double(2, 3, 2), double(2, 3),
                  double(2, 2), double(2))
        assert torch.autograd.gradcheck(biaffine_score, inputs,
                                        eps=1e-6, atol=1e-5, rtol=1e-4)

    def test_pointer_scorer(self, seed):
        torch.manual_seed(seed)
        scorer = PointerScorer(4, 5, 3)
        uniform_init_(scorer)
        for parameter in scorer.biaffine.parameters():
            nn.init.normal_(parameter)
        assert gradcheck_module(scorer, (double(4), double(6, 5)))

    def test_label_scorer(self, seed):
        torch.manual_seed(seed)
        scorer = LabelScorer(4, 5, 3, 4)
        uniform_init_(scorer)
        for parameter in scorer.biaffine.parameters():
            nn.init.normal_(parameter)
        assert gradcheck_module(scorer, (double(4), double(5)))

    def test_char_convolution(self, seed):
        torch.manual_seed(seed)
        cnn = CharCNN(10, 3, 2, 3)
        chars = torch.randint(1, 10, (3, 5))
        assert gradcheck_module(cnn, forward=lambda call: call(chars))

    def test_encoder_cell(self, seed):
        torch.manual_seed(seed)
        assert gradcheck_module(VariationalLSTM(3, 2), (double(4, 3),))

    def test_decoder_cell(self, seed):
        torch.manual_seed(seed)
        decoder = DecoderCell(3, 2)

        def two_steps(call, r1, r2, h, c):
            d1, carry = call(r1, (h, c, None, None))
            d2, carry = call(r2, carry)
            return d1, d2, carry[1]
        assert gradcheck_module(decoder, (double(3), double(3),
                                          double(1, 2), double(1, 2)),
                                forward=two_steps)
