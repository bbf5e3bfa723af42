"""
Neural building blocks of the parser: perceptrons, biaffine scorers, the
character convolution and the recurrent encoder and decoder.

All modules work on one sentence at a time. The recurrent layers are
unrolled :class:`torch.nn.LSTMCell` loops so that one dropout mask can be
shared by every time step of a sequence (variational dropout) on both
the inputs and the hidden-to-hidden connections.
"""

import math

import torch
import torch.nn as nn
import torch.nn.functional as F


def uniform_init_(module, scale=1.0):
    """
    Initialise every weight matrix of ``module`` uniformly in
    ``[-b, b]`` with ``b = scale / sqrt(fan_in)`` and every bias and
    vector parameter to zero.
    """
    for name, parameter in module.named_parameters():
        with torch.no_grad():
            if parameter.dim() < 2:
                parameter.zero_()
            else:
                bound = scale / math.sqrt(parameter.size(-1))
                parameter.uniform_(-bound, bound)
    return module


def dropout_mask(size, p, training, like):
    """
    A mask of shape ``size`` scaled by ``1 / (1 - p)``, or :const:`None`
    when dropout is inactive.
    """
    if not training or p == 0.0:
        return None
    keep = torch.full(size, 1.0 - p, dtype=like.dtype, device=like.device)
    return torch.bernoulli(keep) / (1.0 - p)


def _masked(x, mask):
    return x if mask is None else x * mask


class MLP(nn.Module):
    """Single layer perceptron with ELU activation, used to reduce dimensions."""

    def __init__(self, n_in, n_out, dropout=0.0):
        super(MLP, self).__init__()
        self.linear = nn.Linear(n_in, n_out)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        return self.dropout(F.elu(self.linear(x)))


###############################
# Biaffine scoring
###############################
def biaffine_score(x, y, W, U, V, b):
    """
    ``s[..., k, o] = x W_o y_k + U_o x + V_o y_k + b_o``.

    :param x: Queries, shape ``(..., n_x)``.
    :param y: Candidates, shape ``(..., K, n_y)``.
    :param W: Shape ``(n_out, n_x, n_y)``.
    :param U: Shape ``(n_out, n_x)``.
    :param V: Shape ``(n_out, n_y)``.
    :param b: Shape ``(n_out,)``.
    :return: Scores of shape ``(..., K, n_out)``.
    """
    bilinear = torch.einsum('...i,oij,...kj->...ko', x, W, y)
    linear_x = torch.einsum('...i,oi->...o', x, U).unsqueeze(-2)
    linear_y = torch.einsum('...kj,oj->...ko', y, V)
    return bilinear + linear_x + linear_y + b


class Biaffine(nn.Module):
    """
    Biaffine block with explicit bilinear weight ``W``, linear weights
    ``U`` and ``V`` and bias ``b``.
    """

    def __init__(self, n_x, n_y, n_out=1):
        super(Biaffine, self).__init__()
        self.W = nn.Parameter(torch.zeros(n_out, n_x, n_y))
        self.U = nn.Parameter(torch.zeros(n_out, n_x))
        self.V = nn.Parameter(torch.zeros(n_out, n_y))
        self.b = nn.Parameter(torch.zeros(n_out))

    def forward(self, x, y):
        return biaffine_score(x, y, self.W, self.U, self.V, self.b)


class PointerScorer(nn.Module):
    """
    Scores every encoder position for a decoder state:
    ``v_k = f1(d)^T W f2(c_k) + U^T f1(d) + V^T f2(c_k) + b``.
    """

    def __init__(self, n_decoder, n_encoder, n_hidden, dropout=0.0):
        super(PointerScorer, self).__init__()
        self.f1 = MLP(n_decoder, n_hidden, dropout)
        self.f2 = MLP(n_encoder, n_hidden, dropout)
        self.biaffine = Biaffine(n_hidden, n_hidden, 1)

    def forward(self, d, C):
        """
        :param d: Decoder state ``(n_decoder,)`` or ``(B, n_decoder)``.
        :param C: Encoder states ``(n+1, n_encoder)``.
        :return: Logits ``(n+1,)`` or ``(B, n+1)``.
        """
        query = self.f1(d)
        keys = self.f2(C)
        if query.dim() == 2:
            keys = keys.unsqueeze(0).expand(query.size(0), -1, -1)
        return self.biaffine(query, keys).squeeze(-1)


class LabelScorer(nn.Module):
    """Scores every arc label for a decoder state and a chosen head."""

    def __init__(self, n_decoder, n_encoder, n_hidden, n_labels, dropout=0.0):
        super(LabelScorer, self).__init__()
        self.g1 = MLP(n_decoder, n_hidden, dropout)
        self.g2 = MLP(n_encoder, n_hidden, dropout)
        self.biaffine = Biaffine(n_hidden, n_hidden, n_labels)

    def forward(self, d, c_head):
        """
        :param d: Decoder state ``(n_decoder,)``.
        :param c_head: Encoder state of the head ``(n_encoder,)``.
        :return: Logits ``(n_labels,)``.
        """
        head = self.g2(c_head).unsqueeze(-2)
        return self.biaffine(self.g1(d), head).squeeze(-2)


###############################
# Characters
###############################
class CharCNN(nn.Module):
    """
    Character convolution: embed characters, convolve with ``filters``
    filters of width ``window`` and max-pool over each word.
    """

    def __init__(self, n_chars, char_dim, filters, window, padding_idx=0):
        super(CharCNN, self).__init__()
        self.padding_idx = padding_idx
        self.embedding = nn.Embedding(n_chars, char_dim,
                                      padding_idx=padding_idx)
        self.conv = nn.Conv1d(char_dim, filters, window,
                              padding=window // 2)
        self.n_out = filters

    def forward(self, chars):
        """
        :param chars: Long tensor ``(n_words, max_chars)`` padded with 0.
        :return: ``(n_words, filters)``.
        """
        mask = chars != self.padding_idx
        x = self.embedding(chars).transpose(1, 2)
        h = self.conv(x)[:, :, :chars.size(1)]
        h = h.masked_fill(~mask.unsqueeze(1), float('-inf'))
        pooled = h.max(dim=2).values
        # words without characters pool to -inf
        return pooled.masked_fill(~mask.any(dim=1, keepdim=True), 0.0)


###############################
# Recurrent layers
###############################
class VariationalLSTM(nn.Module):
    """
    Unidirectional LSTM over one sequence with per-sequence dropout
    masks on the inputs and on the recurrent hidden state.
    """

    def __init__(self, n_in, n_hidden, dropout=0.0, reverse=False):
        super(VariationalLSTM, self).__init__()
        self.cell = nn.LSTMCell(n_in, n_hidden)
        self.n_hidden = n_hidden
        self.dropout = dropout
        self.reverse = reverse

    def forward(self, inputs):
        """
        :param inputs: ``(T, n_in)``.
        :return: Hidden states ``(T, n_hidden)`` in input order.
        """
        length = inputs.size(0)
        h = inputs.new_zeros(1, self.n_hidden)
        c = inputs.new_zeros(1, self.n_hidden)
        input_mask = dropout_mask((1, inputs.size(1)), self.dropout,
                                  self.training, inputs)
        hidden_mask = dropout_mask((1, self.n_hidden), self.dropout,
                                   self.training, inputs)
        steps = range(length - 1, -1, -1) if self.reverse else range(length)
        outputs = [None] * length
        for t in steps:
            x = _masked(inputs[t:t + 1], input_mask)
            h, c = self.cell(x, (_masked(h, hidden_mask), c))
            outputs[t] = h
        if not outputs:
            return inputs.new_zeros(0, self.n_hidden)
        return torch.cat(outputs, dim=0)


class BiLSTMEncoder(nn.Module):
    """
    Stacked bidirectional LSTM; every position's output is the forward
    and backward hidden states of the last layer, concatenated.
    """

    def __init__(self, n_in, n_hidden, n_layers, dropout=0.0):
        super(BiLSTMEncoder, self).__init__()
        self.forward_layers = nn.ModuleList()
        self.backward_layers = nn.ModuleList()
        for layer in range(n_layers):
            size = n_in if layer == 0 else 2 * n_hidden
            self.forward_layers.append(VariationalLSTM(size, n_hidden, dropout))
            self.backward_layers.append(
                VariationalLSTM(size, n_hidden, dropout, reverse=True))
        self.n_out = 2 * n_hidden

    def forward(self, inputs):
        x = inputs
        for forward, backward in zip(self.forward_layers, self.backward_layers):
            x = torch.cat([forward(x), backward(x)], dim=1)
        return x


class DecoderCell(nn.Module):
    """
    One-layer LSTM decoder advanced one transition at a time. The
    dropout masks live in the carry so they stay fixed for a whole
    transition sequence.
    """

    def __init__(self, n_in, n_hidden, dropout=0.0):
        super(DecoderCell, self).__init__()
        self.cell = nn.LSTMCell(n_in, n_hidden)
        self.n_in = n_in
        self.n_hidden = n_hidden
        self.dropout = dropout

    def initial_carry(self, like):
        """``(h, c, input_mask, hidden_mask)`` for a new sequence."""
        return (like.new_zeros(1, self.n_hidden),
                like.new_zeros(1, self.n_hidden),
                dropout_mask((1, self.n_in), self.dropout, self.training, like),
                dropout_mask((1, self.n_hidden), self.dropout, self.training,
                             like))

    def forward(self, r, carry):
        """
        :param r: Input ``(n_in,)``.
        :param carry: Previous carry, from :meth:`initial_carry` first.
        :return: ``(d, carry)`` with ``d`` of shape ``(n_hidden,)``.
        """
        h, c, input_mask, hidden_mask = carry
        x = _masked(r.unsqueeze(0), input_mask)
        h, c = self.cell(x, (_masked(h, hidden_mask), c))
        return h.squeeze(0), (h, c, input_mask, hidden_mask)
