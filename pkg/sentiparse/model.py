"""
The pointer-based transition parser.

Every token ``i`` is represented by ``e_i``, the concatenation of word,
part-of-speech, lemma and character-convolution embeddings and,
optionally, a precomputed contextual vector. A bidirectional LSTM turns
``e_1..e_n`` into ``c_1..c_n``; ``c_0`` is a learned root vector.

At each transition a one-layer LSTM decoder reads ``r_t = c_i + c_j``
(``c_i`` alone while the focus word has no head yet) and a biaffine
pointer distributes probability over the positions ``0..n``. Pointing
at the focus word ``i`` means Move; pointing at another position ``k``
means Attach-to ``k``, labeled by a second biaffine classifier on the
decoder state and ``c_k``. When the best position is not a legal
action the next best one is tried.
"""

import logging
from collections import Counter

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F
from recordclass import recordclass

from .core import DependencyGraph, EXPRESSION_LABELS, atomic_labels
from .errors import InputError
from .layers import (BiLSTMEncoder, CharCNN, DecoderCell, LabelScorer,
                     PointerScorer, uniform_init_)
from .transitions import (Action, StateConfig, TransitionSequence, apply,
                          legal, replay_graph)

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'sentiparse-checkpoint/1'

PAD = '<pad>'
UNK = '<unk>'


class Vocabulary(object):
    """
    Token to index mapping. Index 0 is padding, index 1 the learned
    unknown token.
    """

    def __init__(self, tokens=()):
        self.tokens = [PAD, UNK]
        self.index = {PAD: 0, UNK: 1}
        for token in tokens:
            self.add(token)

    @classmethod
    def build(cls, items, min_count=1):
        """Vocabulary of ``items`` occurring at least ``min_count`` times, sorted."""
        counts = Counter(items)
        return cls(sorted(t for t, c in counts.items() if c >= min_count
                          and t not in (PAD, UNK)))

    @classmethod
    def from_list(cls, tokens):
        vocabulary = cls()
        vocabulary.tokens = list(tokens)
        vocabulary.index = {t: i for i, t in enumerate(vocabulary.tokens)}
        return vocabulary

    def add(self, token):
        if token not in self.index:
            self.index[token] = len(self.tokens)
            self.tokens.append(token)
        return self.index[token]

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def lookup(self, token):
        return self.index.get(token, 1)


def build_vocabularies(sentences):
    """Word, POS, lemma and character vocabularies of a list of sentences."""
    tokens = [t for s in sentences for t in s.tokens]
    return {
        'word': Vocabulary.build(t.form for t in tokens),
        'pos': Vocabulary.build(t.upos for t in tokens),
        'lemma': Vocabulary.build(t.lemma for t in tokens),
        'char': Vocabulary.build(ch for t in tokens for ch in t.form),
    }


def root_labels(labels):
    """Mask of the labels allowed on arcs out of the root (only ``exp:*`` atoms)."""
    return [all(atom in EXPRESSION_LABELS for atom in atomic_labels(label))
            for label in labels]


def select_action(alpha, state, n, root_allowed=True):
    """
    Turn a pointer distribution into a legal action.

    Positions are tried in descending probability (ties to the lower
    position). The focus word gives a Move; any other position gives an
    Attach-to when that is legal, otherwise the next position is tried.

    :param alpha: Sequence of ``n + 1`` probabilities.
    :param state: The current :class:`StateConfig`, not final.
    :param n: Sentence length.

    :param root_allowed:
        When false, attaching to position 0 is never chosen.

    :return: An unlabeled :class:`Action`.
    """
    scores = np.asarray(alpha, dtype=np.float64)
    for k in np.argsort(-scores, kind='stable'):
        k = int(k)
        if k == state.i:
            return Action.move()
        if k == 0 and not root_allowed:
            continue
        action = Action.attach(k)
        if legal(state, action, n):
            return action
    return Action.move()


class Hypothesis(recordclass('Hypothesis',
                             ['score', 'state', 'actions', 'carry', 'labels'])):
    """
    One partial transition sequence in the beam.

    :param score:  Sum of the pointer log-probabilities of its actions
    :param state:  Current :class:`StateConfig`
    :param actions:  Labeled actions so far
    :param carry:  Decoder carry after the last action
    :param labels:  Label of every attachment, in order
    """


class ParserModel(nn.Module):
    """
    The full parser.

    :param config: Configuration map with ``representation`` and ``model`` sections.
    :param vocabularies: Dict ``word/pos/lemma/char -> Vocabulary``.
    :param labels: List of (collapsed) arc labels, the classifier outputs.
    """

    def __init__(self, config, vocabularies, labels):
        super(ParserModel, self).__init__()
        rep = config['representation']
        cfg = config['model']
        self.config = {'representation': dict(rep), 'model': dict(cfg)}
        self.vocabularies = vocabularies
        self.labels = list(labels)
        self.label_index = {label: i for i, label in enumerate(self.labels)}
        if not self.labels:
            raise InputError("The parser needs at least one arc label")

        self.use_pos = cfg['use_pos']
        self.use_lemma = cfg['use_lemma']
        self.use_char = cfg['use_char']
        self.external_dim = rep['external_dim'] if cfg['use_external'] else 0
        self.use_coparent = cfg['use_coparent']

        self.word_embedding = nn.Embedding(len(vocabularies['word']),
                                           rep['word_dim'])
        n_in = rep['word_dim']
        if self.use_pos:
            self.pos_embedding = nn.Embedding(len(vocabularies['pos']),
                                              rep['pos_dim'])
            n_in += rep['pos_dim']
        if self.use_lemma:
            self.lemma_embedding = nn.Embedding(len(vocabularies['lemma']),
                                                rep['lemma_dim'])
            n_in += rep['lemma_dim']
        if self.use_char:
            self.char_cnn = CharCNN(len(vocabularies['char']), rep['char_dim'],
                                    rep['char_filters'], rep['char_window'])
            n_in += rep['char_filters']
        n_in += self.external_dim
        self.input_dim = n_in
        self.embedding_dropout = nn.Dropout(rep['dropout'])

        self.encoder = BiLSTMEncoder(n_in, cfg['encoder_hidden'],
                                     cfg['encoder_layers'], rep['dropout'])
        n_enc = self.encoder.n_out
        self.root = nn.Parameter(torch.zeros(n_enc))
        self.decoder = DecoderCell(n_enc, cfg['decoder_hidden'], rep['dropout'])
        self.pointer = PointerScorer(cfg['decoder_hidden'], n_enc,
                                     cfg['pointer_mlp'], rep['dropout'])
        self.labeler = LabelScorer(cfg['decoder_hidden'], n_enc,
                                   cfg['label_mlp'], len(self.labels),
                                   rep['dropout'])

        uniform_init_(self, cfg['init_scale'])
        with torch.no_grad():
            self.root.uniform_(-1.0, 1.0)
            self.root.mul_(cfg['init_scale'] / n_enc ** 0.5)

        self.root_label_mask = torch.tensor(root_labels(self.labels))

    @property
    def root_allowed(self):
        return bool(self.root_label_mask.any())

    ###############################
    # Representation and encoder
    ###############################
    def _indices(self, name, values):
        vocabulary = self.vocabularies[name]
        return torch.tensor([vocabulary.lookup(v) for v in values],
                            dtype=torch.long)

    def _chars(self, sentence):
        vocabulary = self.vocabularies['char']
        width = max(len(t.form) for t in sentence.tokens)
        chars = torch.zeros(sentence.n, width, dtype=torch.long)
        for row, token in enumerate(sentence.tokens):
            for column, ch in enumerate(token.form):
                chars[row, column] = vocabulary.lookup(ch)
        return chars

    def represent(self, sentence, external=None):
        """
        Token representations ``e_1..e_n``.

        :param sentence: A non-empty :class:`Sentence`.
        :param external: Array ``(n, external_dim)`` when the model uses them.
        :return: Tensor ``(n, input_dim)``.

        :exception InputError:
            External vectors missing or of the wrong shape.
        """
        tokens = sentence.tokens
        parts = [self.word_embedding(
            self._indices('word', [t.form for t in tokens]))]
        if self.use_pos:
            parts.append(self.pos_embedding(
                self._indices('pos', [t.upos for t in tokens])))
        if self.use_lemma:
            parts.append(self.lemma_embedding(
                self._indices('lemma', [t.lemma for t in tokens])))
        if self.use_char:
            parts.append(self.char_cnn(self._chars(sentence)))
        if self.external_dim:
            if external is None:
                raise InputError("Sentence %s: the model needs external "
                                 "vectors" % sentence.sent_id)
            vectors = torch.as_tensor(np.asarray(external, dtype=np.float32))
            if tuple(vectors.shape) != (sentence.n, self.external_dim):
                raise InputError(
                    "Sentence %s: external vectors of shape %s, expected %s"
                    % (sentence.sent_id, tuple(vectors.shape),
                       (sentence.n, self.external_dim)))
            parts.append(vectors)
        return self.embedding_dropout(torch.cat(parts, dim=1))

    def encode_sentence(self, e):
        """
        Encoder states ``c_0..c_n``: the root vector followed by the
        bidirectional LSTM outputs.

        :param e: Tensor ``(n, input_dim)``.
        :return: Tensor ``(n + 1, 2 * encoder_hidden)``.
        """
        return torch.cat([self.root.unsqueeze(0), self.encoder(e)], dim=0)

    ###############################
    # Decoder and scorers
    ###############################
    def decoder_input(self, C, state):
        """``r_t = c_i + c_j``, or ``c_i`` when ``j`` is -1."""
        if self.use_coparent and state.j >= 0:
            return C[state.i] + C[state.j]
        return C[state.i]

    def decoder_step(self, C, state, carry=None):
        """
        Advance the decoder by one transition.

        :param C: Encoder states.
        :param state: The current :class:`StateConfig`, ``i <= n``.
        :param carry: Decoder carry, :const:`None` at the first step.
        :return: ``(d_t, carry)``.
        """
        if carry is None:
            carry = self.decoder.initial_carry(C)
        return self.decoder(self.decoder_input(C, state), carry)

    def pointer_logits(self, d, C):
        return self.pointer(d, C)

    def pointer_scores(self, d, C):
        """The pointer distribution ``alpha`` over positions ``0..n``."""
        return F.softmax(self.pointer_logits(d, C), dim=-1)

    def label_logits(self, d, c_head):
        return self.labeler(d, c_head)

    def label_scores(self, d, c_head):
        """The label distribution ``beta`` for an arc from the head ``c_head``."""
        return F.softmax(self.label_logits(d, c_head), dim=-1)

    def predict_label(self, d, C, k):
        """Most probable label of the arc ``k -> i``; ``exp:*`` labels only from the root."""
        logits = self.label_logits(d, C[k])
        if k == 0:
            logits = logits.masked_fill(~self.root_label_mask, float('-inf'))
        return self.labels[int(torch.argmax(logits))]

    ###############################
    # Training objective
    ###############################
    def loss(self, sentence, sequence, external=None):
        """
        Teacher-forced losses over an oracle sequence.

        The pointer target of an Attach-to ``k`` is ``k`` and that of a
        Move is the focus position ``i``. The label loss only counts
        attach steps.

        :param sentence: The :class:`Sentence`.
        :param sequence: Its oracle :class:`TransitionSequence`, with trace.
        :return: ``(loss_tran, loss_label)`` scalar tensors.

        :exception InputError: A label outside the model's label set.
        """
        zero = self.root.new_zeros(())
        if sentence.n == 0:
            return zero, zero
        C = self.encode_sentence(self.represent(sentence, external))
        trace = sequence.trace
        if trace is None:
            trace = [StateConfig.initial()]
            for action in sequence:
                trace.append(apply(trace[-1], action, sentence.n))

        decoder_states = []
        pointer_targets = []
        label_steps = []
        carry = None
        for t, action in enumerate(sequence):
            state = trace[t]
            d, carry = self.decoder_step(C, state, carry)
            decoder_states.append(d)
            if action.is_move:
                pointer_targets.append(state.i)
            else:
                pointer_targets.append(action.k)
                if action.label not in self.label_index:
                    raise InputError("Sentence %s: unknown label %r"
                                     % (sentence.sent_id, action.label))
                label_steps.append((t, action.k,
                                    self.label_index[action.label]))

        D = torch.stack(decoder_states)
        logits = self.pointer_logits(D, C)
        loss_tran = F.cross_entropy(
            logits, torch.tensor(pointer_targets, dtype=torch.long),
            reduction='sum')
        if not label_steps:
            return loss_tran, zero
        steps, heads, gold = zip(*label_steps)
        label_logits = self.label_logits(
            D[list(steps)], C[list(heads)])
        loss_label = F.cross_entropy(
            label_logits, torch.tensor(gold, dtype=torch.long),
            reduction='sum')
        return loss_tran, loss_label

    ###############################
    # Decoding
    ###############################
    def parse(self, sentence, beam=1, external=None):
        """
        Parse a sentence.

        :param sentence: A :class:`Sentence`.
        :param beam: Beam size, 1 for greedy decoding.
        :param external: Optional external vectors.
        :return: The :class:`DependencyGraph`.
        """
        if sentence.n == 0:
            return DependencyGraph(sentence)
        was_training = self.training
        self.eval()
        try:
            with torch.no_grad():
                C = self.encode_sentence(self.represent(sentence, external))
                if beam <= 1:
                    actions = self._greedy(C, sentence.n)
                else:
                    actions = self._beam_search(C, sentence.n, beam)
        finally:
            self.train(was_training)
        return replay_graph(sentence, TransitionSequence(actions))

    def _greedy(self, C, n):
        state = StateConfig.initial()
        carry = None
        actions = []
        while not state.is_final(n):
            d, carry = self.decoder_step(C, state, carry)
            alpha = self.pointer_scores(d, C).numpy()
            action = select_action(alpha, state, n, self.root_allowed)
            if not action.is_move:
                action = Action.attach(action.k,
                                       self.predict_label(d, C, action.k))
            state = apply(state, action, n)
            actions.append(action)
        return actions

    def _beam_search(self, C, n, beam):
        hypotheses = [Hypothesis(0.0, StateConfig.initial(), [], None, [])]
        while not all(h.state.is_final(n) for h in hypotheses):
            candidates = []
            for rank, hyp in enumerate(hypotheses):
                if hyp.state.is_final(n):
                    candidates.append((hyp.score, rank, -1, hyp, None, None))
                    continue
                d, carry = self.decoder_step(C, hyp.state, hyp.carry)
                log_alpha = F.log_softmax(self.pointer_logits(d, C),
                                          dim=-1).numpy()
                for k in range(n + 1):
                    if k == hyp.state.i:
                        action = Action.move()
                    else:
                        if k == 0 and not self.root_allowed:
                            continue
                        action = Action.attach(k)
                        if not legal(hyp.state, action, n):
                            continue
                    candidates.append((hyp.score + float(log_alpha[k]), rank,
                                       k, hyp, action, (d, carry)))
            candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
            extended = []
            for score, _, _, hyp, action, step in candidates[:beam]:
                if action is None:
                    extended.append(hyp)
                    continue
                d, carry = step
                labels = list(hyp.labels)
                if not action.is_move:
                    label = self.predict_label(d, C, action.k)
                    action = Action.attach(action.k, label)
                    labels.append(label)
                extended.append(Hypothesis(
                    score, apply(hyp.state, action, n),
                    hyp.actions + [action], carry, labels))
            hypotheses = extended
        return hypotheses[0].actions

    ###############################
    # Pretrained embeddings and checkpoints
    ###############################
    def load_pretrained(self, name, table):
        """
        Copy rows of an :class:`EmbeddingTable` into the ``word`` or
        ``lemma`` embedding. Returns the number of rows copied.
        """
        embedding = getattr(self, name + '_embedding')
        if table.dim != embedding.embedding_dim:
            raise InputError("%s vectors have dimension %d, the model %d"
                             % (name, table.dim, embedding.embedding_dim))
        copied = 0
        with torch.no_grad():
            for token, row in self.vocabularies[name].index.items():
                if token in table:
                    embedding.weight[row] = torch.from_numpy(
                        table.lookup(token).copy())
                    copied += 1
        logger.info("Initialised %d of %d %s embeddings from pretrained "
                    "vectors", copied, len(self.vocabularies[name]), name)
        return copied

    def save(self, path):
        torch.save({
            'format': CHECKPOINT_FORMAT,
            'config': self.config,
            'vocabularies': {name: list(v.tokens)
                             for name, v in self.vocabularies.items()},
            'labels': self.labels,
            'state_dict': self.state_dict(),
        }, path)

    @classmethod
    def load(cls, path):
        """
        Load a checkpoint written by :meth:`save`.

        :exception InputError: Unknown checkpoint format.
        """
        checkpoint = torch.load(path, map_location='cpu')
        if checkpoint.get('format') != CHECKPOINT_FORMAT:
            raise InputError("%s is not a %s file"
                             % (path, CHECKPOINT_FORMAT))
        vocabularies = {name: Vocabulary.from_list(tokens)
                        for name, tokens in checkpoint['vocabularies'].items()}
        model = cls(checkpoint['config'], vocabularies, checkpoint['labels'])
        model.load_state_dict(checkpoint['state_dict'])
        model.eval()
        return model
