"""
Domain types shared by every other module.

A :class:`Sentence` holds the tokens of one input sentence. The
artificial root word is never stored as a token: it lives implicitly at
index 0. A :class:`SentimentGraph` is the list of :class:`Opinion`
tuples annotated on a sentence, and a :class:`DependencyGraph` is the
bi-lexical arc set that the parser builds. Arcs between the same head
and dependent are collapsed into one :class:`Arc` whose label joins the
atomic labels with ``#``.

All types here are immutable once constructed.
"""

import enum
from collections import namedtuple

from .errors import LabelFormatError, MalformedGraphError, SentiParseError

###############################
# Constants
###############################
LABEL_SEPARATOR = '#'

HOLDER = 'holder'
TARGET = 'target'
EXPRESSION = 'expression'

ROLES = (HOLDER, TARGET, EXPRESSION)


class Polarity(enum.Enum):
    """Sentiment polarity of an opinion expression."""
    POSITIVE = 'Positive'
    NEGATIVE = 'Negative'
    NEUTRAL = 'Neutral'

    @property
    def label(self):
        """The atomic arc label for an expression of this polarity."""
        return 'exp:' + _POLARITY_TAGS[self]

    @classmethod
    def from_label(cls, label):
        """
        Inverse of :attr:`label`.

        :exception LabelFormatError:
            If ``label`` is not an ``exp:*`` label.
        """
        for polarity, tag in _POLARITY_TAGS.items():
            if label == 'exp:' + tag:
                return polarity
        raise LabelFormatError("Not an expression label: %r" % label)

    @classmethod
    def parse(cls, name):
        """Read a polarity name as found in corpus files (case-insensitive)."""
        for polarity in cls:
            if polarity.value.lower() == str(name).strip().lower():
                return polarity
        raise ValueError("Unknown polarity: %r" % name)


_POLARITY_TAGS = {
    Polarity.POSITIVE: 'pos',
    Polarity.NEGATIVE: 'neg',
    Polarity.NEUTRAL: 'neu',
}

EXPRESSION_LABELS = tuple(p.label for p in Polarity)
ATOMIC_LABELS = frozenset((HOLDER, TARGET) + EXPRESSION_LABELS)


###############################
# Tokens and sentences
###############################
class Token(namedtuple('Token', ['index', 'form', 'lemma', 'upos',
                                 'char_begin', 'char_end', 'syn_head'])):
    """
    One token of a sentence.

    :param index:  1-based position in the sentence
    :param form:  Surface form
    :param lemma:  Lemma, the form itself when unknown
    :param upos:  Part-of-speech tag, ``X`` when unknown
    :param char_begin:  Character offset of the first character in the text
    :param char_end:  Character offset one past the last character
    :param syn_head:  Optional syntactic head index (0 = syntactic root)
    """
    __slots__ = ()

    def __new__(cls, index, form, lemma=None, upos=None, char_begin=0,
                char_end=None, syn_head=None):
        if lemma is None:
            lemma = form
        if upos is None:
            upos = 'X'
        if char_end is None:
            char_end = char_begin + len(form)
        if index < 1:
            raise SentiParseError("Token index must be >= 1, got %d" % index)
        if not char_begin < char_end:
            raise SentiParseError(
                "Token %d has an empty character span" % index)
        if syn_head is not None and (syn_head < 0 or syn_head == index):
            raise SentiParseError(
                "Token %d has an invalid syntactic head %d"
                % (index, syn_head))
        return super(Token, cls).__new__(
            cls, index, form, lemma, upos, char_begin, char_end, syn_head)


class Sentence(namedtuple('Sentence', ['sent_id', 'text', 'tokens'])):
    """
    A tokenized sentence. Tokens are numbered 1..n; index 0 is the
    artificial root and has no :class:`Token`.
    """
    __slots__ = ()

    def __new__(cls, sent_id, text, tokens):
        tokens = tuple(tokens)
        previous_end = 0
        for position, token in enumerate(tokens, 1):
            if token.index != position:
                raise SentiParseError(
                    "Sentence %s: token indices must be contiguous from 1"
                    % sent_id)
            if token.char_begin < previous_end:
                raise SentiParseError(
                    "Sentence %s: token %d overlaps its predecessor"
                    % (sent_id, position))
            if token.syn_head is not None and token.syn_head > len(tokens):
                raise SentiParseError(
                    "Sentence %s: token %d has head %d outside the sentence"
                    % (sent_id, position, token.syn_head))
            previous_end = token.char_end
        return super(Sentence, cls).__new__(cls, str(sent_id), text, tokens)

    @classmethod
    def from_forms(cls, sent_id, forms, lemmas=None, upos=None,
                   syn_heads=None, text=None):
        """
        Build a sentence from token strings. When ``text`` is omitted it is
        the forms joined by single spaces. Otherwise every form must occur in
        ``text`` in order.
        """
        forms = list(forms)
        for name, column in (('lemmas', lemmas), ('upos', upos),
                             ('heads', syn_heads)):
            if column is not None and len(column) != len(forms):
                raise SentiParseError(
                    "Sentence %s: %d %s for %d tokens"
                    % (sent_id, len(column), name, len(forms)))
        if text is None:
            text = ' '.join(forms)
        tokens = []
        position = 0
        for i, form in enumerate(forms):
            while position < len(text) and text[position].isspace():
                position += 1
            if text.startswith(form, position):
                begin = position
            else:
                begin = text.find(form, position)
            if begin < 0:
                raise SentiParseError(
                    "Sentence %s: token %r not found in text" % (sent_id, form))
            end = begin + len(form)
            tokens.append(Token(
                i + 1, form,
                lemmas[i] if lemmas else None,
                upos[i] if upos else None,
                begin, end,
                syn_heads[i] if syn_heads else None))
            position = end
        return cls(sent_id, text, tokens)

    @property
    def n(self):
        """Number of tokens, not counting the root."""
        return len(self.tokens)

    @property
    def forms(self):
        return [t.form for t in self.tokens]

    @property
    def has_syntax(self):
        """Whether every token carries a syntactic head."""
        return all(t.syn_head is not None for t in self.tokens)

    def token(self, index):
        """Return the token at 1-based ``index``."""
        return self.tokens[index - 1]


###############################
# Sentiment graphs
###############################
class Span(namedtuple('Span', ['token_indices'])):
    """
    A possibly discontiguous set of token indices, stored sorted.
    """
    __slots__ = ()

    def __new__(cls, token_indices):
        indices = tuple(sorted(set(int(i) for i in token_indices)))
        if not indices:
            raise SentiParseError("A span cannot be empty")
        if indices[0] < 1:
            raise SentiParseError("Span indices must be >= 1")
        return super(Span, cls).__new__(cls, indices)

    @property
    def size(self):
        return len(self.token_indices)

    def as_set(self):
        return frozenset(self.token_indices)

    @property
    def first(self):
        return self.token_indices[0]

    @property
    def last(self):
        return self.token_indices[-1]

    def runs(self):
        """Split the span into maximal runs of consecutive indices."""
        runs = []
        for index in self.token_indices:
            if runs and runs[-1][-1] == index - 1:
                runs[-1].append(index)
            else:
                runs.append([index])
        return runs

    def char_ranges(self, sentence):
        """
        Character ranges of the span in ``sentence``, one ``(begin, end)``
        pair per run of consecutive tokens.
        """
        return [(sentence.token(run[0]).char_begin,
                 sentence.token(run[-1]).char_end) for run in self.runs()]

    def check_bounds(self, n):
        if self.last > n:
            raise SentiParseError(
                "Span %s exceeds sentence length %d"
                % (list(self.token_indices), n))


class Opinion(namedtuple('Opinion', ['holder', 'target', 'expression',
                                     'polarity'])):
    """
    One opinion tuple. Holder and target are optional spans; the
    expression is required.
    """
    __slots__ = ()

    def __new__(cls, holder, target, expression, polarity):
        if expression is None:
            raise SentiParseError("An opinion needs an expression span")
        if not isinstance(polarity, Polarity):
            polarity = Polarity.parse(polarity)
        return super(Opinion, cls).__new__(
            cls, holder, target, expression, polarity)

    def span(self, role):
        """Return the span for ``role`` (holder, target or expression)."""
        return getattr(self, role)

    def sort_key(self):
        def key(span):
            return () if span is None else span.token_indices
        return (key(self.expression), self.polarity.value,
                key(self.holder), key(self.target))


class SentimentGraph(namedtuple('SentimentGraph', ['sentence', 'opinions'])):
    """All opinions annotated on a sentence. May be empty."""
    __slots__ = ()

    def __new__(cls, sentence, opinions=()):
        opinions = tuple(opinions)
        for opinion in opinions:
            for role in ROLES:
                span = opinion.span(role)
                if span is not None:
                    span.check_bounds(sentence.n)
        return super(SentimentGraph, cls).__new__(cls, sentence, opinions)

    @property
    def sent_id(self):
        return self.sentence.sent_id

    def canonical(self):
        """Same graph with opinions in a canonical order."""
        return SentimentGraph(
            self.sentence, sorted(self.opinions, key=Opinion.sort_key))


###############################
# Dependency graphs
###############################
def atomic_labels(arc):
    """
    Split a (possibly collapsed) arc label into its atomic labels.

    :param arc:
        An :class:`Arc` or a label string.

    :return:
        The list of atomic labels, in order.

    :exception LabelFormatError:
        If the label is empty, has an empty ``#`` segment or an unknown
        atomic label.
    """
    label = arc.label if isinstance(arc, Arc) else arc
    if not label:
        raise LabelFormatError("Empty arc label")
    atoms = label.split(LABEL_SEPARATOR)
    for atom in atoms:
        if not atom:
            raise LabelFormatError("Empty segment in label %r" % label)
        if atom not in ATOMIC_LABELS:
            raise LabelFormatError(
                "Unknown atomic label %r in %r" % (atom, label))
    return atoms


def join_labels(atoms):
    """Collapse atomic labels into one label. Inverse of :func:`atomic_labels`."""
    return LABEL_SEPARATOR.join(atoms)


class Arc(namedtuple('Arc', ['head', 'dependent', 'label'])):
    """
    A labeled arc ``head -> dependent``. ``head`` 0 is the root.
    """
    __slots__ = ()

    def __new__(cls, head, dependent, label):
        if head < 0 or dependent < 1:
            raise SentiParseError(
                "Invalid arc %d -> %d" % (head, dependent))
        if head == dependent:
            raise SentiParseError("Self-loop on token %d" % head)
        atomic_labels(label)
        return super(Arc, cls).__new__(cls, head, dependent, label)

    @property
    def key(self):
        return self.head, self.dependent

    @property
    def atoms(self):
        return atomic_labels(self.label)

    @property
    def multiplicity(self):
        return len(self.atoms)


class DependencyGraph(object):
    """
    The arcs built over a sentence, at most one :class:`Arc` per
    ``(head, dependent)`` pair.

    :param sentence: The :class:`Sentence` the arcs are built over.
    :param arcs: Iterable of :class:`Arc`.

    :exception SentiParseError:
        On a duplicate pair or an arc outside the sentence.
    """

    def __init__(self, sentence, arcs=()):
        self._sentence = sentence
        by_pair = {}
        for arc in arcs:
            if arc.head > sentence.n or arc.dependent > sentence.n:
                raise SentiParseError(
                    "Sentence %s: arc %d -> %d outside sentence of length %d"
                    % (sentence.sent_id, arc.head, arc.dependent, sentence.n))
            if arc.key in by_pair:
                raise SentiParseError(
                    "Sentence %s: duplicate arc %d -> %d"
                    % (sentence.sent_id, arc.head, arc.dependent))
            by_pair[arc.key] = arc
        self._arcs = {key: by_pair[key] for key in sorted(by_pair)}

    def __repr__(self):
        return "DependencyGraph(%s, %d arcs)" % (
            self._sentence.sent_id, len(self._arcs))

    def __eq__(self, other):
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return (self._sentence == other._sentence
                and self._arcs == other._arcs)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash((self._sentence, tuple(self._arcs.values())))

    def __len__(self):
        return len(self._arcs)

    def __iter__(self):
        return iter(self._arcs.values())

    def __contains__(self, key):
        return key in self._arcs

    @property
    def sentence(self):
        return self._sentence

    @property
    def sent_id(self):
        return self._sentence.sent_id

    @property
    def arcs(self):
        """All arcs, sorted by ``(head, dependent)``."""
        return tuple(self._arcs.values())

    def arc(self, head, dependent):
        """Return the arc ``head -> dependent`` or :const:`None`."""
        return self._arcs.get((head, dependent))

    def heads_of(self, dependent):
        """Heads of ``dependent`` in increasing order."""
        return sorted(h for (h, d) in self._arcs if d == dependent)

    def arcs_from(self, head):
        return [arc for arc in self._arcs.values() if arc.head == head]

    def root_multiplicity(self):
        """Sum of multiplicities of the arcs out of the root."""
        return sum(arc.multiplicity for arc in self.arcs_from(0))

    def check_root_labels(self):
        """
        Check that every arc out of the root carries only ``exp:*`` atoms.

        :exception MalformedGraphError:
            On the first offending arc.
        """
        for arc in self.arcs_from(0):
            for atom in arc.atoms:
                if atom not in EXPRESSION_LABELS:
                    raise MalformedGraphError(
                        "Sentence %s: root arc 0 -> %d labeled %r"
                        % (self.sent_id, arc.dependent, arc.label))


def label_vocabulary(corpus):
    """
    The label set of a corpus of dependency graphs, sorted
    lexicographically. Collapsed labels are distinct entries.

    :param corpus: Iterable of :class:`DependencyGraph`.
    :return: A sorted list of label strings.
    """
    labels = set()
    for graph in corpus:
        labels.update(arc.label for arc in graph)
    return sorted(labels)
