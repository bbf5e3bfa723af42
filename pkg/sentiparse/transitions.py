"""
The left-to-right transition system used by the parser.

A state ``<i, j, Sigma>`` points at the focus word ``i``, remembers the
last head ``j`` assigned to it (-1 when none since the last Move), and
holds the arcs built so far. Two actions exist:

- ``ATTACH k`` adds the arc ``k -> i``. It is legal when ``k`` is a
  position in ``[0, n]`` other than ``i``, the arc does not exist yet
  and ``k`` lies to the right of ``j``.
- ``MOVE`` advances the focus word and resets ``j``. It is legal while
  ``i <= n``.

Parsing starts at ``<1, -1, {}>`` and ends at ``<n+1, -1, Sigma>``.
The static oracle attaches each word to its heads in increasing order
and then moves on, so a graph with ``A`` arcs over ``n`` words needs
exactly ``n + A`` actions.
"""

from collections import OrderedDict, namedtuple

from recordclass import recordclass

from .core import Arc, DependencyGraph
from .errors import ParseFormatError, ReplayError, TransitionError
from .workers import map_sentences

MOVE = 'MOVE'
ATTACH = 'ATTACH'


class StateConfig(namedtuple('StateConfig', ['i', 'j', 'sigma'])):
    """
    An immutable parser state.

    :param i:  Focus word index in ``[1, n+1]``
    :param j:  Last head assigned to the focus word, -1 for none
    :param sigma:  Frozen set of ``(head, dependent)`` pairs built so far
    """
    __slots__ = ()

    @classmethod
    def initial(cls):
        return cls(1, -1, frozenset())

    def is_final(self, n):
        return self.i == n + 1


class Action(namedtuple('Action', ['kind', 'k', 'label'])):
    """
    A transition. ``k`` and ``label`` are :const:`None` for a Move.
    """
    __slots__ = ()

    @classmethod
    def move(cls):
        return cls(MOVE, None, None)

    @classmethod
    def attach(cls, k, label=None):
        return cls(ATTACH, k, label)

    @property
    def is_move(self):
        return self.kind == MOVE

    def to_text(self):
        if self.is_move:
            return MOVE
        if self.label is None:
            return "%s %d" % (ATTACH, self.k)
        return "%s %d %s" % (ATTACH, self.k, self.label)

    @classmethod
    def from_text(cls, line):
        fields = line.split()
        if fields == [MOVE]:
            return cls.move()
        if len(fields) in (2, 3) and fields[0] == ATTACH:
            label = fields[2] if len(fields) == 3 else None
            return cls.attach(int(fields[1]), label)
        raise ValueError("Not an action: %r" % line)


def violation(state, action, n=None):
    """
    Describe why ``action`` is illegal in ``state``.

    :param n:
        Sentence length. When :const:`None`, the checks that need it
        are skipped.

    :return: A message, or :const:`None` if the action is legal.
    """
    i, j, sigma = state
    if action.is_move:
        if n is not None and i > n:
            return "Move past the end of the sentence (i=%d, n=%d)" % (i, n)
        return None
    k = action.k
    if k is None or k < 0 or (n is not None and k > n):
        return "Attach-to position %r outside [0, n]" % (k,)
    if n is not None and i > n:
        return "Attach-to after the last word (i=%d, n=%d)" % (i, n)
    if k == i:
        return "Attach-to the focus word itself (k=i=%d)" % i
    if (k, i) in sigma:
        return "Arc %d -> %d already built" % (k, i)
    if not j < k:
        return "Head %d not to the right of the last head %d" % (k, j)
    return None


def legal(state, action, n):
    """Whether ``action`` may be applied in ``state`` for a sentence of length ``n``."""
    return violation(state, action, n) is None


def apply(state, action, n=None):
    """
    Apply a legal action.

    :return: The successor :class:`StateConfig`.

    :exception TransitionError:
        If the action is illegal; carries the violated precondition.
    """
    reason = violation(state, action, n)
    if reason is not None:
        raise TransitionError(reason, state, action)
    if action.is_move:
        return StateConfig(state.i + 1, -1, state.sigma)
    return StateConfig(state.i, action.k,
                       state.sigma | {(action.k, state.i)})


class TransitionSequence(object):
    """
    An ordered list of actions, optionally with the trace of states it
    induces (one more state than actions).
    """

    def __init__(self, actions, trace=None):
        self.actions = list(actions)
        self.trace = list(trace) if trace is not None else None
        if self.trace is not None and len(self.trace) != len(self.actions) + 1:
            raise ValueError("A trace needs exactly one state per action "
                             "plus the initial state")

    def __len__(self):
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def __eq__(self, other):
        if not isinstance(other, TransitionSequence):
            return NotImplemented
        return self.actions == other.actions

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __repr__(self):
        return "TransitionSequence(%d actions)" % len(self.actions)

    @property
    def attach_count(self):
        return sum(1 for a in self.actions if not a.is_move)

    def to_text(self):
        """One action per line: ``MOVE`` or ``ATTACH <k> <label>``."""
        return ''.join(a.to_text() + '\n' for a in self.actions)

    @classmethod
    def from_text(cls, text):
        actions = []
        for number, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                actions.append(Action.from_text(line))
            except ValueError as e:
                raise ParseFormatError(number, str(e))
        return cls(actions)


def oracle(graph):
    """
    Static oracle: the gold transition sequence for a dependency graph.

    For each focus word, attach it to every one of its heads in
    increasing order (carrying the collapsed label), then Move.

    :param graph: A :class:`DependencyGraph`.
    :return: A :class:`TransitionSequence` with its trace.
    """
    n = graph.sentence.n
    state = StateConfig.initial()
    actions = []
    trace = [state]
    for i in range(1, n + 1):
        for k in graph.heads_of(i):
            action = Action.attach(k, graph.arc(k, i).label)
            state = apply(state, action, n)
            actions.append(action)
            trace.append(state)
        action = Action.move()
        state = apply(state, action, n)
        actions.append(action)
        trace.append(state)
    return TransitionSequence(actions, trace)


def replay(n, seq):
    """
    Replay actions from the initial state.

    :param n: Sentence length.
    :param seq: A :class:`TransitionSequence` or a list of :class:`Action`.

    :return:
        An ordered dict ``(head, dependent) -> label`` of the arcs built,
        in creation order. Labels are :const:`None` for unlabeled
        actions.

    :exception ReplayError:
        On the first illegal action, with its 1-based step and state.
    """
    trace = getattr(seq, 'trace', None)
    state = StateConfig.initial()
    arcs = OrderedDict()
    for step, action in enumerate(seq, 1):
        try:
            state = apply(state, action, n)
        except TransitionError as e:
            raise ReplayError(step, e.reason, state, action)
        if trace is not None and trace[step] != state:
            raise ReplayError(step, "state differs from the trace", state,
                              action)
        if not action.is_move:
            arcs[(action.k, state.i)] = action.label
    return arcs


def replay_graph(sentence, seq):
    """
    Replay a labeled sequence into a :class:`DependencyGraph` over
    ``sentence``.
    """
    arcs = replay(sentence.n, seq)
    return DependencyGraph(
        sentence, [Arc(h, d, label) for (h, d), label in arcs.items()])


###############################
# Statistics
###############################
class SentenceStats(recordclass('SentenceStats',
                                ['sent_id', 'n', 'actions', 'arcs'])):
    """
    Transition counts for one sentence.

    :param sent_id:  Sentence identifier
    :param n:  Number of tokens
    :param actions:  Oracle sequence length, ``n + arcs``
    :param arcs:  Number of arc objects (collapsed arcs count once)
    """


class TransitionStats(object):
    """
    Corpus-level transition statistics: per-sentence rows plus totals.
    """

    def __init__(self, rows):
        self.rows = list(rows)
        self.tokens = sum(r.n for r in self.rows)
        self.arcs = sum(r.arcs for r in self.rows)
        self.actions = sum(r.actions for r in self.rows)

    @property
    def pairs(self):
        """The ``(n, |A|)`` pair of every sentence."""
        return [(r.n, r.actions) for r in self.rows]

    @property
    def arcs_per_token(self):
        return self.arcs / float(self.tokens) if self.tokens else 0.0

    @property
    def max_actions_per_token(self):
        ratios = [r.actions / float(r.n) for r in self.rows if r.n]
        return max(ratios) if ratios else 0.0

    @property
    def over_linear_bound(self):
        """Sentences needing more than ``2n`` actions."""
        return [r for r in self.rows if r.actions > 2 * r.n]

    def summary(self):
        return OrderedDict([
            ('sentences', len(self.rows)),
            ('tokens', self.tokens),
            ('arcs', self.arcs),
            ('transitions', self.actions),
            ('arcs_per_token', round(self.arcs_per_token, 4)),
            ('max_transitions_per_token',
             round(self.max_actions_per_token, 4)),
            ('sentences_over_2n', len(self.over_linear_bound)),
        ])

    def csv_header(self):
        return 'sent_id,n,transitions,arcs'

    def csv_lines(self):
        return ["%s,%d,%d,%d" % (r.sent_id, r.n, r.actions, r.arcs)
                for r in self.rows]


def sentence_stats(graph):
    """Oracle transition counts for one :class:`DependencyGraph`."""
    sequence = oracle(graph)
    return SentenceStats(graph.sent_id, graph.sentence.n, len(sequence),
                         sequence.attach_count)


def transition_stats(corpus, jobs=1, handlers=()):
    """
    Count oracle transitions for every graph of a corpus.

    :param corpus: Iterable of :class:`DependencyGraph`.
    :param jobs: Number of worker threads.
    :param handlers: Log handlers for the workers.
    :return: A :class:`TransitionStats`, rows in corpus order.
    """
    return TransitionStats(map_sentences(sentence_stats, corpus, jobs,
                                         handlers))
