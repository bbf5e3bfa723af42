"""
Evaluation of predicted sentiment graphs and dependency graphs.

- Span F1 per role: token-level overlap of holder, target or expression
  tokens, micro-averaged over the corpus.
- Targeted F1: exact match of (target span, polarity) pairs.
- UF1 / LF1: dependency arcs with and without their atomic labels.
- NSF1 / SF1: opinion tuples matched one-to-one, each match weighted by
  the mean token overlap of its three components. SF1 additionally
  requires equal polarity.

Gold and predicted corpora are aligned by ``sent_id``. All metrics are
invariant to the order of sentences and of opinions.
"""

import json
from collections import Counter, OrderedDict, namedtuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import EXPRESSION, HOLDER, ROLES, TARGET
from .errors import AlignmentError
from .workers import map_sentences


class Score(namedtuple('Score', ['precision', 'recall', 'f1'])):
    """Precision, recall and F1, all in ``[0, 1]``."""
    __slots__ = ()

    @classmethod
    def from_counts(cls, true_positives, n_pred, n_gold):
        precision = true_positives / float(n_pred) if n_pred else 0.0
        recall = true_positives / float(n_gold) if n_gold else 0.0
        return cls(precision, recall, f1(precision, recall))


def f1(precision, recall):
    """Harmonic mean, 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def align(gold, pred):
    """
    Pair gold and predicted items by ``sent_id``.

    :param gold: List of graphs (anything with a ``sent_id``).
    :param pred: List of graphs, same sentences in any order.
    :return: List of ``(gold, pred)`` pairs in gold order.

    :exception AlignmentError:
        If the corpora do not contain exactly the same sentence ids.
    """
    by_id = OrderedDict()
    for item in pred:
        if item.sent_id in by_id:
            raise AlignmentError("Duplicate predicted sentence %s"
                                 % item.sent_id)
        by_id[item.sent_id] = item
    gold_ids = [item.sent_id for item in gold]
    if len(set(gold_ids)) != len(gold_ids):
        raise AlignmentError("Duplicate gold sentence ids")
    missing = set(gold_ids) - set(by_id)
    extra = set(by_id) - set(gold_ids)
    if missing or extra:
        raise AlignmentError(
            "Gold and predicted sentences differ: %d missing, %d extra "
            "(e.g. %s)" % (len(missing), len(extra),
                           sorted(missing | extra)[0]))
    return [(item, by_id[item.sent_id]) for item in gold]


def _role_tokens(graph, role):
    tokens = set()
    for opinion in graph.opinions:
        span = opinion.span(role)
        if span is not None:
            tokens.update(span.token_indices)
    return tokens


def _reduce(counts):
    """Sum ``(true_positives, n_pred, n_gold)`` rows into a :class:`Score`."""
    true_positives = n_pred = n_gold = 0
    for tp, pred_count, gold_count in counts:
        true_positives += tp
        n_pred += pred_count
        n_gold += gold_count
    return Score.from_counts(true_positives, n_pred, n_gold)


def span_counts(gold_graph, pred_graph, role):
    gold_tokens = _role_tokens(gold_graph, role)
    pred_tokens = _role_tokens(pred_graph, role)
    return (len(gold_tokens & pred_tokens), len(pred_tokens),
            len(gold_tokens))


def span_f1(gold, pred, role):
    """
    Token-level span score for one role.

    :param gold: List of gold :class:`SentimentGraph`.
    :param pred: List of predicted :class:`SentimentGraph`.
    :param role: ``'holder'``, ``'target'`` or ``'expression'``.
    :return: A :class:`Score`.
    """
    if role not in ROLES:
        raise ValueError("Unknown role %r" % role)
    return _reduce(span_counts(g, p, role) for g, p in align(gold, pred))


def _target_pairs(graph):
    return Counter((opinion.target.as_set(), opinion.polarity)
                   for opinion in graph.opinions
                   if opinion.target is not None)


def targeted_counts(gold_graph, pred_graph):
    gold_pairs = _target_pairs(gold_graph)
    pred_pairs = _target_pairs(pred_graph)
    return (sum((gold_pairs & pred_pairs).values()),
            sum(pred_pairs.values()), sum(gold_pairs.values()))


def targeted_score(gold, pred):
    """Targeted precision, recall and F1 as a :class:`Score`."""
    return _reduce(targeted_counts(g, p) for g, p in align(gold, pred))


def targeted_f1(gold, pred):
    """
    Exact (target span, polarity) matching, each gold pair matched at
    most once.
    """
    return targeted_score(gold, pred).f1


def dependency_counts(gold_graph, pred_graph, labeled):
    if labeled:
        gold_arcs = Counter((a.head, a.dependent, atom)
                            for a in gold_graph for atom in a.atoms)
        pred_arcs = Counter((a.head, a.dependent, atom)
                            for a in pred_graph for atom in a.atoms)
    else:
        gold_arcs = Counter(a.key for a in gold_graph)
        pred_arcs = Counter(a.key for a in pred_graph)
    return (sum((gold_arcs & pred_arcs).values()),
            sum(pred_arcs.values()), sum(gold_arcs.values()))


def dependency_score(gold, pred, labeled):
    """UF1 (``labeled=False``) or LF1 details as a :class:`Score`."""
    return _reduce(dependency_counts(g, p, labeled)
                   for g, p in align(gold, pred))


def dependency_f1(gold, pred, labeled):
    """
    Arc F1 over :class:`DependencyGraph` lists. Labeled matching expands
    collapsed labels into atomic label multisets.
    """
    return dependency_score(gold, pred, labeled).f1


def component_overlap(gold_span, pred_span):
    """
    Overlap of one opinion component: Jaccard of the token sets, 1 when
    both are empty and 0 when only one is.
    """
    if gold_span is None and pred_span is None:
        return 1.0
    if gold_span is None or pred_span is None:
        return 0.0
    gold_tokens = gold_span.as_set()
    pred_tokens = pred_span.as_set()
    return len(gold_tokens & pred_tokens) / float(len(gold_tokens | pred_tokens))


def tuple_weight(gold_opinion, pred_opinion, include_polarity):
    """
    Match weight of a predicted opinion against a gold one, or
    :const:`None` when they cannot be matched.
    """
    if include_polarity and gold_opinion.polarity != pred_opinion.polarity:
        return None
    overlaps = []
    for role in (HOLDER, TARGET, EXPRESSION):
        gold_span = gold_opinion.span(role)
        pred_span = pred_opinion.span(role)
        overlap = component_overlap(gold_span, pred_span)
        if gold_span is not None and overlap == 0.0:
            return None
        overlaps.append(overlap)
    return sum(overlaps) / len(overlaps)


OPTIMAL = 'optimal'
GREEDY = 'greedy'
MATCHING_POLICIES = (GREEDY, OPTIMAL)


def greedy_assignment(weights, tie_keys=None):
    """
    One-to-one assignment taking the heaviest remaining pair first.

    :param weights: 2-d array, zero for pairs that cannot match.

    :param tie_keys:
        Optional function of ``(row, col)`` ordering pairs of equal
        weight. Ties otherwise go to the lower (row, column) position.

    :return: ``(rows, cols)`` index arrays.
    """
    pairs = [(row, col) for row in range(weights.shape[0])
             for col in range(weights.shape[1]) if weights[row, col] > 0]
    if tie_keys is None:
        pairs.sort(key=lambda pair: -weights[pair])
    else:
        pairs.sort(key=lambda pair: (-weights[pair], tie_keys(*pair), pair))
    rows, cols = [], []
    for row, col in pairs:
        if row in rows or col in cols:
            continue
        rows.append(row)
        cols.append(col)
    return np.array(rows, dtype=int), np.array(cols, dtype=int)


def matched_weight(gold_opinions, pred_opinions, include_polarity,
                   matching=GREEDY):
    """
    Total weight of a one-to-one matching of the opinions of one
    sentence.

    :param matching:
        ``'greedy'`` takes pairs by descending weight, equal weights
        ordered by the two opinions' sort keys, so swapping gold and
        prediction picks the same pairs. ``'optimal'`` maximizes the
        total weight exactly; only it guarantees SF1 <= NSF1.
    """
    if matching not in MATCHING_POLICIES:
        raise ValueError("Unknown matching policy %r" % matching)
    if not gold_opinions or not pred_opinions:
        return 0.0
    weights = np.zeros((len(pred_opinions), len(gold_opinions)))
    for p, pred_opinion in enumerate(pred_opinions):
        for g, gold_opinion in enumerate(gold_opinions):
            weight = tuple_weight(gold_opinion, pred_opinion,
                                  include_polarity)
            if weight is not None:
                weights[p, g] = weight
    if matching == GREEDY:
        def tie_keys(p, g):
            return tuple(sorted([pred_opinions[p].sort_key(),
                                 gold_opinions[g].sort_key()]))
        rows, cols = greedy_assignment(weights, tie_keys)
    else:
        rows, cols = linear_sum_assignment(weights, maximize=True)
    # sorted sum: independent of opinion order
    return float(sum(sorted(weights[rows, cols])))


def sentiment_graph_counts(gold_graph, pred_graph, include_polarity,
                           matching=GREEDY):
    gold_opinions = gold_graph.canonical().opinions
    pred_opinions = pred_graph.canonical().opinions
    return (matched_weight(gold_opinions, pred_opinions, include_polarity,
                           matching),
            len(pred_opinions), len(gold_opinions))


def sentiment_graph_score(gold, pred, include_polarity, matching=GREEDY):
    """SF1 / NSF1 details as a :class:`Score`."""
    return _reduce(sentiment_graph_counts(g, p, include_polarity, matching)
                   for g, p in align(gold, pred))


def sentiment_graph_f1(gold, pred, include_polarity, matching=GREEDY):
    """
    Sentiment graph F1: SF1 when ``include_polarity`` is true, NSF1
    otherwise. Opinions are matched one-to-one, greedily by descending
    match weight unless ``matching`` is ``'optimal'``.
    """
    return sentiment_graph_score(gold, pred, include_polarity, matching).f1


class ScoreReport(object):
    """
    The full metric suite for a prediction run.

    :param spans: Dict role -> :class:`Score`.
    :param targeted: Targeted :class:`Score`.
    :param nsf: Non-polar sentiment graph :class:`Score`.
    :param sf: Sentiment graph :class:`Score`.
    :param uf: Unlabeled dependency :class:`Score` or :const:`None`.
    :param lf: Labeled dependency :class:`Score` or :const:`None`.
    """

    def __init__(self, spans, targeted, nsf, sf, uf=None, lf=None):
        self.spans = spans
        self.targeted = targeted
        self.nsf = nsf
        self.sf = sf
        self.uf = uf
        self.lf = lf

    @property
    def targeted_f1(self):
        return self.targeted.f1

    @property
    def nsf1(self):
        return self.nsf.f1

    @property
    def sf1(self):
        return self.sf.f1

    @property
    def uf1(self):
        return self.uf.f1 if self.uf is not None else None

    @property
    def lf1(self):
        return self.lf.f1 if self.lf is not None else None

    def as_dict(self):
        """Flat ``name -> value`` mapping, in a fixed order."""
        values = OrderedDict()
        for role in (HOLDER, TARGET, EXPRESSION):
            score = self.spans[role]
            values[role + '_precision'] = score.precision
            values[role + '_recall'] = score.recall
            values[role + '_f1'] = score.f1
        values['targeted_f1'] = self.targeted_f1
        if self.uf is not None:
            values['uf1'] = self.uf1
        if self.lf is not None:
            values['lf1'] = self.lf1
        values['nsf1'] = self.nsf1
        values['sf1'] = self.sf1
        return values

    def to_text(self):
        """``key: value`` lines, four decimals."""
        return ''.join("%s: %.4f\n" % (key, value)
                       for key, value in self.as_dict().items())

    def write_json(self, path):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.as_dict(), f, indent=2)
            f.write('\n')


def _sentence_counts(pair, matching):
    gold_graph, pred_graph = pair
    rows = [span_counts(gold_graph, pred_graph, role)
            for role in (HOLDER, TARGET, EXPRESSION)]
    rows.append(targeted_counts(gold_graph, pred_graph))
    rows.append(sentiment_graph_counts(gold_graph, pred_graph, False,
                                       matching))
    rows.append(sentiment_graph_counts(gold_graph, pred_graph, True,
                                       matching))
    return rows


def _arc_counts(pair):
    return [dependency_counts(pair[0], pair[1], False),
            dependency_counts(pair[0], pair[1], True)]


def score(gold, pred, gold_dep=None, pred_dep=None, matching=GREEDY,
          jobs=1, handlers=()):
    """
    Compute the whole suite. Every sentence pair is counted on its own,
    on ``jobs`` workers, and the counts are summed in gold order, so the
    result does not depend on ``jobs``.

    :param gold: Gold :class:`SentimentGraph` list.
    :param pred: Predicted :class:`SentimentGraph` list.
    :param gold_dep: Optional gold :class:`DependencyGraph` list.
    :param pred_dep: Optional predicted :class:`DependencyGraph` list.
    :param matching: Opinion matching policy for NSF1 / SF1.
    :param jobs: Number of worker threads.
    :param handlers: Log handlers for the workers.
    :return: A :class:`ScoreReport`.
    """
    if matching not in MATCHING_POLICIES:
        raise ValueError("Unknown matching policy %r" % matching)
    rows = map_sentences(lambda pair: _sentence_counts(pair, matching),
                         align(gold, pred), jobs, handlers)
    columns = [_reduce(column) for column in zip(*rows)] \
        if rows else [Score(0.0, 0.0, 0.0)] * 6
    spans = OrderedDict(zip((HOLDER, TARGET, EXPRESSION), columns[:3]))

    uf = lf = None
    if gold_dep is not None and pred_dep is not None:
        arc_rows = map_sentences(_arc_counts, align(gold_dep, pred_dep),
                                 jobs, handlers)
        uf, lf = [_reduce(column) for column in zip(*arc_rows)] \
            if arc_rows else [Score(0.0, 0.0, 0.0)] * 2
    return ScoreReport(spans, columns[3], columns[4], columns[5], uf, lf)


###############################
# Several runs
###############################
class RunSummary(object):
    """
    Mean and standard deviation of every metric over several runs, for
    example the same model trained with different seeds.

    :param reports: Non-empty list of :class:`ScoreReport`.
    """

    def __init__(self, reports):
        if not reports:
            raise ValueError("No score reports to aggregate")
        keys = list(reports[0].as_dict())
        if any(list(r.as_dict()) != keys for r in reports):
            raise ValueError("Score reports have different metrics")
        table = np.array([list(r.as_dict().values()) for r in reports],
                         dtype=np.float64)
        self.runs = len(reports)
        # population deviation, 0 for a single run
        self.mean = OrderedDict(zip(keys, table.mean(axis=0).tolist()))
        self.std = OrderedDict(zip(keys, table.std(axis=0).tolist()))

    def to_text(self):
        lines = ["runs: %d\n" % self.runs]
        lines.extend("%s: %.4f +- %.4f\n" % (key, value, self.std[key])
                     for key, value in self.mean.items())
        return ''.join(lines)

    def write_json(self, path):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(OrderedDict([('runs', self.runs), ('mean', self.mean),
                                   ('std', self.std)]), f, indent=2)
            f.write('\n')


def aggregate_reports(reports):
    """:return: A :class:`RunSummary` of ``reports``."""
    return RunSummary(reports)
