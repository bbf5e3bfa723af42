"""
Conversion between sentiment graphs and bi-lexical dependency graphs.

Each node span (holder, target, expression) is lexicalized by choosing
one head token and attaching the remaining span tokens to it. Three
strategies pick the head: the first token of the span (head-first), the
last token (head-final) or the token whose syntactic head lies outside
the span (syntax-based). Expression heads hang from the artificial root
with an ``exp:<polarity>`` label, and holder/target heads hang from
their expression head.

Arcs that coincide on ``(head, dependent)`` across opinions are
collapsed into a single arc whose label is the ``#``-join of the
atomic labels, sorted so the collapsed label does not depend on the
order of the opinions.
"""

import enum
import logging
from collections import OrderedDict

from .core import (Arc, DependencyGraph, EXPRESSION_LABELS, HOLDER, Opinion,
                   Polarity, SentimentGraph, Span, TARGET, join_labels)
from .errors import ConfigurationError, MalformedGraphError

logger = logging.getLogger(__name__)

ARGUMENT_ROLES = (HOLDER, TARGET)


class EncodingStrategy(enum.Enum):
    """How the head token of a node span is chosen."""
    HEAD_FIRST = 'head-first'
    HEAD_FINAL = 'head-final'
    SYNTAX = 'syntax'

    @classmethod
    def parse(cls, name):
        """Accept the command-line spelling of a strategy."""
        if isinstance(name, cls):
            return name
        for strategy in cls:
            if strategy.value == name:
                return strategy
        raise ConfigurationError(
            "Unknown encoding strategy %r, choose from %s"
            % (name, ', '.join(s.value for s in cls)))


def node_head(span, strategy, sentence):
    """
    Choose the head token of a node span.

    :param span: The :class:`Span` to lexicalize.
    :param strategy: An :class:`EncodingStrategy`.
    :param sentence: The :class:`Sentence` the span belongs to.

    :return: A token index in the span.

    :exception ConfigurationError:
        Syntax-based strategy on tokens without syntactic heads.
    """
    if strategy is EncodingStrategy.HEAD_FIRST:
        return span.first
    if strategy is EncodingStrategy.HEAD_FINAL:
        return span.last

    members = span.as_set()
    candidates = []
    for index in span.token_indices:
        syn_head = sentence.token(index).syn_head
        if syn_head is None:
            raise ConfigurationError(
                "Sentence %s: token %d has no syntactic head, required for "
                "the syntax encoding" % (sentence.sent_id, index))
        if syn_head not in members:
            candidates.append(index)
    if candidates:
        return candidates[0]
    # Cycle inside the span: no token points outside of it.
    return span.first


def encode(graph, strategy):
    """
    Encode a :class:`SentimentGraph` as a :class:`DependencyGraph`.

    :param graph: The sentiment graph.
    :param strategy: An :class:`EncodingStrategy` (or its name).
    :return: The encoded dependency graph.

    :exception ConfigurationError:
        Syntax-based strategy on a sentence without syntactic heads.
    """
    strategy = EncodingStrategy.parse(strategy)
    sentence = graph.sentence
    if strategy is EncodingStrategy.SYNTAX and not sentence.has_syntax:
        raise ConfigurationError(
            "Sentence %s lacks syntactic heads, required for the syntax "
            "encoding" % sentence.sent_id)

    atoms = OrderedDict()

    def add(head, dependent, label):
        if head == dependent:
            logger.warning("Sentence %s: dropped %s self-loop on token %d",
                           sentence.sent_id, label, head)
            return
        atoms.setdefault((head, dependent), []).append(label)

    def add_node(span, label):
        head = node_head(span, strategy, sentence)
        for index in span.token_indices:
            if index != head:
                add(head, index, label)
        return head

    for opinion in graph.opinions:
        polarity_label = opinion.polarity.label
        expression_head = add_node(opinion.expression, polarity_label)
        add(0, expression_head, polarity_label)
        for role in ARGUMENT_ROLES:
            span = opinion.span(role)
            if span is None:
                continue
            argument_head = add_node(span, role)
            add(expression_head, argument_head, role)

    arcs = [Arc(head, dependent, join_labels(sorted(labels)))
            for (head, dependent), labels in atoms.items()]
    return DependencyGraph(sentence, arcs)


def decode(graph, warnings=None):
    """
    Recover a :class:`SentimentGraph` from a :class:`DependencyGraph`.

    Every ``exp:<p>`` atom on a root arc ``0 -> e`` starts an opinion
    with expression head ``e`` and polarity ``p``. The expression span
    is ``e`` plus the dependents of ``e`` through ``exp:<p>`` atoms.
    Holder and target atoms out of ``e`` point at argument heads, whose
    span is the head plus its dependents through the same role atom.
    When an expression has several holders (or targets), one opinion is
    recovered per combination.

    :param graph: The dependency graph.

    :param warnings:
        Optional list. Recovery warnings (dropped dangling arcs,
        ambiguous expression heads) are appended to it and logged.

    :return: The recovered graph, opinions in canonical order.

    :exception MalformedGraphError:
        A root arc carries a holder or target atom.
    """
    if warnings is None:
        warnings = []
    sentence = graph.sentence

    def warn(message, *args):
        text = ("Sentence %s: " % sentence.sent_id) + (message % args)
        warnings.append(text)
        logger.warning(text)

    graph.check_root_labels()

    # (head, atomic label) -> dependents, one entry per atom occurrence
    out_arcs = {}
    for arc in graph:
        for atom in arc.atoms:
            out_arcs.setdefault((arc.head, atom), []).append(arc.dependent)

    seeds = OrderedDict()
    for arc in graph.arcs_from(0):
        for atom in arc.atoms:
            if atom not in EXPRESSION_LABELS:
                raise MalformedGraphError(
                    "Sentence %s: root arc labeled %r"
                    % (sentence.sent_id, arc.label))
            seeds[(arc.dependent, Polarity.from_label(atom))] = True

    expression_heads = {}
    for head, polarity in seeds:
        expression_heads.setdefault(head, []).append(polarity)
    for head, polarities in expression_heads.items():
        if len(polarities) > 1:
            warn("expression head %d carries %d polarities", head,
                 len(polarities))

    argument_heads = {role: set() for role in ARGUMENT_ROLES}
    for head in expression_heads:
        for role in ARGUMENT_ROLES:
            argument_heads[role].update(out_arcs.get((head, role), []))

    # Arcs nothing above can account for are dropped.
    for arc in graph:
        if arc.head == 0:
            continue
        for atom in arc.atoms:
            if arc.head in expression_heads:
                if atom in ARGUMENT_ROLES:
                    continue
                if any(p.label == atom for p in expression_heads[arc.head]):
                    continue
            if atom in ARGUMENT_ROLES and arc.head in argument_heads[atom]:
                continue
            warn("dropped dangling arc %d -> %d labeled %s",
                 arc.head, arc.dependent, atom)

    opinions = []
    for head, polarity in seeds:
        expression = Span(
            [head] + out_arcs.get((head, polarity.label), []))
        arguments = {}
        for role in ARGUMENT_ROLES:
            spans = []
            for argument_head in sorted(set(out_arcs.get((head, role), []))):
                span = Span([argument_head]
                            + out_arcs.get((argument_head, role), []))
                if span not in spans:
                    spans.append(span)
            arguments[role] = spans or [None]
        for holder in arguments[HOLDER]:
            for target in arguments[TARGET]:
                opinion = Opinion(holder, target, expression, polarity)
                if opinion not in opinions:
                    opinions.append(opinion)

    return SentimentGraph(sentence, opinions).canonical()
