"""
Shared fixtures: the running example sentence with its two opinions, and
a generator of random sentiment graphs that encode unambiguously.
"""

import os
import random

import pytest

from sentiparse.core import (Opinion, Polarity, Sentence, SentimentGraph,
                             Span, Token)

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')

EXAMPLE_TEXT = ("Some classmates said that all the instructors were too "
                "demanding , but really friendly")


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long-running acceptance tests')


def example_sentence():
    return Sentence.from_forms('ex1', EXAMPLE_TEXT.split(),
                               text=EXAMPLE_TEXT)


def example_graph():
    sentence = example_sentence()
    holder = Span([1, 2])
    target = Span([5, 6, 7])
    return SentimentGraph(sentence, [
        Opinion(holder, target, Span([9, 10]), Polarity.NEGATIVE),
        Opinion(holder, target, Span([13, 14]), Polarity.POSITIVE),
    ])


@pytest.fixture
def sentence():
    return example_sentence()


@pytest.fixture
def graph():
    return example_graph()


@pytest.fixture
def data_dir():
    return DATA_DIR


###############################
# Random graphs
###############################
WORDS = ['w%d' % i for i in range(200)]


def random_sentence(rng, n, sent_id='s', syntax=False):
    forms = [rng.choice(WORDS) for _ in range(n)]
    heads = None
    if syntax:
        # a random tree: every token points to an earlier token or the root
        heads = [rng.randrange(0, i) if i > 1 else 0 for i in range(1, n + 1)]
    return Sentence.from_forms(sent_id, forms, syn_heads=heads)


def _random_span(rng, free, max_size=3):
    """Draw a span of up to ``max_size`` tokens from ``free`` (and remove them)."""
    if not free:
        return None
    size = rng.randint(1, min(max_size, len(free)))
    start = rng.randrange(len(free))
    chosen = sorted(free)[start:start + size]
    for index in chosen:
        free.discard(index)
    return Span(chosen)


def random_graph(rng, n=None, max_opinions=3, sent_id='s', singletons=False,
                 syntax=False):
    """
    A random sentiment graph outside the ambiguous cases: the spans of
    different nodes are disjoint, expressions are all distinct, and a
    holder or target span is only shared by being reused as a whole.
    """
    if n is None:
        n = rng.randint(1, 15)
    sentence = random_sentence(rng, n, sent_id, syntax)
    free = set(range(1, n + 1))
    max_size = 1 if singletons else 3
    arguments = []
    opinions = []
    for _ in range(rng.randint(0, max_opinions)):
        expression = _random_span(rng, free, max_size)
        if expression is None:
            break
        spans = []
        for _ in range(2):
            choice = rng.random()
            if choice < 0.3 or (not free and not arguments):
                spans.append(None)
            elif choice < 0.5 and arguments:
                spans.append(rng.choice(arguments))
            else:
                span = _random_span(rng, free, max_size)
                if span is not None:
                    arguments.append(span)
                spans.append(span)
        holder, target = spans
        if holder is not None and holder == target:
            target = None
        opinions.append(Opinion(holder, target, expression,
                                rng.choice(list(Polarity))))
    return SentimentGraph(sentence, opinions).canonical()


@pytest.fixture
def graph_factory():
    return random_graph


@pytest.fixture
def rng():
    return random.Random(1)
