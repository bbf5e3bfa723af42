"""
Corpus and artifact readers and writers.

Three formats are handled, all UTF-8:

- Sentiment corpora: a JSON array of records ``{"sent_id", "text",
  "opinions"}``. Each opinion carries ``Source``, ``Target`` and
  ``Polar_expression`` as ``[[surface strings], ["begin:end", ...]]``
  plus ``Polarity`` (``Intensity`` is ignored). A record may also carry
  explicit ``tokens``, ``lemmas``, ``upos`` and ``heads`` lists;
  otherwise the text is split on whitespace.
- Dependency corpora: one token per line with the tab-separated columns
  index, form, lemma, upos and heads. The heads column is ``_`` or a
  ``|``-separated list of ``head:label`` pairs. Every sentence is
  preceded by ``# sent_id =`` and ``# text =`` comments and followed by
  a blank line.
- Embeddings: ``word v1 v2 ...`` per line, with an optional
  ``count dim`` header line. Contextual vectors have no word column and
  are aligned to a ``.idx`` sidecar of ``sent_id<TAB>index`` lines.
"""

import json
import logging
import re
from collections import OrderedDict

import numpy as np

from .core import (Arc, DependencyGraph, Opinion, Polarity, Sentence,
                   SentimentGraph, Span, Token)
from .errors import IngestionError, ParseFormatError, SentiParseError

logger = logging.getLogger(__name__)

# JSON field per opinion role
ROLE_FIELDS = OrderedDict([
    ('holder', 'Source'),
    ('target', 'Target'),
    ('expression', 'Polar_expression'),
])

NO_HEADS = '_'
HEAD_SEPARATOR = '|'
COLUMNS = 5

_whitespace_token = re.compile(r'\S+')


def _warn(warnings, message, *args):
    text = message % args
    if warnings is not None:
        warnings.append(text)
    logger.warning(text)


###############################
# Sentiment corpora
###############################
# Entry type of the optional per-token columns
TOKEN_COLUMNS = {'lemmas': str, 'upos': str, 'heads': int}


def _token_column(record, name, n):
    column = record.get(name)
    if column is None:
        return None
    if not isinstance(column, list) or len(column) != n:
        raise IngestionError(
            record['sent_id'], "%s must list one entry per token (%d)"
            % (name, n))
    kind = TOKEN_COLUMNS[name]
    if not all(isinstance(value, kind) and not isinstance(value, bool)
               for value in column):
        raise IngestionError(record['sent_id'], "%s entries must be %s"
                             % (name, kind.__name__))
    return column


def _record_sentence(record):
    sent_id = record['sent_id']
    text = record['text']
    if not isinstance(text, str):
        raise IngestionError(sent_id, "text is not a string")
    if 'tokens' in record:
        forms = record['tokens']
        if not isinstance(forms, list) \
                or not all(isinstance(form, str) for form in forms):
            raise IngestionError(sent_id, "tokens must be a list of strings")
        n = len(forms)
        return Sentence.from_forms(
            sent_id, forms, _token_column(record, 'lemmas', n),
            _token_column(record, 'upos', n),
            _token_column(record, 'heads', n), text)
    matches = list(_whitespace_token.finditer(text))
    lemmas = _token_column(record, 'lemmas', len(matches))
    upos = _token_column(record, 'upos', len(matches))
    heads = _token_column(record, 'heads', len(matches))
    tokens = []
    for i, match in enumerate(matches):
        tokens.append(Token(
            i + 1, match.group(),
            lemmas[i] if lemmas else None,
            upos[i] if upos else None,
            match.start(), match.end(),
            heads[i] if heads else None))
    return Sentence(sent_id, text, tokens)


def _offsets_to_span(sentence, surfaces, offsets, warnings):
    """
    Map ``"begin:end"`` offsets to a :class:`Span`, snapping ranges that
    cut through a token outward to cover it.
    """
    if not offsets:
        return None
    if not isinstance(surfaces, list) or not isinstance(offsets, list):
        raise IngestionError(sentence.sent_id,
                             "surface strings and offsets must be lists")
    if len(surfaces) != len(offsets):
        raise IngestionError(sentence.sent_id,
                             "%d surface strings for %d offsets"
                             % (len(surfaces), len(offsets)))
    indices = []
    for surface, offset in zip(surfaces, offsets):
        if not isinstance(offset, str):
            raise IngestionError(sentence.sent_id,
                                 "offset %r is not a \"begin:end\" string"
                                 % (offset,))
        try:
            begin, end = [int(x) for x in offset.split(':')]
        except ValueError:
            raise IngestionError(sentence.sent_id,
                                 "bad offset %r" % (offset,))
        if not 0 <= begin < end <= len(sentence.text):
            raise IngestionError(sentence.sent_id,
                                 "offset %s outside the text" % offset)
        if sentence.text[begin:end] != surface:
            raise IngestionError(
                sentence.sent_id, "offset %s reads %r, expected %r"
                % (offset, sentence.text[begin:end], surface))
        covered = [t for t in sentence.tokens
                   if t.char_begin < end and t.char_end > begin]
        if not covered:
            raise IngestionError(sentence.sent_id,
                                 "offset %s covers no token" % offset)
        if covered[0].char_begin != begin or covered[-1].char_end != end:
            _warn(warnings,
                  "Sentence %s: offset %s snapped to %d:%d",
                  sentence.sent_id, offset, covered[0].char_begin,
                  covered[-1].char_end)
        indices.extend(t.index for t in covered)
    return Span(indices)


def _read_record(record, warnings):
    if not isinstance(record, dict) or 'sent_id' not in record \
            or 'text' not in record:
        raise IngestionError(None, "record lacks sent_id or text")
    sent_id = record['sent_id']
    try:
        sentence = _record_sentence(record)
    except IngestionError:
        raise
    except SentiParseError as e:
        raise IngestionError(sent_id, str(e))

    opinions = []
    for number, entry in enumerate(record.get('opinions') or [], 1):
        if not isinstance(entry, dict):
            raise IngestionError(sent_id, "opinion %d is not an object"
                                 % number)
        spans = {}
        for role, field in ROLE_FIELDS.items():
            value = entry.get(field) or [[], []]
            if not isinstance(value, list) or len(value) != 2:
                raise IngestionError(sent_id, "opinion %d: malformed %s"
                                     % (number, field))
            spans[role] = _offsets_to_span(sentence, value[0], value[1],
                                           warnings)
        if spans['expression'] is None:
            _warn(warnings, "Sentence %s: opinion %d has no expression, "
                  "skipped", sent_id, number)
            continue
        try:
            polarity = Polarity.parse(entry.get('Polarity'))
        except ValueError as e:
            raise IngestionError(sent_id, "opinion %d: %s" % (number, e))
        opinions.append(Opinion(spans['holder'], spans['target'],
                                spans['expression'], polarity))
    return SentimentGraph(sentence, opinions)


def read_sentiment_corpus(path, warnings=None):
    """
    Read a sentiment corpus.

    :param path: JSON file holding an array of records.

    :param warnings:
        Optional list collecting snapping and skipping warnings.

    :return: List of :class:`SentimentGraph`, in file order.

    :exception IngestionError:
        Unparseable file, offsets outside the text or not matching their
        surface strings. The message names the record.
    """
    try:
        with open(path, encoding='utf-8') as f:
            records = json.load(f)
    except ValueError as e:
        raise IngestionError(path, "not valid JSON (%s)" % e)
    if not isinstance(records, list):
        raise IngestionError(path, "expected a JSON array of records")
    return [_read_record(record, warnings) for record in records]


def _opinion_field(sentence, span):
    if span is None:
        return [[], []]
    ranges = span.char_ranges(sentence)
    return [[sentence.text[b:e] for b, e in ranges],
            ["%d:%d" % (b, e) for b, e in ranges]]


def sentiment_record(graph):
    """The JSON record of a :class:`SentimentGraph`."""
    sentence = graph.sentence
    record = OrderedDict()
    record['sent_id'] = sentence.sent_id
    record['text'] = sentence.text
    record['tokens'] = sentence.forms
    if any(t.lemma != t.form for t in sentence.tokens):
        record['lemmas'] = [t.lemma for t in sentence.tokens]
    if any(t.upos != 'X' for t in sentence.tokens):
        record['upos'] = [t.upos for t in sentence.tokens]
    if sentence.n and sentence.has_syntax:
        record['heads'] = [t.syn_head for t in sentence.tokens]
    opinions = []
    for opinion in graph.opinions:
        entry = OrderedDict()
        for role, field in ROLE_FIELDS.items():
            entry[field] = _opinion_field(sentence, opinion.span(role))
        entry['Polarity'] = opinion.polarity.value
        entry['Intensity'] = 'Standard'
        opinions.append(entry)
    record['opinions'] = opinions
    return record


def write_sentiment_corpus(path, graphs):
    """
    Write sentiment graphs as a JSON array. Each contiguous run of
    tokens in a span becomes one ``"begin:end"`` entry.
    """
    with open(path, 'w', encoding='utf-8') as f:
        json.dump([sentiment_record(g) for g in graphs], f,
                  ensure_ascii=False, indent=1)
        f.write('\n')


###############################
# Dependency corpora
###############################
def format_dependency_graph(graph):
    """The tabular lines of one graph, blank line included."""
    sentence = graph.sentence
    lines = ["# sent_id = %s" % sentence.sent_id,
             "# text = %s" % sentence.text.replace('\n', ' ')]
    for token in sentence.tokens:
        heads = ["%d:%s" % (head, graph.arc(head, token.index).label)
                 for head in graph.heads_of(token.index)]
        lines.append('\t'.join([
            str(token.index), token.form, token.lemma, token.upos,
            HEAD_SEPARATOR.join(heads) if heads else NO_HEADS]))
    lines.append('')
    return '\n'.join(lines) + '\n'


def write_dependency_corpus(path, graphs):
    with open(path, 'w', encoding='utf-8') as f:
        for graph in graphs:
            f.write(format_dependency_graph(graph))


def _parse_heads(field, dependent, line_number, path):
    if field == NO_HEADS:
        return []
    arcs = []
    for entry in field.split(HEAD_SEPARATOR):
        head, _, label = entry.partition(':')
        try:
            arcs.append(Arc(int(head), dependent, label))
        except (ValueError, SentiParseError) as e:
            raise ParseFormatError(line_number,
                                   "bad head entry %r (%s)" % (entry, e),
                                   path)
    return arcs


class _Block(object):
    """Lines of one sentence while reading a dependency corpus."""

    def __init__(self, start):
        self.start = start
        self.sent_id = None
        self.text = None
        self.rows = []

    def build(self, path):
        sent_id = self.sent_id if self.sent_id is not None else str(self.start)
        columns = [c for _, c in self.rows]
        try:
            sentence = Sentence.from_forms(
                sent_id, [c[1] for c in columns], [c[2] for c in columns],
                [c[3] for c in columns], text=self.text)
        except SentiParseError as e:
            raise ParseFormatError(self.start, str(e), path)
        arcs = []
        for line_number, columns in self.rows:
            arcs.extend(_parse_heads(columns[4], int(columns[0]),
                                     line_number, path))
        try:
            return DependencyGraph(sentence, arcs)
        except SentiParseError as e:
            raise ParseFormatError(self.start, str(e), path)


def read_dependency_corpus(path):
    """
    Read a tabular dependency corpus.

    :return: List of :class:`DependencyGraph`, in file order.

    :exception ParseFormatError:
        On a malformed line, with its line number.
    """
    graphs = []
    block = None
    with open(path, encoding='utf-8') as f:
        for line_number, line in enumerate(f, 1):
            line = line.rstrip('\r\n')
            if not line:
                if block is not None:
                    graphs.append(block.build(path))
                block = None
                continue
            if block is None:
                block = _Block(line_number)
            if line.startswith('#'):
                key, _, value = line[1:].partition('=')
                key = key.strip()
                if key == 'sent_id':
                    block.sent_id = value.strip()
                elif key == 'text':
                    block.text = value[1:] if value.startswith(' ') else value
                continue
            columns = line.split('\t')
            if len(columns) != COLUMNS:
                raise ParseFormatError(
                    line_number, "expected %d columns, found %d"
                    % (COLUMNS, len(columns)), path)
            try:
                index = int(columns[0])
            except ValueError:
                raise ParseFormatError(line_number,
                                       "bad token index %r" % columns[0],
                                       path)
            if index != len(block.rows) + 1:
                raise ParseFormatError(
                    line_number, "token index %d out of sequence" % index,
                    path)
            block.rows.append((line_number, columns))
    if block is not None:
        graphs.append(block.build(path))
    return graphs


###############################
# Embeddings
###############################
class EmbeddingTable(object):
    """
    Pretrained vectors keyed by token. Tokens without a row map to the
    unknown row, all zeros.

    :param words: List of tokens, one per row.
    :param vectors: Array of shape ``(len(words), dim)``.
    """

    def __init__(self, words, vectors):
        self.words = list(words)
        self.vectors = np.asarray(vectors, dtype=np.float32)
        self.index = {word: i for i, word in enumerate(self.words)}
        self.unknown = np.zeros(self.dim, dtype=np.float32)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    @property
    def dim(self):
        return self.vectors.shape[1]

    def lookup(self, word):
        row = self.index.get(word)
        if row is None:
            return self.unknown
        return self.vectors[row]

    def matrix(self, tokens):
        """Stack the rows for ``tokens`` into a ``(len(tokens), dim)`` array."""
        if not tokens:
            return np.zeros((0, self.dim), dtype=np.float32)
        return np.stack([self.lookup(token) for token in tokens])


def _parse_floats(fields, line_number, path):
    try:
        return [float(x) for x in fields]
    except ValueError:
        raise ParseFormatError(line_number, "non-numeric vector entry",
                               path)


def read_embeddings(path, vocabulary=None):
    """
    Read word vectors in the text format.

    :param path: File of ``word v1 ... vd`` lines.

    :param vocabulary:
        Optional collection of tokens. When given, only their rows are
        kept.

    :return: An :class:`EmbeddingTable`.

    :exception ParseFormatError:
        A line whose dimension differs from the first vector line.
    """
    words = []
    vectors = []
    seen = set()
    dim = None
    with open(path, encoding='utf-8') as f:
        for line_number, line in enumerate(f, 1):
            fields = line.split()
            if not line.strip():
                continue
            if line_number == 1 and len(fields) == 2 \
                    and all(x.isdigit() for x in fields):
                continue
            values = _parse_floats(fields[1:], line_number, path)
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise ParseFormatError(line_number, "empty vector", path)
            elif len(values) != dim:
                raise ParseFormatError(
                    line_number, "dimension %d, expected %d"
                    % (len(values), dim), path)
            word = fields[0]
            if word in seen:
                logger.warning("%s:%d: duplicate row for %r ignored",
                               path, line_number, word)
                continue
            seen.add(word)
            if vocabulary is not None and word not in vocabulary:
                continue
            words.append(word)
            vectors.append(values)
    if dim is None:
        raise ParseFormatError(0, "no vectors", path)
    return EmbeddingTable(words, np.array(vectors, dtype=np.float32)
                          .reshape(len(words), dim))


def read_contextual_vectors(path, index_path=None):
    """
    Read precomputed word-level contextual vectors.

    :param path: One vector per line, whitespace-separated floats.

    :param index_path:
        The sidecar, ``path + '.idx'`` by default. Line ``k`` holds the
        ``sent_id`` and 1-based token index of vector line ``k``.

    :return: Dict ``sent_id -> array (n, dim)``, rows in token order.

    :exception ParseFormatError:
        Dimension mismatch, misaligned sidecar or token indices not
        contiguous from 1.
    """
    if index_path is None:
        index_path = path + '.idx'
    with open(index_path, encoding='utf-8') as f:
        keys = []
        for line_number, line in enumerate(f, 1):
            fields = line.rstrip('\r\n').split('\t')
            if len(fields) != 2 or not fields[1].isdigit():
                raise ParseFormatError(line_number, "expected sent_id<TAB>index",
                                       index_path)
            keys.append((fields[0], int(fields[1])))
    rows = OrderedDict()
    dim = None
    with open(path, encoding='utf-8') as f:
        for line_number, line in enumerate(f, 1):
            if line_number > len(keys):
                raise ParseFormatError(line_number, "more vectors than index "
                                       "entries", path)
            values = _parse_floats(line.split(), line_number, path)
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise ParseFormatError(
                    line_number, "dimension %d, expected %d"
                    % (len(values), dim), path)
            sent_id, index = keys[line_number - 1]
            sentence_rows = rows.setdefault(sent_id, [])
            if index != len(sentence_rows) + 1:
                raise ParseFormatError(
                    line_number, "token %d of %s out of sequence"
                    % (index, sent_id), index_path)
            sentence_rows.append(values)
    if sum(len(r) for r in rows.values()) != len(keys):
        raise ParseFormatError(len(keys), "fewer vectors than index entries",
                               index_path)
    return OrderedDict((sent_id, np.array(r, dtype=np.float32))
                       for sent_id, r in rows.items())
