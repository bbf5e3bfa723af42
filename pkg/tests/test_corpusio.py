import json
import random

import numpy as np
import pytest

from sentiparse import corpusio
from sentiparse.codec import encode
from sentiparse.core import Span
from sentiparse.errors import IngestionError, ParseFormatError

from conftest import EXAMPLE_TEXT, example_graph


def opinion_entry(source, target, expression, polarity):
    def field(pairs):
        return [[s for s, _ in pairs], [o for _, o in pairs]]
    return {'Source': field(source), 'Target': field(target),
            'Polar_expression': field(expression), 'Polarity': polarity,
            'Intensity': 'Standard'}


def example_record():
    return {
        'sent_id': 'ex1',
        'text': EXAMPLE_TEXT,
        'opinions': [
            opinion_entry([('Some classmates', '0:15')],
                          [('all the instructors', '26:45')],
                          [('too demanding', '51:64')], 'Negative'),
            opinion_entry([('Some classmates', '0:15')],
                          [('all the instructors', '26:45')],
                          [('really friendly', '71:86')], 'Positive'),
        ],
    }


def write_json(tmp_path, records):
    path = str(tmp_path / 'corpus.json')
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(records, f)
    return path


class TestSentimentCorpus:

    def test_example_record(self, tmp_path):
        graphs = corpusio.read_sentiment_corpus(
            write_json(tmp_path, [example_record()]))
        assert graphs == [example_graph()]
        assert graphs[0].opinions[0].expression == Span([9, 10])

    def test_record_without_opinions(self, tmp_path):
        record = {'sent_id': 'a', 'text': 'nothing to see', 'opinions': []}
        graphs = corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))
        assert graphs[0].opinions == ()
        assert graphs[0].sentence.n == 3

    def test_offsets_are_snapped_to_tokens(self, tmp_path):
        record = example_record()
        record['opinions'] = [opinion_entry([], [], [('emandin', '56:63')],
                                            'Negative')]
        warnings = []
        graphs = corpusio.read_sentiment_corpus(
            write_json(tmp_path, [record]), warnings)
        assert graphs[0].opinions[0].expression == Span([10])
        assert len(warnings) == 1
        assert 'snapped to 55:64' in warnings[0]

    def test_discontiguous_span(self, tmp_path):
        record = example_record()
        record['opinions'] = [opinion_entry(
            [], [], [('too', '51:54'), ('friendly', '78:86')], 'Positive')]
        graphs = corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))
        assert graphs[0].opinions[0].expression == Span([9, 14])

    def test_opinion_without_expression_is_skipped(self, tmp_path):
        record = example_record()
        record['opinions'].append(opinion_entry(
            [('Some', '0:4')], [], [], 'Positive'))
        warnings = []
        graphs = corpusio.read_sentiment_corpus(
            write_json(tmp_path, [record]), warnings)
        assert len(graphs[0].opinions) == 2
        assert 'no expression' in warnings[0]

    @pytest.mark.parametrize('offset,surface', [
        ('80:100', 'friendly'),
        ('51:64', 'too demanding!'),
        ('x:y', 'too'),
    ])
    def test_bad_offsets(self, tmp_path, offset, surface):
        record = example_record()
        record['opinions'] = [opinion_entry([], [], [(surface, offset)],
                                            'Negative')]
        with pytest.raises(IngestionError) as info:
            corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))
        assert info.value.sent_id == 'ex1'

    def test_unknown_polarity(self, tmp_path):
        record = example_record()
        record['opinions'][0]['Polarity'] = 'Mixed'
        with pytest.raises(IngestionError):
            corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))

    def test_not_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('[{"sent_id": ')
        with pytest.raises(IngestionError):
            corpusio.read_sentiment_corpus(str(path))

    def test_explicit_tokens(self, tmp_path):
        record = {'sent_id': 'b', 'text': "it's fine",
                  'tokens': ['it', "'s", 'fine'],
                  'upos': ['PRON', 'AUX', 'ADJ'], 'heads': [3, 3, 0],
                  'opinions': [opinion_entry([], [('it', '0:2')],
                                             [('fine', '5:9')], 'Positive')]}
        graph = corpusio.read_sentiment_corpus(
            write_json(tmp_path, [record]))[0]
        assert graph.sentence.forms == ['it', "'s", 'fine']
        assert graph.sentence.has_syntax
        assert graph.opinions[0].target == Span([1])

    @pytest.mark.parametrize('column,values', [
        ('lemmas', ['good', 'food', 'EXTRA']),
        ('lemmas', ['good']),
        ('upos', []),
        ('heads', [2, '0']),
        ('heads', 'ab'),
    ])
    def test_token_columns_must_match_tokens(self, tmp_path, column, values):
        for record in ({'sent_id': 'c', 'text': 'good food'},
                       {'sent_id': 'c', 'text': 'good food',
                        'tokens': ['good', 'food']}):
            record[column] = values
            with pytest.raises(IngestionError) as info:
                corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))
            assert info.value.sent_id == 'c'
            assert str(info.value).count('record c') == 1

    @pytest.mark.parametrize('field', [
        [['good'], [0]],
        [['good'], [[0, 4]]],
        [['good'], '0:4'],
        'good',
    ])
    def test_malformed_opinion_fields(self, tmp_path, field):
        record = {'sent_id': 'd', 'text': 'good food',
                  'opinions': [{'Source': [[], []], 'Target': [[], []],
                                'Polar_expression': field,
                                'Polarity': 'Positive'}]}
        with pytest.raises(IngestionError) as info:
            corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))
        assert info.value.sent_id == 'd'

    def test_opinion_must_be_an_object(self, tmp_path):
        record = {'sent_id': 'e', 'text': 'good food',
                  'opinions': [['good', '0:4']]}
        with pytest.raises(IngestionError):
            corpusio.read_sentiment_corpus(write_json(tmp_path, [record]))

    def test_write_then_read(self, tmp_path, graph_factory):
        rng = random.Random(4)
        graphs = [graph_factory(rng, sent_id=str(i), syntax=i % 2 == 0)
                  for i in range(100)]
        graphs.append(example_graph())
        path = str(tmp_path / 'out.json')
        corpusio.write_sentiment_corpus(path, graphs)
        assert corpusio.read_sentiment_corpus(path) == graphs

    def test_written_record(self, graph):
        record = corpusio.sentiment_record(graph)
        assert record['opinions'][0]['Target'] \
            == [['all the instructors'], ['26:45']]
        assert 'heads' not in record


class TestDependencyCorpus:

    def test_example_rows(self, graph):
        lines = corpusio.format_dependency_graph(
            encode(graph, 'head-first')).splitlines()
        assert lines[0] == '# sent_id = ex1'
        assert lines[1] == '# text = ' + EXAMPLE_TEXT
        assert lines[3] == '2\tclassmates\tclassmates\tX\t1:holder#holder'
        assert lines[4] == '3\tsaid\tsaid\tX\t_'
        assert lines[2] == '1\tSome\tSome\tX\t9:holder|13:holder'
        assert lines[-1] == ''

    def test_round_trip(self, tmp_path, graph_factory):
        rng = random.Random(6)
        graphs = []
        for number in range(1000):
            strategy = rng.choice(['head-first', 'head-final'])
            graphs.append(encode(graph_factory(rng, sent_id=str(number)),
                                 strategy))
        path = str(tmp_path / 'corpus.dep')
        corpusio.write_dependency_corpus(path, graphs)
        assert corpusio.read_dependency_corpus(path) == graphs

    def test_empty_sentence_is_kept(self, tmp_path):
        path = tmp_path / 'empty.dep'
        path.write_text('# sent_id = a\n# text = \n\n'
                        '# sent_id = b\n# text = x\n1\tx\tx\tX\t_\n\n')
        graphs = corpusio.read_dependency_corpus(str(path))
        assert [g.sent_id for g in graphs] == ['a', 'b']
        assert graphs[0].sentence.n == 0

    def test_missing_final_blank_line(self, tmp_path):
        path = tmp_path / 'short.dep'
        path.write_text('# sent_id = a\n# text = x y\n1\tx\tx\tX\t_\n'
                        '2\ty\ty\tX\t0:exp:pos|1:target')
        graph = corpusio.read_dependency_corpus(str(path))[0]
        assert graph.arc(0, 2).label == 'exp:pos'
        assert graph.arc(1, 2).label == 'target'

    @pytest.mark.parametrize('row,line_number', [
        ('1\tx\tx\tX', 3),
        ('1\tx\tx\tX\t0:opinion', 3),
        ('1\tx\tx\tX\t1:target', 3),
        ('2\tx\tx\tX\t_', 3),
    ])
    def test_malformed_rows(self, tmp_path, row, line_number):
        path = tmp_path / 'bad.dep'
        path.write_text('# sent_id = a\n# text = x\n' + row + '\n\n')
        with pytest.raises(ParseFormatError) as info:
            corpusio.read_dependency_corpus(str(path))
        assert info.value.line_number == line_number


class TestEmbeddings:

    def test_read_with_header(self, tmp_path):
        path = tmp_path / 'vectors.txt'
        path.write_text('3 2\nthe 0.1 0.2\ncat  1.0 -1.0\nthe 9 9\n')
        table = corpusio.read_embeddings(str(path))
        assert table.dim == 2
        assert len(table) == 2
        np.testing.assert_allclose(table.lookup('the'), [0.1, 0.2], rtol=1e-6)
        np.testing.assert_array_equal(table.lookup('dog'), [0.0, 0.0])
        assert table.matrix(['cat', 'dog']).shape == (2, 2)

    def test_vocabulary_filter(self, tmp_path):
        path = tmp_path / 'vectors.txt'
        path.write_text('the 0.1 0.2\ncat 1.0 -1.0\n')
        table = corpusio.read_embeddings(str(path), vocabulary={'cat'})
        assert 'cat' in table and 'the' not in table

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / 'vectors.txt'
        path.write_text('the 0.1 0.2\ncat 1.0\n')
        with pytest.raises(ParseFormatError) as info:
            corpusio.read_embeddings(str(path))
        assert info.value.line_number == 2

    def test_contextual_vectors(self, tmp_path):
        path = str(tmp_path / 'ctx.txt')
        with open(path, 'w') as f:
            f.write('1 2 3\n4 5 6\n7 8 9\n')
        with open(path + '.idx', 'w') as f:
            f.write('a\t1\na\t2\nb\t1\n')
        vectors = corpusio.read_contextual_vectors(path)
        assert list(vectors) == ['a', 'b']
        assert vectors['a'].shape == (2, 3)
        np.testing.assert_array_equal(vectors['b'], [[7, 8, 9]])

    def test_contextual_vectors_misaligned(self, tmp_path):
        path = str(tmp_path / 'ctx.txt')
        with open(path, 'w') as f:
            f.write('1 2\n3 4\n')
        with open(path + '.idx', 'w') as f:
            f.write('a\t2\na\t1\n')
        with pytest.raises(ParseFormatError):
            corpusio.read_contextual_vectors(path)
