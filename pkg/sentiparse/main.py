"""
The commands of the SentiParse front-end.

- ``encode``: sentiment corpus to dependency corpus.
- ``decode``: dependency corpus back to a sentiment corpus.
- ``oracle-check``: oracle then replay every graph of a dependency corpus.
- ``train``: train a parser on a dependency corpus.
- ``parse``: parse sentences with a trained parser.
- ``score``: evaluate predictions against gold annotations.
- ``stats``: transition statistics of a dependency corpus.

Every command takes the parsed arguments and the log handlers, and
returns the process exit code.
"""

###############################
# Import required libraries
###############################
import io
import logging
import sys

from . import codec, config, corpusio, metrics, utils
from .core import Sentence
from .errors import ConfigurationError
from .model import ParserModel
from .training import Trainer, predict, seed_everything
from .transitions import oracle, replay, transition_stats
from .workers import map_sentences

EXIT_OK = 0
EXIT_FAILURE = 1

logger = logging.getLogger(__name__)


###############################
# Codec commands
###############################
def encode_command(args, handlers):
    strategy = codec.EncodingStrategy.parse(args.strategy)
    graphs = corpusio.read_sentiment_corpus(args.input)
    encoded = map_sentences(lambda g: codec.encode(g, strategy), graphs,
                            args.jobs, handlers)
    corpusio.write_dependency_corpus(args.output, encoded)
    logger.info("Encoded %d sentences (%s, %d arcs) into %s", len(encoded),
                strategy.value, sum(len(g) for g in encoded), args.output)
    return EXIT_OK


def decode_command(args, handlers):
    graphs = corpusio.read_dependency_corpus(args.input)

    def decode_one(graph):
        warnings = []
        return codec.decode(graph, warnings), warnings

    results = map_sentences(decode_one, graphs, args.jobs, handlers)
    corpusio.write_sentiment_corpus(args.output, [r[0] for r in results])
    n_warnings = sum(len(r[1]) for r in results)
    sys.stdout.write("%d recovery warnings\n" % n_warnings)
    logger.info("Decoded %d sentences into %s", len(results), args.output)
    return EXIT_OK


def oracle_check_command(args, handlers):
    graphs = corpusio.read_dependency_corpus(args.input)

    def check(graph):
        try:
            arcs = replay(graph.sentence.n, oracle(graph))
        except ValueError as e:
            return str(e)
        expected = dict((a.key, a.label) for a in graph)
        if dict(arcs) != expected:
            return "replayed arcs differ from the graph"
        return None

    failures = [(g.sent_id, reason) for g, reason in
                zip(graphs, map_sentences(check, graphs, args.jobs, handlers))
                if reason is not None]
    for sent_id, reason in failures:
        sys.stdout.write("%s: %s\n" % (sent_id, reason))
    sys.stdout.write("%d of %d sentences failed\n" % (len(failures), len(graphs)))
    return EXIT_FAILURE if failures else EXIT_OK


###############################
# Parser commands
###############################
def _train_overrides(args):
    overrides = {
        'epochs': args.epochs,
        'batch_size': args.batch_size,
        'lr': args.lr,
        'beam': args.beam,
        'seed': args.seed,
    }
    return overrides


def train_command(args, handlers):
    overrides = _train_overrides(args)
    external = None
    if args.external is not None:
        external = corpusio.read_contextual_vectors(args.external)
        dims = set(v.shape[1] for v in external.values())
        if len(dims) != 1:
            raise ConfigurationError(
                "External vectors of %d different dimensions" % len(dims))
        overrides['external_dim'] = dims.pop()
    cfg = config.load_config(args.config, overrides)

    word_vectors = lemma_vectors = None
    if args.word_vectors is not None:
        word_vectors = corpusio.read_embeddings(args.word_vectors)
    if args.lemma_vectors is not None:
        lemma_vectors = corpusio.read_embeddings(args.lemma_vectors)

    train_graphs = corpusio.read_dependency_corpus(args.train)
    dev_graphs = None
    if args.dev is not None:
        dev_graphs = corpusio.read_dependency_corpus(args.dev)

    trainer = Trainer(cfg, handlers)
    trainer.run(train_graphs, dev_graphs, args.out, external,
                word_vectors, lemma_vectors, args.jobs)
    return EXIT_OK


def read_sentences(path):
    """
    Sentences to parse: a sentiment corpus (``.json``) or plain text
    with one whitespace-tokenized sentence per line, numbered from 1.
    """
    if path.endswith('.json'):
        return [g.sentence for g in corpusio.read_sentiment_corpus(path)]
    sentences = []
    with io.open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, 1):
            line = line.rstrip('\r\n')
            sentences.append(Sentence.from_forms(str(number), line.split(),
                                                 text=line))
    return sentences


def parse_command(args, handlers):
    if args.seed is not None:
        seed_everything(args.seed)
    model = ParserModel.load(args.model)
    sentences = read_sentences(args.input)
    external = None
    if args.external is not None:
        external = corpusio.read_contextual_vectors(args.external)
    graphs = predict(model, sentences, args.beam, external, args.jobs,
                     handlers)
    corpusio.write_dependency_corpus(args.output, graphs)
    if args.sentiment is not None:
        decoded = map_sentences(codec.decode, graphs, args.jobs, handlers)
        corpusio.write_sentiment_corpus(args.sentiment, decoded)
    logger.info("Parsed %d sentences into %s", len(graphs), args.output)
    return EXIT_OK


###############################
# Evaluation commands
###############################
def score_command(args, handlers):
    gold = corpusio.read_sentiment_corpus(args.gold)
    if (args.gold_dep is None) != (args.pred_dep is None):
        raise ConfigurationError(
            "--gold-dep and --pred-dep must be given together")
    gold_dep = None
    pred_deps = [None] * len(args.pred)
    if args.gold_dep is not None:
        if len(args.pred_dep) != len(args.pred):
            raise ConfigurationError(
                "%d --pred-dep files for %d --pred files"
                % (len(args.pred_dep), len(args.pred)))
        gold_dep = corpusio.read_dependency_corpus(args.gold_dep)
        pred_deps = args.pred_dep
    reports = []
    for pred_path, pred_dep_path in zip(args.pred, pred_deps):
        pred = corpusio.read_sentiment_corpus(pred_path)
        pred_dep = None
        if pred_dep_path is not None:
            pred_dep = corpusio.read_dependency_corpus(pred_dep_path)
        reports.append(metrics.score(gold, pred, gold_dep, pred_dep,
                                     args.matching, args.jobs, handlers))
        logger.info("Scored %s: sf1 %.4f", pred_path, reports[-1].sf1)
    report = reports[0] if len(reports) == 1 \
        else metrics.aggregate_reports(reports)
    sys.stdout.write(report.to_text())
    if args.out is not None:
        report.write_json(args.out)
    return EXIT_OK


def stats_command(args, handlers):
    graphs = corpusio.read_dependency_corpus(args.input)
    stats = transition_stats(graphs, args.jobs, handlers)
    for key, value in stats.summary().items():
        sys.stdout.write("%s: %s\n" % (key, value))
    if args.plot is not None:
        with io.open(args.plot, 'w', encoding='utf-8') as f:
            f.write(stats.csv_header() + '\n')
            for line in stats.csv_lines():
                f.write(line + '\n')
    return EXIT_OK


COMMANDS = {
    'encode': encode_command,
    'decode': decode_command,
    'oracle-check': oracle_check_command,
    'train': train_command,
    'parse': parse_command,
    'score': score_command,
    'stats': stats_command,
}


def main(args, handlers):
    """
    Run one command.

    :param args:
        The parsed command-line arguments; ``args.command`` names the
        command.

    :param handlers:
        An iterable of log handlers, added to the package logger.

    :return: The exit code.
    """
    utils.start_logger('sentiparse', handlers)
    try:
        return COMMANDS[args.command](args, handlers)
    except (ValueError, OSError) as e:
        utils.log_exception(logger, e)
        return EXIT_FAILURE
