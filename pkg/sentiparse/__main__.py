#!/usr/bin/env python3

"""
Command-line entry point of SentiParse.

Parses the arguments, sets up the log handlers and runs the command in
:mod:`sentiparse.main`.
"""

# System imports
import argparse
import logging
import sys

from . import utils
from .config import defaults
from .main import main as main_entry
from .metrics import GREEDY, MATCHING_POLICIES


def build_parser():
    parser = argparse.ArgumentParser(
        prog='sentiparse',
        description="Structured sentiment analysis as dependency parsing")
    parser.add_argument(
        '-v', '--verbose', action='store_true',
        help='log debug messages to stderr')
    parser.add_argument(
        '-q', '--quiet', action='store_true',
        help='log only warnings and errors to stderr')
    parser.add_argument(
        '--log-file', default=None,
        help='also write the full log to this file')
    parser.add_argument(
        '--jobs', type=int, default=1,
        help='worker threads for per-sentence work')
    parser.add_argument(
        '--seed', type=int, default=None,
        help='random seed')
    subparsers = parser.add_subparsers(title='commands', dest='command')
    subparsers.required = True

    sub = subparsers.add_parser(
        'encode', help='encode a sentiment corpus as dependency graphs')
    sub.add_argument('--strategy', default='head-first',
                     choices=['head-first', 'head-final', 'syntax'])
    sub.add_argument('input', help='sentiment corpus (JSON)')
    sub.add_argument('output', help='dependency corpus to write')

    sub = subparsers.add_parser(
        'decode', help='decode dependency graphs into a sentiment corpus')
    sub.add_argument('input', help='dependency corpus')
    sub.add_argument('output', help='sentiment corpus to write (JSON)')

    sub = subparsers.add_parser(
        'oracle-check', help='check oracle and replay on every graph')
    sub.add_argument('input', help='dependency corpus')

    sub = subparsers.add_parser('train', help='train a parser')
    sub.add_argument('--config', default=None,
                     help='configuration file (python literal dictionary)')
    sub.add_argument('--train', required=True, help='training dependency corpus')
    sub.add_argument('--dev', default=None, help='development dependency corpus')
    sub.add_argument('--out', required=True, help='checkpoint to write')
    sub.add_argument('--epochs', type=int, default=None)
    sub.add_argument('--batch-size', type=int, default=None)
    sub.add_argument('--lr', type=float, default=None)
    sub.add_argument('--beam', type=int, default=None,
                     help='beam size for development decoding')
    sub.add_argument('--word-vectors', default=None,
                     help='pretrained word embeddings (text format)')
    sub.add_argument('--lemma-vectors', default=None,
                     help='pretrained lemma embeddings (text format)')
    sub.add_argument('--external', default=None,
                     help='contextual vectors with a .idx sidecar')

    sub = subparsers.add_parser('parse', help='parse sentences')
    sub.add_argument('--model', required=True, help='checkpoint')
    sub.add_argument('--beam', type=int, default=defaults['decode']['beam'])
    sub.add_argument('--external', default=None,
                     help='contextual vectors with a .idx sidecar')
    sub.add_argument('--sentiment', default=None,
                     help='also write the decoded sentiment corpus (JSON)')
    sub.add_argument('input',
                     help='sentiment corpus (.json) or one sentence per line')
    sub.add_argument('output', help='dependency corpus to write')

    sub = subparsers.add_parser('score', help='evaluate predictions')
    sub.add_argument('--gold', required=True, help='gold sentiment corpus')
    sub.add_argument('--pred', required=True, nargs='+',
                     help='predicted sentiment corpus; several files report '
                          'the mean and std over runs')
    sub.add_argument('--gold-dep', default=None, help='gold dependency corpus')
    sub.add_argument('--pred-dep', default=None, nargs='+',
                     help='predicted dependency corpus, one per --pred')
    sub.add_argument('--matching', default=GREEDY, choices=MATCHING_POLICIES,
                     help='opinion matching for NSF1 and SF1; optimal '
                          'maximizes the matched weight and keeps SF1 <= NSF1')
    sub.add_argument('--out', default=None, help='write the scores as JSON')

    sub = subparsers.add_parser('stats', help='transition statistics')
    sub.add_argument('--plot', default=None,
                     help='write sent_id,n,transitions,arcs rows as CSV')
    sub.add_argument('input', help='dependency corpus')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    handlers = utils.make_handlers(args.log_file, level)

    try:
        return main_entry(args, handlers)
    except KeyboardInterrupt:
        sys.stderr.write("Interrupted\n")
        return 130
    finally:
        utils.stop_logger('sentiparse', handlers)
        for h in handlers:
            h.close()


if __name__ == '__main__':
    sys.exit(main())
