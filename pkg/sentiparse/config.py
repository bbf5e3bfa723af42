"""
Provides the configuration maps for the parser and its training loop.

A configuration file is a python literal dictionary, read with
:func:`ast.literal_eval`. It may be nested like :data:`defaults` or
flat, in which case each key goes to the section that declares it.
"""

import ast
import copy

from .errors import ConfigurationError

###############################
# Constants
###############################
defaults = {
    # Token representation e_i
    'representation': {
        'word_dim': 100,
        'pos_dim': 100,
        'lemma_dim': 100,
        'char_dim': 100,
        'char_filters': 100,
        'char_window': 3,
        # Precomputed contextual vectors, 0 = not used
        'external_dim': 0,
        'dropout': 0.33,
    },

    # Encoder, decoder and the two biaffine blocks
    'model': {
        'encoder_hidden': 512,
        'encoder_layers': 3,
        'decoder_hidden': 512,
        'pointer_mlp': 512,
        'label_mlp': 128,
        # Ablation switches
        'use_pos': True,
        'use_lemma': True,
        'use_char': True,
        'use_external': True,  # only effective when external_dim > 0
        'use_coparent': True,  # r_t = c_i + c_j, otherwise r_t = c_i
        # Uniform init bound is init_scale / sqrt(fan_in)
        'init_scale': 1.0,
    },

    # Optimisation
    'train': {
        'lr': 0.001,
        'beta1': 0.9,
        'beta2': 0.9,
        'decay': 0.75,
        'patience': 10,  # epochs without dev LF1 gain before decay
        'clip': 5.0,
        'epochs': 600,
        'batch_size': 32,
        'eval_every': 1,
        'seed': 1,
    },

    'decode': {
        'beam': 5,
    },
}

SECTIONS = ('representation', 'model', 'train', 'decode')

_positive_ints = {
    'representation': ['word_dim', 'pos_dim', 'lemma_dim', 'char_dim',
                       'char_filters', 'char_window'],
    'model': ['encoder_hidden', 'encoder_layers', 'decoder_hidden',
              'pointer_mlp', 'label_mlp'],
    'train': ['epochs', 'batch_size', 'eval_every', 'patience'],
    'decode': ['beam'],
}


def section_of(key):
    """
    Return the section which declares ``key``.

    :exception ConfigurationError: if no section declares it
    """
    for section in SECTIONS:
        if key in defaults[section]:
            return section
    raise ConfigurationError("Unknown configuration key " + repr(key))


def check_config(section, cfg):
    """
    Raise an exception if a section of the configuration is not valid.

    :param section:
        Name of the section, one of :data:`SECTIONS`

    :param cfg:
        Configuration map of that section

    :return:
        :const:`True`

    :exception ConfigurationError:
        raised if a key is missing or a value is out of range
    """
    required_config = list(defaults[section])
    for val in required_config:
        if val not in cfg:
            raise ConfigurationError(
                "Missing " + val + ", required for " + section + " config")
    for key in cfg:
        if key not in defaults[section]:
            raise ConfigurationError(
                "Unknown key " + key + " in " + section + " config")

    for key in _positive_ints[section]:
        if not isinstance(cfg[key], int) or cfg[key] < 1:
            raise ConfigurationError(
                "%s must be a positive integer, got %r" % (key, cfg[key]))

    if section == 'representation':
        if not isinstance(cfg['external_dim'], int) or cfg['external_dim'] < 0:
            raise ConfigurationError("external_dim must be >= 0")
        if not 0.0 <= cfg['dropout'] < 1.0:
            raise ConfigurationError("dropout must be in [0, 1)")
    elif section == 'model':
        if cfg['init_scale'] <= 0:
            raise ConfigurationError("init_scale must be > 0")
    elif section == 'train':
        if cfg['lr'] <= 0:
            raise ConfigurationError("lr must be > 0")
        if not 0.0 < cfg['decay'] <= 1.0:
            raise ConfigurationError("decay must be in (0, 1]")
        if cfg['clip'] <= 0:
            raise ConfigurationError("clip must be > 0")
        for beta in ('beta1', 'beta2'):
            if not 0.0 <= cfg[beta] < 1.0:
                raise ConfigurationError(beta + " must be in [0, 1)")
    return True


def merge(config, overrides):
    """
    Return a copy of ``config`` with ``overrides`` applied.

    :param overrides:
        Nested or flat map. ``None`` values are skipped, so unset
        command-line flags leave the value alone.

    :exception ConfigurationError: on an unknown key
    """
    merged = copy.deepcopy(config)
    for key, value in overrides.items():
        if key in SECTIONS and isinstance(value, dict):
            for sub_key, sub_value in value.items():
                if sub_key not in defaults[key]:
                    raise ConfigurationError(
                        "Unknown key " + sub_key + " in " + key + " config")
                if sub_value is not None:
                    merged[key][sub_key] = sub_value
        elif value is not None:
            merged[section_of(key)][key] = value
    return merged


def check_all(config):
    for section in SECTIONS:
        if section not in config:
            raise ConfigurationError("Missing " + section + " section")
        check_config(section, config[section])
    return True


def load_config(path=None, overrides=None):
    """
    Build the full configuration map: defaults, then the file, then
    the overrides.

    :param path:
        Optional configuration file (python literal dictionary)

    :param overrides:
        Optional map of values taking precedence over the file

    :return:
        The checked configuration map

    :exception ConfigurationError:
        raised if the file cannot be parsed or a value is invalid
    """
    config = copy.deepcopy(defaults)
    if path is not None:
        with open(path, encoding='utf-8') as f:
            try:
                from_file = ast.literal_eval(f.read())
            except (ValueError, SyntaxError) as e:
                raise ConfigurationError(
                    "Could not parse " + path + ": " + str(e))
        if not isinstance(from_file, dict):
            raise ConfigurationError(path + " is not a dictionary")
        config = merge(config, from_file)
    if overrides:
        config = merge(config, overrides)
    check_all(config)
    return config
