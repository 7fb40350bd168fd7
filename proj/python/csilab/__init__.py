"""Unsupervised CSI denoising and feedback simulator.

Channel matrices are numpy complex64 arrays of shape (antennas, subcarriers).
Configs may be given as dicts, JSON text, or paths to JSON files.
"""

import json
import os

from ._csilab import (
    Error,
    FeedbackCodec,
    IoError,
    ShapeError,
    compression_factor,
    cosine_similarity,
    decoder_parameters,
    dequantize,
    encoder_parameters,
    idft_feedback,
    nmse,
    pack,
    quantize,
    unpack,
    zf_rate,
)
from . import _csilab

__all__ = [
    "Error", "IoError", "ShapeError", "FeedbackCodec",
    "scenario", "generate_sample", "encoder_parameters", "decoder_parameters",
    "compression_factor", "quantize", "dequantize", "pack", "unpack",
    "idft_feedback", "nmse", "cosine_similarity", "zf_rate",
    "load_config", "generate", "train", "evaluate", "rate",
]


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, (str, os.PathLike)) and os.path.exists(config):
        with open(config) as f:
            return f.read()
    return str(config)


def scenario(profile="desk", **overrides):
    """Resolved scenario config as a dict."""
    return json.loads(_csilab.scenario_json(profile, json.dumps(overrides) if overrides else ""))


def generate_sample(index, snr_db=10.0, master_seed=1, profile="desk", **overrides):
    """One sample: dict with h_ul, y_ul, h_dl (list), y_dl (list), seed."""
    return _csilab.generate_sample(profile, json.dumps(overrides) if overrides else "", snr_db, master_seed, index)


def load_config(config):
    """Experiment config with profile defaults filled in."""
    return json.loads(_csilab.config_json(_text(config)))


def generate(config, out=None, seed=None, log=None):
    return _csilab.generate(_text(config), out, seed, log)


def train(config, checkpoint=None, out=None, seed=None, log=None):
    return _csilab.train(_text(config), checkpoint, out, seed, log)


def evaluate(config, checkpoint=None, out=None, seed=None, log=None):
    return _csilab.evaluate(_text(config), checkpoint, out, seed, log)


def rate(config, checkpoint=None, out=None, seed=None, log=None):
    return _csilab.rate(_text(config), checkpoint, out, seed, log)
