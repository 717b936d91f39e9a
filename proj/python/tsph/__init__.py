"""Persistence diagrams, merge trees and level automata for time series."""

import json

from ._tsph import *  # noqa: F401,F403
from ._tsph import theory, mc  # noqa: F401
from . import _tsph


def diagram(values, times=None):
    """Diagram of a series given as a list of values, augmented if needed."""
    series = _tsph.TimeSeries(values, times)
    if not _tsph.is_augmented(series):
        series = _tsph.augment(series)
    return _tsph.compute_ph0(series)


def diagram_dict(d):
    return json.loads(d.to_json())
