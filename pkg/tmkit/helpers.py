"""
Helper functions
"""

import simplejson

# local imports
from .models import Arc, ArcRef, StageRef


def _json_serial(obj):
    """JSON serializer for model values not serializable by default json code"""
    if isinstance(obj, (StageRef, ArcRef, Arc)):
        return str(obj)
    raise TypeError(f'type {type(obj)} is not serializable')


def json_line(obj) -> str:
    """Single-line JSON, keys in insertion order"""
    return simplejson.dumps(obj, ensure_ascii=False, separators=(', ', ': '), default=_json_serial)
