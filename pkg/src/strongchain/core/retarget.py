import math
from fractions import Fraction

from .encoding import normalize_target
from .params import ProtocolParams


class NonPositiveElapsed(ValueError):
    pass


def retarget(window_first_ts, window_last_ts, old_ts: int, old_tw: int,
             params: ProtocolParams) -> tuple[int, int]:
    """Scale both targets by observed/expected window time.

    The factor is clamped to ``[1/retarget_clamp, retarget_clamp]``, the strong
    target is capped at ``max_target`` and rounded down to a compact-encodable
    value, and the weak target keeps the ``old_tw / old_ts`` ratio exactly.
    """
    elapsed = window_last_ts - window_first_ts
    if elapsed <= 0:
        raise NonPositiveElapsed(f"window elapsed time {elapsed} <= 0")
    expected = params.retarget_window * params.target_block_interval
    k = params.retarget_clamp
    elapsed = min(max(Fraction(elapsed), Fraction(expected, k)), Fraction(expected * k))
    new_ts = math.floor(old_ts * elapsed / expected)
    new_ts = normalize_target(max(1, min(new_ts, params.max_target)))
    new_tw = new_ts * old_tw // old_ts
    return new_ts, new_tw
