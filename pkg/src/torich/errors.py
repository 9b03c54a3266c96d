"""Exception hierarchy with machine-readable codes and witness payloads.

Every structured failure carries a ``code`` string (stable across releases,
suitable for CLI output) and a ``witness`` dict with whatever concrete data
demonstrates the failure: an offending cone pair, a weight, a JSON path.
"""


class ToricError(Exception):
    code = "E_GENERIC"

    def __init__(self, message, **witness):
        super().__init__(message)
        self.witness = witness

    def payload(self):
        return {"code": self.code, "message": str(self), "witness": _plain(self.witness)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


class RankMismatchError(ToricError):
    code = "E_RANK"


class NotConeError(ToricError):
    code = "E_NOT_CONE"


class NotSmoothError(ToricError):
    code = "E_NOT_SMOOTH"


class FanAxiomError(ToricError):
    code = "E_FAN_AXIOM"


class StarClosureError(ToricError):
    code = "E_STAR"


class CartierError(ToricError):
    code = "E_CARTIER"


class UnboundedError(ToricError):
    code = "E_UNBOUNDED"


class ChartError(ToricError):
    code = "E_CHART"


class NotFaceError(ToricError):
    code = "E_NOT_FACE"


class SmoothCoverError(ToricError):
    # Reserved for log-form charts the smooth-face rule could not cover.
    # The shipped rule computes sections over the smooth locus exactly, so
    # no current code path raises this; kept for interface stability.
    code = "E_SMOOTH_COVER"


class FieldSpecError(ToricError):
    code = "E_FIELD"


class StabilizationError(ToricError):
    code = "E_NO_STABILIZE"


class MorphismError(ToricError):
    code = "E_NOT_COMPATIBLE"


class SceneError(ToricError):
    code = "E_PARSE"


class MissingIngredientError(ToricError):
    code = "E_MISSING_INGREDIENT"
