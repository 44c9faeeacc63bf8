"""Error types shared by all modules.

Every error carries a stable ``code`` string; the CLI reports it verbatim.
"""

from __future__ import annotations


class KMError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.context = context

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "context": _jsonable(self.context)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class ParseError(KMError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, position: int | None = None, **context):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message, position=position, **context)
        self.position = position


class UnknownVariable(ParseError):
    code = "UNKNOWN_VARIABLE"


class InputError(KMError):
    code = "INPUT_ERROR"


class RankMismatch(KMError):
    code = "RANK_MISMATCH"


class ZeroInput(KMError):
    code = "ZERO_INPUT"


class NotInMaximalIdeal(KMError):
    code = "NOT_IN_MAXIMAL_IDEAL"


class ImageNotInKernel(KMError):
    code = "IMAGE_NOT_IN_KERNEL"


class NotAComplex(KMError):
    code = "NOT_A_COMPLEX"


class RelationViolated(KMError):
    code = "RELATION_VIOLATED"


class NotFiniteLength(KMError):
    code = "NOT_FINITE_LENGTH"


class NotFiniteColength(KMError):
    code = "NOT_FINITE_COLENGTH"


class StabilizationNotReached(KMError):
    code = "STABILIZATION_NOT_REACHED"


class TermUndefined(KMError):
    code = "TERM_UNDEFINED"


class TransformNotFound(KMError):
    code = "TRANSFORM_NOT_FOUND"


class ReductionNotFound(KMError):
    code = "REDUCTION_NOT_FOUND"


class UnitJacobianEntry(KMError):
    code = "UNIT_JACOBIAN_ENTRY"


class NotIsolated(KMError):
    code = "NOT_ISOLATED"


class Disagreement(KMError):
    code = "DISAGREEMENT"
