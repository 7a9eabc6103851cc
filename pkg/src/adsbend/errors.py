"""Exception types raised across the package.

Every error derives from AdsBendError. ValidationError covers bad input and
failed preconditions (CLI exit code 1); SolverError covers numerical
non-convergence (CLI exit code 2).
"""


class AdsBendError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update({k: _plain(v) for k, v in self.details.items()})
        return out


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


class ValidationError(AdsBendError, ValueError):
    pass


class SolverError(AdsBendError, RuntimeError):
    pass


class CoincidentPoints(ValidationError): pass
class DegenerateTriple(ValidationError): pass
class OrientationMismatch(ValidationError): pass
class NotDisjoint(ValidationError): pass
class EndpointCollision(ValidationError): pass
class UndefinedAtEndpoint(ValidationError): pass
class ImageCrosses(ValidationError): pass
class InvalidLamination(ValidationError): pass
class NonRationalWeights(ValidationError): pass
class BadK(ValidationError): pass
class MixedVertex(ValidationError): pass
class ParityObstruction(ValidationError): pass
class DegenerateM(ValidationError): pass
class InvalidGraph(ValidationError): pass
class NotNull(ValidationError): pass
class ZeroVector(ValidationError): pass
class DegenerateInput(ValidationError): pass
class NoChartFound(ValidationError): pass
class NotAcausal(ValidationError): pass
class ChartFailure(ValidationError): pass
class DegenerateHull(ValidationError): pass
class DegenerateEdge(ValidationError): pass
class NonTreeAdjacency(ValidationError): pass
class TooFewPoints(ValidationError): pass
class OrientationViolation(ValidationError): pass
class NotWeakFilling(ValidationError): pass
class SplitObstruction(ValidationError): pass
class CombinatoricsMismatch(SolverError): pass


class NonConvergence(SolverError):
    def __init__(self, message="", best=None, residual=None, **details):
        super().__init__(message, residual=residual, **details)
        self.best = best
        self.residual = residual
