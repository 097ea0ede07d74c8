"""Exception hierarchy. Every error carries the module that raised it."""


class FlatwalkError(Exception):
    module = "flatwalk"


def _make(name, module, base=FlatwalkError):
    return type(name, (base,), {"module": module})


ClosureViolation = _make("ClosureViolation", "flat-core")
GluingMismatch = _make("GluingMismatch", "flat-core")
DegenerateTriangle = _make("DegenerateTriangle", "flat-core")
NonPositiveDeterminant = _make("NonPositiveDeterminant", "flat-core")
NonTermination = _make("NonTermination", "flat-core")
CatalogError = _make("CatalogError", "flat-core")

RankDeficiency = _make("RankDeficiency", "saddle-scan")
BudgetExceeded = _make("BudgetExceeded", "saddle-scan")

NotPeriodic = _make("NotPeriodic", "cylinder-lab")
NonFieldDirection = _make("NonFieldDirection", "cylinder-lab")
SpanFailure = _make("SpanFailure", "cylinder-lab")
InconsistentLengths = _make("InconsistentLengths", "cylinder-lab")
NonPositiveHeight = _make("NonPositiveHeight", "cylinder-lab")

ParallelOverlap = _make("ParallelOverlap", "intersect")
ParallelDirection = _make("ParallelDirection", "intersect")
NotTransversal = _make("NotTransversal", "intersect")

SeedNotExtendable = _make("SeedNotExtendable", "regular-tri")
TwistPreconditionFailed = _make("TwistPreconditionFailed", "regular-tri")

UnknownSurface = _make("UnknownSurface", "geodesic-count")
StabilizerCheckFailed = _make("StabilizerCheckFailed", "geodesic-count")
DepthExceeded = _make("DepthExceeded", "geodesic-count")
NotRealizable = _make("NotRealizable", "geodesic-count")

UsageError = _make("UsageError", "cli")
