"""Exception hierarchy for the metaori package.

Every error raised by the library derives from MetaOriError so callers
(CLI, service) can map failures onto stable exit codes / HTTP statuses.
"""


class MetaOriError(Exception):
    """Base class for all metaori errors."""


# --- validation-type errors (CLI exit code 1) ---------------------------------

class InvalidParams(MetaOriError):
    """A parameter set violates its declared invariants."""


class DegeneratePattern(InvalidParams):
    """Flat-pattern triangles collapse to zero area."""


class GeometryConflict(InvalidParams):
    """Unit-cell dimensions are mutually incompatible (e.g. t >= h)."""


class SchemaError(MetaOriError):
    """Config document does not match the published JSON schema."""

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer


class UnitError(MetaOriError):
    """A numeric field is non-finite or dimensionally impossible."""


class InvariantError(MetaOriError):
    """A config value violates a cross-field invariant."""

    def __init__(self, message, invariant=""):
        super().__init__(message)
        self.invariant = invariant


class BadPath(MetaOriError):
    """Sweep parameter path does not address a numeric field."""


# --- solver-type errors (CLI exit code 2) --------------------------------------

class InfeasibleFold(MetaOriError):
    """Requested dihedral causes face interpenetration at the given thickness."""


class ClosureFailure(MetaOriError):
    """No fold state closes the n-unit ring for the given pattern."""


class InfeasibleHeight(MetaOriError):
    """Height outside the kinematically feasible band."""


class SelfIntersection(MetaOriError):
    """Offset surfaces cross during solidification."""

    def __init__(self, message, faces=()):
        super().__init__(message)
        self.faces = tuple(faces)


class WrapFailure(MetaOriError):
    """Radial extrusion depth exceeds the wrap radius."""


class FitError(MetaOriError):
    """Origami does not fit inside the metashell with clearance."""


class AlignmentError(MetaOriError):
    """Component axes cannot be made parallel (degenerate input)."""


class OutOfDomain(MetaOriError):
    """Function evaluated outside its stated domain."""


class ModelDomain(MetaOriError):
    """Reduced-order model asked for a regime it does not cover."""


class NoConvergence(MetaOriError):
    """Iterative solver failed to reach tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NoEquilibrium(NoConvergence):
    """Pseudo-dynamic relaxation stalled without finding an equilibrium."""


class NotBistable(MetaOriError):
    """Configuration has no second stable state."""


class DomainMismatch(MetaOriError):
    """Curves have no overlapping displacement domain."""


class DegenerateVolumeMap(MetaOriError):
    """dV/dH vanishes somewhere on the requested band."""


class OpenCavity(MetaOriError):
    """Facet set does not close a volume."""


# --- I/O-type errors (CLI exit code 3) ------------------------------------------

class InvalidMesh(MetaOriError):
    """Mesh failed validation before export."""


class EmptyMesh(MetaOriError):
    """Mesh has zero triangles."""


class ParseError(MetaOriError):
    """Malformed mesh file."""

    def __init__(self, message, offset=None, line=None):
        super().__init__(message)
        self.offset = offset
        self.line = line


class TruncatedFile(ParseError):
    """File ends before the declared payload."""
