"""Exception hierarchy shared by all kokonet modules."""


class KokonetError(Exception):
    """Base class for all domain errors raised by this package."""


class NotElliptic(KokonetError):
    """A signed sum alpha +- beta +- gamma +- delta vanishes mod 2*pi."""


class InvalidSeed(KokonetError):
    """A quasi-symmetric seed violates the barred-angle window."""


class PhaseShiftInconsistent(KokonetError):
    """The phase-shift target lies outside the range of dn on its interval."""


class EllipticOverflow(KokonetError):
    """Evaluation too close to a pole of the elliptic function."""


class OutOfRange(KokonetError):
    """Flexion parameter outside the valid intervals."""


class NegativeDiscriminant(KokonetError):
    """D(t) < 0 inside a supposedly valid interval."""


class PropagationDead(KokonetError):
    """The dihedral transfer chain has no real solution at some vertex."""

    def __init__(self, vertex: int, message: str = ""):
        self.vertex = vertex
        super().__init__(message or f"no transfer solution at vertex {vertex}")


class NonRealAngles(KokonetError):
    """Search parameters do not correspond to real flat angles."""


class DegenerateQuad(KokonetError):
    """The central quadrilateral has no positive-length solution."""


class EmbedInconsistent(KokonetError):
    """A 3D embedding failed its measure-back or face-shape invariants."""
