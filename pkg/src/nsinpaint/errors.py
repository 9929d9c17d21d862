"""Exception hierarchy for the inpainting library.

Every failure mode raised by the public API is a subclass of
:class:`InpaintError`, so callers can catch one base class.  Shape and
length violations additionally subclass :class:`ValueError`.
"""


class InpaintError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(InpaintError, ValueError):
    """Two grids that must share a shape do not."""


class LengthMismatch(InpaintError, ValueError):
    """A vector does not match the expected region size."""


class EmptyMask(InpaintError, ValueError):
    """The inpainting mask contains no nonzero pixel."""


class MaskTouchesBorder(InpaintError, ValueError):
    """The masked region violates the 3-pixel border margin."""


class InvalidDomain(InpaintError):
    """An inpainting domain is unusable for operator construction."""


class NotPositiveDefinite(InpaintError):
    """The smoothing system failed to factor; internal error for valid domains."""


class SorDidNotConverge(InpaintError):
    """Relaxation hit its iteration cap before reaching tolerance."""


class StepUnderflow(InpaintError):
    """No step above the minimum length decreases the energy."""


class NonFiniteEnergy(InpaintError):
    """Energy or gradient became NaN/inf during minimization."""


class NonFiniteValues(InpaintError):
    """Image values became NaN/inf during the transport evolution."""


class ZeroEnergy(InpaintError, ValueError):
    """Condition numbers are undefined at zero energy."""


class UnsupportedFormat(InpaintError, ValueError):
    """Image file is not 8-bit PGM (P2/P5) or 8-bit gray/RGB PNG."""


class AllZeroImage(InpaintError, ValueError):
    """An all-zero image cannot be normalized."""


class IoError(InpaintError):
    """File could not be read or written."""


class FactorTooSmall(InpaintError, ValueError):
    """Interpolation factor must be an integer >= 2."""
