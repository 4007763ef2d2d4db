class NcritError(Exception):
    """Base class for errors raised by ncrit."""


class FieldMismatchError(NcritError, ValueError):
    pass


class ShapeError(NcritError, ValueError):
    pass


class SingularMatrixError(NcritError, ZeroDivisionError):
    """A matrix (or division-algebra element) that had to be inverted is singular."""


class DenominatorVanishesError(NcritError, ZeroDivisionError):
    pass


class FormulaSyntaxError(NcritError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotDefinedAtShiftError(NcritError):
    pass


class InfeasibleParametersError(NcritError, ValueError):
    pass


class CertificationError(NcritError):
    pass


class NotInSpanError(NcritError, ValueError):
    pass


class EncodingCollisionError(NcritError):
    pass
