"""Exception hierarchy shared by all modules."""


class MelError(Exception):
    """Base class for every error raised by this package."""


class InputError(MelError):
    """Malformed or inadmissible input (maps to CLI exit code 2)."""


class UnsupportedField(InputError):
    pass


class InvalidFormEntry(InputError):
    pass


class FieldMismatch(InputError):
    pass


class InvalidPlace(InputError):
    pass


class VirtualFormNotClassifiable(InputError):
    pass


class ParseError(InputError):
    pass


class MissingSeed(InputError):
    def __init__(self, atom, measure):
        super().__init__(f"no seed for atom [{atom}] under measure {measure!r}")
        self.atom = atom
        self.measure = measure


class MeasureMismatch(InputError):
    pass


class FanValidation(InputError):
    def __init__(self, diagnostics):
        super().__init__("invalid fan: " + "; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class NoSuchCone(InputError):
    pass


class InvalidSubdivisionRay(InputError):
    pass


class Unsupported(InputError):
    pass


class NotAGoodClosure(InputError):
    pass


class MissingAmbient(InputError):
    pass


class ClosureValidation(InputError):
    def __init__(self, diagnostics):
        super().__init__("invalid closure: " + "; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class UnsupportedClosure(InputError):
    pass


class NotProper(InputError):
    pass


class CrossCheckMismatch(MelError):
    """Two independent evaluation routes disagreed (an identity failure)."""

    def __init__(self, first, second):
        super().__init__(f"cross-check mismatch: {first} != {second}")
        self.first = first
        self.second = second
