"""Exception types raised across the package."""


class OmegaForgeError(Exception):
    """Base class for all package errors."""


class ValidationError(OmegaForgeError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid system: " + "; ".join(v.message for v in report.violations))


class SubResolutionError(OmegaForgeError, ValueError):
    def __init__(self, detail=""):
        msg = "sub-resolution scale"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NoChainError(OmegaForgeError):
    def __init__(self, x, y):
        self.x, self.y = x, y
        super().__init__(f"no chain from {x} to {y}")


class StarRefinementError(OmegaForgeError):
    def __init__(self, detail=""):
        super().__init__("cannot star-refine at resolution floor" + (f": {detail}" if detail else ""))


class IsolationError(OmegaForgeError):
    def __init__(self, detail=""):
        super().__init__("isolation impossible" + (f": {detail}" if detail else ""))


class NotChainTransitiveError(OmegaForgeError):
    def __init__(self, scale, witness):
        self.scale, self.witness = scale, witness
        super().__init__(f"not chain transitive at scale {scale}: no chain {witness[0]} -> {witness[1]}")


class LoopConstructionError(OmegaForgeError, RuntimeError):
    def __init__(self, detail=""):
        super().__init__("loop construction failed" + (f": {detail}" if detail else ""))


class CertificateError(OmegaForgeError):
    def __init__(self, stage, index):
        self.stage, self.index = stage, index
        super().__init__(f"continuity certificate fails at orbit index {index} (stage {stage})")


class NotInjectiveError(OmegaForgeError):
    def __init__(self, witness, image):
        self.witness, self.image = witness, image
        super().__init__(f"f not injective: points {witness[0]} and {witness[1]} both map to {image}")


class SftNotTransitiveError(OmegaForgeError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"SFT not transitive: symbol {witness[1]} unreachable from {witness[0]}")
