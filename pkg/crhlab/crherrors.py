class CRHError(Exception):
    """Base class for errors raised by crhlab."""


class NonFiniteError(CRHError, ArithmeticError):
    def __init__(self, message: str, layer_index: int | None = None):
        if layer_index is not None:
            message = f"{message} (layer {layer_index})"
        super().__init__(message)
        self.layer_index = layer_index


class UndefinedAlignmentError(CRHError, ValueError):
    pass


class InsufficientDataError(CRHError, ValueError):
    pass


class ShapeError(CRHError, ValueError):
    pass


class ConfigError(CRHError, ValueError):
    def __init__(self, key_path: str, message: str):
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path


class DivergedRunError(CRHError):
    def __init__(self, run_dir, step: int, message: str = 'non-finite loss'):
        super().__init__(f"run {run_dir} diverged at step {step}: {message}")
        self.run_dir = run_dir
        self.step = step


class ChecksumError(CRHError, IOError):
    pass
