"""Exception types raised by :mod:`sdentropy`."""


class InvalidArgumentError(ValueError):
    """A parameter is outside the supported domain."""


class SingularMatrixError(ArithmeticError):
    """A channel matrix is (numerically) rank deficient."""


class NumericDomainError(ArithmeticError):
    """A numeric routine was given input it cannot handle (e.g. non-PD)."""


class OracleSizeError(RuntimeError):
    """Exhaustive enumeration would exceed the configured component cap."""

    def __init__(self, n_components, cap):
        self.n_components = n_components
        self.cap = cap
        super().__init__(
            f"exhaustive oracle needs {n_components} mixture components, "
            f"cap is {cap}"
        )


class SearchSizeError(RuntimeError):
    """A tree search would hold more live partial paths than allowed."""

    def __init__(self, n_paths, cap):
        self.n_paths = n_paths
        self.cap = cap
        super().__init__(f"tree search reached {n_paths} live paths, cap is {cap}")
