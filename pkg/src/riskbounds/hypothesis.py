"""Hypothesis classes, truncation, and evaluation on samples.

A hypothesis class is described declaratively (finite list of functions,
truncated linear span, or one-layer neural net) and materialized as a
finite value table: an m x n matrix whose entry (j, k) is the value of
candidate function j at sample point k.  All downstream complexity and
covering computations consume these tables.
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "truncate",
    "GridSpec",
    "Finite",
    "TruncatedLinear",
    "NeuralNet",
    "SequentialSample",
    "FunctionTable",
    "evaluate_class",
    "vc_dimension_bound",
    "class_to_json",
    "class_from_json",
]


def truncate(y, B: float):
    """Clip ``y`` to the interval [-B, B].

    Parameters
    ----------
    y : float or np.ndarray
        Value(s) to truncate.
    B : float
        Truncation level, must be positive.

    Returns
    -------
    Same shape as ``y``: min(max(y, -B), B).  Idempotent and monotone.
    """
    if B <= 0:
        raise ValueError(f"truncation level must be positive, got B={B}")
    return np.clip(y, -B, B)


def logistic(t):
    """Standard logistic CDF 1/(1+e^-t), the default activation."""
    t = np.asarray(t, dtype=float)
    u = np.exp(-np.abs(t))  # overflow-safe in both tails
    return np.where(t >= 0, 1.0, u) / (1.0 + u)


_ACTIVATIONS = {"logistic": logistic}


@dataclass(frozen=True)
class GridSpec:
    """Finite set of parameter vectors used to discretize a parametric class.

    Either ``axes`` (per-coordinate grids, expanded as a cartesian product)
    or ``points`` (explicit array of parameter vectors, one per row) must be
    given.  Resolution is a caller-supplied approximation knob: the table is
    a finite surrogate for the full class.
    """

    axes: tuple | None = None
    points: np.ndarray | None = None

    def resolve(self) -> np.ndarray:
        if self.points is not None:
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            if pts.size == 0:
                raise ValueError("empty parameter grid")
            return pts
        if self.axes is not None and len(self.axes) > 0:
            arrays = [np.asarray(a, dtype=float).ravel() for a in self.axes]
            if any(a.size == 0 for a in arrays):
                raise ValueError("empty parameter grid")
            mesh = np.meshgrid(*arrays, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=1)
        raise ValueError("empty parameter grid: provide axes or points")

    def to_json(self) -> dict:
        if self.points is not None:
            return {"points": np.asarray(self.points, dtype=float).tolist()}
        return {"axes": [np.asarray(a, dtype=float).tolist() for a in self.axes]}

    @staticmethod
    def from_json(doc: dict) -> "GridSpec":
        if "points" in doc and doc["points"] is not None:
            return GridSpec(points=np.asarray(doc["points"], dtype=float))
        return GridSpec(axes=tuple(np.asarray(a, dtype=float) for a in doc["axes"]))


@dataclass(frozen=True)
class Finite:
    """Explicit finite class.

    ``values`` is either a length-m vector of constants (each row is a
    constant function) or an m x n matrix giving each function's values on a
    sample of length n.  ``B`` is the envelope level; defaults to the largest
    absolute value (or 1 for the all-zero class).
    """

    values: np.ndarray
    B: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.size == 0:
            raise ValueError("finite class needs at least one function")
        if not np.all(np.isfinite(vals)):
            raise ValueError("finite class values must be finite")
        if self.B == 0.0:
            object.__setattr__(self, "B", float(max(np.max(np.abs(vals)), 1.0)))
        if self.B <= 0:
            raise ValueError(f"B must be positive, got {self.B}")
        if np.max(np.abs(vals)) > self.B + 1e-12:
            raise ValueError("finite class values exceed the declared level B")


@dataclass(frozen=True)
class TruncatedLinear:
    """Truncated linear span: x -> truncate(theta . basis(x), B).

    Parameters
    ----------
    basis : str
        'linear'   coordinate projections x_1..x_dim (no intercept),
        'affine'   intercept plus coordinates (span dimension dim+1),
        'monomial' powers 1, x, .., x^degree of a scalar covariate.
    dim : int
        Covariate dimension.
    B : float
        Truncation level applied to every fitted value.
    coef_box : tuple[float, float] | None
        Optional per-coordinate box constraint on coefficients; grid points
        outside it are rejected.
    grid : GridSpec | None
        Default discretization of the coefficient vector.
    degree : int | None
        Monomial degree (required iff basis='monomial', with dim=1).
    """

    basis: str
    dim: int
    B: float
    coef_box: tuple | None = None
    grid: GridSpec | None = None
    degree: int | None = None

    def __post_init__(self):
        if self.B <= 0:
            raise ValueError(f"B must be positive, got {self.B}")
        if self.basis not in ("linear", "affine", "monomial"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.basis == "monomial":
            if self.dim != 1 or self.degree is None or self.degree < 0:
                raise ValueError("monomial basis needs dim=1 and degree >= 0")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def span_dim(self) -> int:
        """Dimension of the linear span before truncation."""
        if self.basis == "linear":
            return self.dim
        if self.basis == "affine":
            return self.dim + 1
        return self.degree + 1

    def basis_matrix(self, points: np.ndarray) -> np.ndarray:
        """Design matrix: row k = basis functions evaluated at point k."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            pts = pts.reshape(len(pts), self.dim)
        if self.basis == "linear":
            return pts
        if self.basis == "affine":
            return np.hstack([np.ones((len(pts), 1)), pts])
        x = pts[:, 0]
        return np.vander(x, self.degree + 1, increasing=True)


@dataclass(frozen=True)
class NeuralNet:
    """One-layer network class: x -> c0 + sum_k c_k sigma(a_k . x + b_k).

    ``mode='independent'`` constrains each |c_k| <= B; ``mode='joint'``
    constrains the l1 norm |c_0| + .. + |c_N| <= B.  Parameter vectors are
    laid out as [a (units*dim), b (units), c (units+1)].
    """

    dim: int
    units: int
    B: float
    mode: str = "joint"
    activation: str = "logistic"
    grid: GridSpec | None = None

    def __post_init__(self):
        if self.B <= 0:
            raise ValueError(f"B must be positive, got {self.B}")
        if self.mode not in ("independent", "joint"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.units < 1 or self.dim < 1:
            raise ValueError("units and dim must be >= 1")

    @property
    def param_length(self) -> int:
        return self.units * self.dim + self.units + self.units + 1

    def split_params(self, theta: np.ndarray):
        """Unpack a flat parameter vector into (a, b, c)."""
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.param_length:
            raise ValueError(
                f"parameter vector has length {theta.size}, expected {self.param_length}"
            )
        N, d = self.units, self.dim
        a = theta[: N * d].reshape(N, d)
        b = theta[N * d : N * d + N]
        c = theta[N * d + N :]
        return a, b, c

    def predict(self, theta: np.ndarray, points: np.ndarray) -> np.ndarray:
        a, b, c = self.split_params(theta)
        pts = np.atleast_2d(np.asarray(points, dtype=float)).reshape(-1, self.dim)
        act = _ACTIVATIONS[self.activation]
        hidden = act(pts @ a.T + b)  # (n, units)
        return c[0] + hidden @ c[1:]

    def check_constraints(self, theta: np.ndarray, index: int | None = None):
        _, _, c = self.split_params(theta)
        tol = 1e-9
        where = "" if index is None else f" (grid point {index})"
        if self.mode == "joint":
            if np.sum(np.abs(c)) > self.B + tol:
                raise ValueError(
                    f"output-weight l1 norm {np.sum(np.abs(c)):.6g} exceeds B={self.B}{where}"
                )
        else:
            if np.max(np.abs(c)) > self.B + tol:
                raise ValueError(
                    f"output weight magnitude {np.max(np.abs(c)):.6g} exceeds B={self.B}{where}"
                )


HypothesisClass = Finite | TruncatedLinear | NeuralNet


@dataclass(frozen=True)
class SequentialSample:
    """A length-n sample of covariate vectors with optional responses."""

    points: np.ndarray
    responses: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) < 1:
            raise ValueError("points must be a nonempty (n, dim) array")
        object.__setattr__(self, "points", pts)
        if self.responses is not None:
            resp = np.asarray(self.responses, dtype=float).ravel()
            if len(resp) != len(pts):
                raise ValueError("responses length must match points length")
            object.__setattr__(self, "responses", resp)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class FunctionTable:
    """m x n matrix of candidate-function values plus the pointwise envelope.

    envelope[k] = max_j |values[j, k]|, exact for finite tables.
    """

    values: np.ndarray
    envelope: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.size == 0:
            raise ValueError("table must have at least one row and column")
        if not np.all(np.isfinite(vals)):
            raise ValueError("table entries must be finite")
        object.__setattr__(self, "values", vals)
        env = np.max(np.abs(vals), axis=0)
        if self.envelope is not None:
            given = np.asarray(self.envelope, dtype=float).ravel()
            if given.shape != env.shape or not np.array_equal(given, env):
                raise ValueError("envelope must equal the column-wise max of |values|")
        object.__setattr__(self, "envelope", env)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def envelope_l2(self) -> float:
        """l2 norm of the envelope vector, sqrt(sum_k H_k^2)."""
        return float(np.sqrt(np.sum(self.envelope**2)))

    def to_csv(self, path: str):
        """Write the table (rows=functions, cols=points) as CSV."""
        np.savetxt(path, self.values, delimiter=",")


def evaluate_class(
    cls: HypothesisClass,
    sample: SequentialSample,
    grid: GridSpec | None = None,
) -> FunctionTable:
    """Materialize a hypothesis class as a value table on a sample.

    Rows are grid points (candidate functions), columns are the sample
    points.  Truncated classes produce entries in [-B, B].  Raises if the
    grid is empty or a grid point violates the class constraints.
    """
    if isinstance(cls, Finite):
        vals = cls.values
        if vals.ndim == 1:
            vals = np.tile(vals[:, None], (1, sample.n))
        elif vals.shape[1] != sample.n:
            raise ValueError(
                f"finite class table has {vals.shape[1]} columns, sample has {sample.n}"
            )
        return FunctionTable(vals)

    spec = grid if grid is not None else cls.grid
    if spec is None:
        raise ValueError("parametric class needs a grid spec")
    params = spec.resolve()

    if isinstance(cls, TruncatedLinear):
        if params.shape[1] != cls.span_dim:
            raise ValueError(
                f"grid vectors have length {params.shape[1]}, span dimension is {cls.span_dim}"
            )
        if cls.coef_box is not None:
            lo, hi = cls.coef_box
            bad = np.where((params < lo - 1e-12) | (params > hi + 1e-12))[0]
            if bad.size:
                raise ValueError(
                    f"grid point {bad[0]} outside the coefficient box [{lo}, {hi}]"
                )
        design = cls.basis_matrix(sample.points)
        return FunctionTable(truncate(params @ design.T, cls.B))

    if isinstance(cls, NeuralNet):
        rows = []
        for i, theta in enumerate(params):
            cls.check_constraints(theta, index=i)
            rows.append(cls.predict(theta, sample.points))
        values = np.vstack(rows)
        if cls.mode == "joint" and np.max(np.abs(values)) > 2 * cls.B + 1e-9:
            # joint powering with sigma in [0,1] forces |g| <= 2B
            raise ValueError("network outputs exceed 2B; activation out of range?")
        return FunctionTable(values)

    raise TypeError(f"unsupported class type {type(cls).__name__}")


def vc_dimension_bound(cls: HypothesisClass) -> int | None:
    """Upper bound on the VC dimension of the truncated class.

    A truncated span of dimension d has VC dimension at most d+1.  Finite
    and neural-net classes return None (unknown; only entropy estimates are
    available for them).
    """
    if isinstance(cls, TruncatedLinear):
        return cls.span_dim + 1
    return None


def class_to_json(cls: HypothesisClass) -> str:
    """Serialize a class descriptor to a JSON document."""
    if isinstance(cls, Finite):
        doc = {"kind": "finite", "values": cls.values.tolist(), "B": cls.B}
    elif isinstance(cls, TruncatedLinear):
        doc = {
            "kind": "truncated_linear",
            "basis": cls.basis,
            "dim": cls.dim,
            "B": cls.B,
            "coef_box": list(cls.coef_box) if cls.coef_box else None,
            "grid": cls.grid.to_json() if cls.grid else None,
            "degree": cls.degree,
        }
    elif isinstance(cls, NeuralNet):
        doc = {
            "kind": "neural_net",
            "dim": cls.dim,
            "units": cls.units,
            "B": cls.B,
            "mode": cls.mode,
            "activation": cls.activation,
            "grid": cls.grid.to_json() if cls.grid else None,
        }
    else:
        raise TypeError(f"unsupported class type {type(cls).__name__}")
    return json.dumps(doc)


def class_from_json(doc: str | dict) -> HypothesisClass:
    """Inverse of class_to_json."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("kind")
    if kind == "finite":
        return Finite(values=np.asarray(doc["values"], dtype=float), B=doc.get("B", 0.0))
    if kind == "truncated_linear":
        return TruncatedLinear(
            basis=doc["basis"],
            dim=doc["dim"],
            B=doc["B"],
            coef_box=tuple(doc["coef_box"]) if doc.get("coef_box") else None,
            grid=GridSpec.from_json(doc["grid"]) if doc.get("grid") else None,
            degree=doc.get("degree"),
        )
    if kind == "neural_net":
        return NeuralNet(
            dim=doc["dim"],
            units=doc["units"],
            B=doc["B"],
            mode=doc.get("mode", "joint"),
            activation=doc.get("activation", "logistic"),
            grid=GridSpec.from_json(doc["grid"]) if doc.get("grid") else None,
        )
    raise ValueError(f"unknown class kind {kind!r}")
