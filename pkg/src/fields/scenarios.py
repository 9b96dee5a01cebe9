"""
Scenario generators for connection fields.

A scenario is written ``name(key=value, key=value)``; ``name`` alone means
no parameters. Registered generators:

- ``zero``: every coefficient 0
- ``constants(k=1, w3=0.7, ...)``: constant named coefficients
- ``abelian(theta=sin(x)cos(t))``: gradient field k=theta_x, m3=theta_y, w3=theta_t
- ``analytic(k=..., sigma=..., w1=...)``: closed-form coefficients
- ``pure_gauge(x=[..], y=[..], t=[..])``: manufactured flat connection
- ``random_smooth(seed=42, amplitude=1, bandwidth=2)``: truncated trigonometric series
- ``perturbed(seed=1, epsilon=0.01, bandwidth=2, x=[..], ...)``: pure gauge plus
  epsilon times a random smooth field

Expressions may use the grid axes, ``pi``, numbers, + - * / and integer
powers, and the functions sin, cos and exp. They are differentiated in
closed form with sympy, so every generator attaches exact derivatives.
"""

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from loguru import logger
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention
from src.algebra.lie import commutator, expm, from_coeffs, to_coeffs
from src.errors import DomainError, ScenarioError
from src.fields.field import (
    NAMED_COEFFICIENTS,
    ConnectionField,
    MatrixField,
    canonical_coefficient,
)
from src.fields.grid import Grid

ALLOWED_FUNCTIONS = (sp.sin, sp.cos, sp.exp)
TRANSFORMATIONS = standard_transformations + (implicit_multiplication_application, convert_xor)
MAX_BANDWIDTH = 8
MAX_AMPLITUDE = 100.0

# default non-commuting generators (slot triples) for pure gauge scenarios
DEFAULT_GENERATORS: Dict[str, Tuple[float, float, float]] = {
    "x": (0.7, 0.2, -0.3),
    "y": (-0.4, 0.5, 0.1),
    "t": (0.3, -0.6, 0.8),
}

_SPEC_PATTERN = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*(?:\((.*)\))?\s*$", re.DOTALL)


@dataclass
class ScenarioSample:
    """A sampled connection, plus the frame g when the generator knows it."""

    connection: ConnectionField
    frame: Optional[MatrixField] = None


Generator = Callable[[Grid, Dict[str, str], "ScenarioContext"], ScenarioSample]


@dataclass(frozen=True)
class ScenarioContext:
    representation: str = "so3"
    beta: int = 1
    convention: SignConvention = DEFAULT_CONVENTION
    seed: Optional[int] = None


SCENARIOS: Dict[str, Generator] = {}


def register_scenario(name: str) -> Callable[[Generator], Generator]:
    def decorator(fn: Generator) -> Generator:
        SCENARIOS[name] = fn
        return fn

    return decorator


def _split_top_level(text: str) -> List[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ScenarioError(f"Unbalanced brackets in scenario parameters: {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ScenarioError(f"Unbalanced brackets in scenario parameters: {text!r}")
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def parse_scenario(spec: str) -> Tuple[str, Dict[str, str]]:
    """Split ``name(key=value, ...)`` into the name and raw parameter strings."""
    match = _SPEC_PATTERN.match(spec or "")
    if not match:
        raise ScenarioError(f"Cannot parse scenario spec {spec!r}")
    name, body = match.group(1), match.group(2) or ""
    params: Dict[str, str] = {}
    for part in _split_top_level(body):
        if "=" not in part:
            raise ScenarioError(f"Scenario parameter {part!r} is not key=value")
        key, value = part.split("=", 1)
        key = key.strip()
        if key in params:
            raise ScenarioError(f"Scenario parameter {key!r} given twice")
        params[key] = value.strip()
    return name, params


def parse_expression(text: str, axes: Sequence[str]) -> sp.Expr:
    """Parse a closed-form expression restricted to sin, cos, exp and polynomials."""
    symbols = {a: sp.Symbol(a, real=True) for a in axes}
    local = {**symbols, "sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "pi": sp.pi}
    try:
        expr = sp.sympify(parse_expr(text, local_dict=local, transformations=TRANSFORMATIONS))
    except Exception as e:
        raise ScenarioError(f"Cannot parse expression {text!r}: {e}") from e
    unknown = {str(s) for s in expr.free_symbols} - set(axes)
    if unknown:
        raise ScenarioError(f"Expression {text!r} uses unknown symbols {sorted(unknown)}")
    for fn in expr.atoms(sp.Function):
        if fn.func not in ALLOWED_FUNCTIONS:
            raise ScenarioError(f"Function {fn.func} is not allowed in {text!r}")
    for power in expr.atoms(sp.Pow):
        if power.base.free_symbols and not (power.exp.is_Integer and power.exp >= 0):
            raise ScenarioError(f"Only non-negative integer powers are allowed: {power}")
    if expr.has(sp.I) or expr.has(sp.zoo) or expr.has(sp.nan):
        raise ScenarioError(f"Expression {text!r} is not a finite real expression")
    return expr


def evaluate_expression(expr: sp.Expr, grid: Grid) -> np.ndarray:
    symbols = [sp.Symbol(a, real=True) for a in grid.axes]
    fn = sp.lambdify(symbols, expr, modules="numpy")
    mesh = grid.mesh()
    values = fn(*(mesh[a] for a in grid.axes))
    return np.broadcast_to(np.asarray(values, dtype=float), grid.shape).copy()


def _float(params: Dict[str, str], key: str, default: float) -> float:
    try:
        return float(params.pop(key, default))
    except ValueError:
        raise ScenarioError(f"Parameter {key!r} must be a number") from None


def _int(params: Dict[str, str], key: str, default: int) -> int:
    raw = params.pop(key, default)
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioError(f"Parameter {key!r} must be an integer") from None
    if not value.is_integer():
        raise ScenarioError(f"Parameter {key!r} must be an integer, got {raw!r}")
    return int(value)


def parse_triple(text: str) -> Tuple[float, float, float]:
    """Parse ``[a,b,c]``, ``a:b:c`` or ``a;b;c`` into a float triple."""
    body = text.strip().strip("[]()")
    parts = [p for p in re.split(r"[,:;\s]+", body) if p]
    if len(parts) != 3:
        raise ScenarioError(f"Expected a triple, got {text!r}")
    try:
        triple = tuple(float(p) for p in parts)
    except ValueError:
        raise ScenarioError(f"Triple entries must be numbers: {text!r}") from None
    if not all(np.isfinite(triple)):
        raise ScenarioError(f"Triple entries must be finite: {text!r}")
    return triple  # type: ignore[return-value]


def _reject_leftovers(name: str, params: Dict[str, str]) -> None:
    if params:
        raise ScenarioError(f"Unknown parameters for scenario {name!r}: {sorted(params)}")


def _connection(
    grid: Grid,
    coefficients: Dict[str, np.ndarray],
    derivatives: Dict[str, Dict[str, np.ndarray]],
    ctx: ScenarioContext,
    scenario: str,
    seed: Optional[int] = None,
) -> ConnectionField:
    return ConnectionField(
        grid=grid,
        coefficients=coefficients,
        derivatives=derivatives,
        representation=ctx.representation,
        beta=ctx.beta,
        scenario=scenario,
        seed=seed,
    )


def _zero_derivatives(grid: Grid) -> Dict[str, Dict[str, np.ndarray]]:
    zeros = np.zeros(grid.shape + (3,))
    return {a: {w: zeros for w in grid.axes} for a in grid.axes}


@register_scenario("zero")
def _zero(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    _reject_leftovers("zero", params)
    coefficients = {a: np.zeros(grid.shape + (3,)) for a in grid.axes}
    return ScenarioSample(_connection(grid, coefficients, _zero_derivatives(grid), ctx, "zero"))


def _named_to_axes(grid: Grid, names: Sequence[str]) -> None:
    for name in names:
        axis, _ = NAMED_COEFFICIENTS[name]
        if axis not in grid.axes:
            raise ScenarioError(f"Coefficient {name!r} needs axis {axis!r}, not in this grid")


@register_scenario("constants")
def _constants(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    coefficients = {a: np.zeros(grid.shape + (3,)) for a in grid.axes}
    for key, raw in params.items():
        try:
            name = canonical_coefficient(key)
        except DomainError as e:
            raise ScenarioError(str(e)) from None
        _named_to_axes(grid, [name])
        try:
            value = float(raw)
        except ValueError:
            raise ScenarioError(f"Constant {key!r} must be a number, got {raw!r}") from None
        axis, slot = NAMED_COEFFICIENTS[name]
        coefficients[axis][..., slot] = value
    return ScenarioSample(
        _connection(grid, coefficients, _zero_derivatives(grid), ctx, "constants")
    )


def _from_expressions(
    grid: Grid, expressions: Dict[str, sp.Expr], ctx: ScenarioContext, scenario: str
) -> ScenarioSample:
    coefficients = {a: np.zeros(grid.shape + (3,)) for a in grid.axes}
    derivatives = {a: {w: np.zeros(grid.shape + (3,)) for w in grid.axes} for a in grid.axes}
    for name, expr in expressions.items():
        axis, slot = NAMED_COEFFICIENTS[name]
        coefficients[axis][..., slot] = evaluate_expression(expr, grid)
        for wrt in grid.axes:
            d = sp.diff(expr, sp.Symbol(wrt, real=True))
            derivatives[axis][wrt][..., slot] = evaluate_expression(d, grid)
    return ScenarioSample(_connection(grid, coefficients, derivatives, ctx, scenario))


@register_scenario("analytic")
def _analytic(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    expressions = {}
    for key, raw in params.items():
        try:
            name = canonical_coefficient(key)
        except DomainError as e:
            raise ScenarioError(str(e)) from None
        _named_to_axes(grid, [name])
        expressions[name] = parse_expression(raw, grid.axes)
    return _from_expressions(grid, expressions, ctx, "analytic")


@register_scenario("abelian")
def _abelian(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    if "theta" not in params:
        raise ScenarioError("Scenario 'abelian' needs a theta=<expression> parameter")
    theta = parse_expression(params.pop("theta"), grid.axes)
    _reject_leftovers("abelian", params)
    # every axis uses the k-slot, so all values lie in one abelian subalgebra
    slot_names = {"x": "k", "y": "m3", "t": "w3"}
    expressions = {
        slot_names[a]: sp.diff(theta, sp.Symbol(a, real=True)) for a in grid.axes
    }
    return _from_expressions(grid, expressions, ctx, "abelian")


def make_pure_gauge(
    generators: Sequence[np.ndarray],
    grid: Grid,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> Tuple[MatrixField, ConnectionField]:
    """
    Manufactured flat connection from one constant generator per axis.

    g = expm(u1 X1) expm(u2 X2) ... in axis order; the connection along axis
    j is Ad_{P_j} X_j with P_j the product of the earlier factors. Its
    closed-form derivatives are d_i A_j = [A_i, A_j] for i < j and 0
    otherwise, so the zero-curvature residuals vanish without differencing.
    """
    mats = [np.asarray(x) for x in generators]
    if len(mats) != grid.dimension:
        raise DomainError(f"Need {grid.dimension} generators for a {grid.dimension}D grid, got {len(mats)}")
    size = mats[0].shape
    if any(m.shape != size for m in mats) or size not in ((3, 3), (2, 2)):
        raise DomainError("Generators must all be 3x3 (so3) or all be 2x2 (su2)")
    representation = "so3" if size == (3, 3) else "su2"

    dim = grid.dimension
    factors = []
    for i, (axis, x) in enumerate(zip(grid.axes, mats)):
        u = grid.coordinates(axis)
        e = expm(u[:, None, None] * x)
        shape = [1] * dim
        shape[i] = len(u)
        factors.append(e.reshape(tuple(shape) + size))

    identity = np.eye(size[0], dtype=complex if representation == "su2" else float)
    prefix = np.broadcast_to(identity, (1,) * dim + size)
    components: List[np.ndarray] = []
    for factor, x in zip(factors, mats):
        ad = prefix @ x @ np.conj(np.swapaxes(prefix, -1, -2))
        components.append(np.broadcast_to(ad, grid.shape + size))
        prefix = prefix @ factor
    frame_values = np.broadcast_to(prefix, grid.shape + size).copy()

    prefactor = convention.prefactor
    coefficients, derivatives = {}, {}
    zeros = np.zeros(grid.shape + (3,))
    for j, axis in enumerate(grid.axes):
        coefficients[axis] = to_coeffs(components[j], representation, prefactor)
        derivatives[axis] = {}
        for i, wrt in enumerate(grid.axes):
            if i < j:
                d = commutator(components[i], components[j])
                derivatives[axis][wrt] = to_coeffs(d, representation, prefactor)
            else:
                derivatives[axis][wrt] = zeros
    connection = ConnectionField(
        grid=grid,
        coefficients=coefficients,
        derivatives=derivatives,
        representation=representation,
        scenario="pure_gauge",
    )
    frame = MatrixField(
        grid,
        frame_values,
        {axis: components[i] @ frame_values for i, axis in enumerate(grid.axes)},
    )
    return frame, connection


def _generators_from_params(
    grid: Grid, params: Dict[str, str], ctx: ScenarioContext
) -> List[np.ndarray]:
    triples = []
    for axis in grid.axes:
        raw = params.pop(axis, None)
        triples.append(parse_triple(raw) if raw is not None else DEFAULT_GENERATORS[axis])
    if ctx.beta != 1:
        raise ScenarioError("Pure gauge scenarios need beta=+1")
    return [from_coeffs(c, ctx.representation, 1, ctx.convention.prefactor) for c in triples]


@register_scenario("pure_gauge")
def _pure_gauge(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    generators = _generators_from_params(grid, params, ctx)
    _reject_leftovers("pure_gauge", params)
    frame, connection = make_pure_gauge(generators, grid, ctx.convention)
    return ScenarioSample(connection, frame)


def trig_series(
    rng: np.random.Generator, grid: Grid, bandwidth: int, amplitude: float, count: int
) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """
    ``count`` real trigonometric series sum_n a_n cos(n.x) + b_n sin(n.x) over
    integer wave vectors 0 <= n_i <= bandwidth, with their exact derivatives.
    """
    modes = np.array(list(itertools.product(range(bandwidth + 1), repeat=grid.dimension)), dtype=float)
    scale = amplitude / np.sqrt(len(modes))
    a = rng.uniform(-1.0, 1.0, size=(count, len(modes))) * scale
    b = rng.uniform(-1.0, 1.0, size=(count, len(modes))) * scale
    mesh = grid.mesh()
    phase = sum(
        np.asarray(mesh[axis])[..., None] * modes[:, i] for i, axis in enumerate(grid.axes)
    )
    phase = np.broadcast_to(phase, grid.shape + (len(modes),))
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    values = cos_p @ a.T + sin_p @ b.T
    derivatives = {
        axis: (-sin_p * modes[:, i]) @ a.T + (cos_p * modes[:, i]) @ b.T
        for i, axis in enumerate(grid.axes)
    }
    return values, derivatives


def make_random_smooth(
    seed: int,
    amplitude: float,
    bandwidth: int,
    grid: Grid,
    representation: str = "so3",
    beta: int = 1,
) -> ConnectionField:
    """
    Smooth, generically non-flat connection with reproducible coefficients.

    Draws come from a counter-based Philox stream keyed by ``seed`` in a fixed
    order (axis by axis, cosine amplitudes then sine amplitudes), so equal
    inputs give bit-identical fields.
    """
    if seed < 0:
        raise ScenarioError(f"seed must be non-negative, got {seed}")
    if not 0.0 <= amplitude <= MAX_AMPLITUDE:
        raise ScenarioError(f"amplitude must lie in [0, {MAX_AMPLITUDE}], got {amplitude}")
    if not 1 <= bandwidth <= MAX_BANDWIDTH:
        raise ScenarioError(f"bandwidth must lie in [1, {MAX_BANDWIDTH}], got {bandwidth}")
    rng = np.random.Generator(np.random.Philox(seed))
    coefficients, derivatives = {}, {}
    for axis in grid.axes:
        values, d = trig_series(rng, grid, bandwidth, amplitude, 3)
        coefficients[axis] = values
        derivatives[axis] = d
    logger.debug(
        f"random_smooth seed={seed} amplitude={amplitude} bandwidth={bandwidth} on {grid.shape}"
    )
    return ConnectionField(
        grid=grid,
        coefficients=coefficients,
        derivatives=derivatives,
        representation=representation,
        beta=beta,
        scenario="random_smooth",
        seed=seed,
    )


def _seed(params: Dict[str, str], ctx: ScenarioContext, default: int) -> int:
    seed = _int(params, "seed", default)
    return ctx.seed if ctx.seed is not None else seed


@register_scenario("random_smooth")
def _random_smooth(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    seed = _seed(params, ctx, 42)
    amplitude = _float(params, "amplitude", 1.0)
    bandwidth = _int(params, "bandwidth", 2)
    _reject_leftovers("random_smooth", params)
    return ScenarioSample(
        make_random_smooth(seed, amplitude, bandwidth, grid, ctx.representation, ctx.beta)
    )


@register_scenario("perturbed")
def _perturbed(grid: Grid, params: Dict[str, str], ctx: ScenarioContext) -> ScenarioSample:
    seed = _seed(params, ctx, 1)
    epsilon = _float(params, "epsilon", 0.01)
    bandwidth = _int(params, "bandwidth", 2)
    generators = _generators_from_params(grid, params, ctx)
    _reject_leftovers("perturbed", params)
    _, flat = make_pure_gauge(generators, grid, ctx.convention)
    noise = make_random_smooth(seed, abs(epsilon), bandwidth, grid, flat.representation)
    sign = 1.0 if epsilon >= 0 else -1.0
    connection = flat.plus(noise.scaled(sign))
    connection.scenario = "perturbed"
    connection.seed = seed
    return ScenarioSample(connection)


def sample_scenario(
    spec: str,
    grid: Grid,
    *,
    seed: Optional[int] = None,
    representation: str = "so3",
    beta: int = 1,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> ScenarioSample:
    """Run a registered generator; identical inputs give identical fields."""
    name, params = parse_scenario(spec)
    if name not in SCENARIOS:
        raise ScenarioError(f"Unknown scenario generator {name!r}; known: {sorted(SCENARIOS)}")
    ctx = ScenarioContext(representation=representation, beta=beta, convention=convention, seed=seed)
    logger.debug(f"Sampling scenario {name} with {params} on grid {grid.shape}")
    sample = SCENARIOS[name](grid, dict(params), ctx)
    sample.connection.scenario = spec.strip()
    return sample


def sample_connection(
    spec: str,
    grid: Grid,
    *,
    seed: Optional[int] = None,
    representation: str = "so3",
    beta: int = 1,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> ConnectionField:
    return sample_scenario(
        spec, grid, seed=seed, representation=representation, beta=beta, convention=convention
    ).connection


def sample_higgs(
    spec: str,
    grid: Grid,
    representation: str = "so3",
    beta: int = 1,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> MatrixField:
    """
    Higgs field in the connection's algebra.

    ``zero``, ``constant(c=[k,sigma,tau])`` or
    ``random_smooth(seed=7, amplitude=1, bandwidth=2)``.
    """
    name, params = parse_scenario(spec)
    if name == "zero":
        _reject_leftovers(name, params)
        coeffs = np.zeros(grid.shape + (3,))
        derivatives = {a: coeffs for a in grid.axes}
    elif name == "constant":
        triple = parse_triple(params.pop("c", "[0,0,0]"))
        _reject_leftovers(name, params)
        coeffs = np.broadcast_to(np.asarray(triple), grid.shape + (3,)).copy()
        derivatives = {a: np.zeros_like(coeffs) for a in grid.axes}
    elif name == "random_smooth":
        seed = _int(params, "seed", 7)
        amplitude = _float(params, "amplitude", 1.0)
        bandwidth = _int(params, "bandwidth", 2)
        _reject_leftovers(name, params)
        if not 1 <= bandwidth <= MAX_BANDWIDTH or not 0 <= amplitude <= MAX_AMPLITUDE or seed < 0:
            raise ScenarioError(f"Higgs parameters out of range: {spec!r}")
        rng = np.random.Generator(np.random.Philox(seed))
        coeffs, derivatives = trig_series(rng, grid, bandwidth, amplitude, 3)
    else:
        raise ScenarioError(f"Unknown Higgs generator {name!r}; use zero, constant or random_smooth")
    build = lambda c: from_coeffs(c, representation, beta, convention.prefactor)  # noqa: E731
    return MatrixField(grid, build(coeffs), {a: build(d) for a, d in derivatives.items()})
