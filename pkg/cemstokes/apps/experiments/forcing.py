"""
Body forces for the experiments, built symbolically and evaluated with numpy
at the quadrature points.
"""
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from .exceptions import ConfigError

x, y = sympy.symbols('x y', real=True)

NAMES = {'x': x, 'y': y, 'pi': sympy.pi, 'sin': sympy.sin, 'cos': sympy.cos,
         'pow': sympy.Pow}

_TOKEN = re.compile(r'\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/(),]))')


@dataclass(frozen=True)
class Forcing:
    """ f(x, y) -> (fx, fy), with the exact solution when it is known """
    name: str
    f: Callable
    velocity: Optional[Callable] = None
    gradient: Optional[Callable] = None
    pressure: Optional[Callable] = None


def _numeric(expression):
    function = sympy.lambdify((x, y), expression, 'numpy')

    def evaluate(X, Y):
        return np.broadcast_to(np.asarray(function(X, Y), dtype=float), np.shape(X))
    return evaluate


def _vector(components):
    fx, fy = (_numeric(component) for component in components)
    return lambda X, Y: (fx(X, Y), fy(X, Y))


def _matrix(entries):
    """ callable returning (..., 2, 2) indexed [component, direction] """
    functions = [[_numeric(entry) for entry in row] for row in entries]

    def evaluate(X, Y):
        return np.stack([np.stack([f(X, Y) for f in row], axis=-1)
                         for row in functions], axis=-2)
    return evaluate


def manufactured():
    """ u = curl(sin^2(pi x) sin^2(pi y)), p = sin(2 pi x) cos(2 pi y),
    f = -laplace(u) + grad(p) """
    stream = sympy.sin(sympy.pi * x) ** 2 * sympy.sin(sympy.pi * y) ** 2
    u = (sympy.diff(stream, y), -sympy.diff(stream, x))
    p = sympy.sin(2 * sympy.pi * x) * sympy.cos(2 * sympy.pi * y)
    f = [-(sympy.diff(c, x, 2) + sympy.diff(c, y, 2)) + sympy.diff(p, d)
         for c, d in zip(u, (x, y))]

    gradient = [[sympy.diff(c, d) for d in (x, y)] for c in u]
    return Forcing(name='manufactured', f=_vector(f), velocity=_vector(u),
                   gradient=_matrix(gradient), pressure=_numeric(p))


def constant(value):
    fx, fy = (float(component) for component in value)
    return Forcing(name='constant', f=lambda X, Y: (np.full(np.shape(X), fx),
                                                    np.full(np.shape(X), fy)))


def parse_component(text):
    """ parses one component of an expression forcing

    The grammar is numbers, x, y, pi, + - * / **, parentheses, sin, cos and
    pow; anything else raises ConfigError.
    """
    position = 0
    text = str(text)
    while position < len(text.rstrip()):
        match = _TOKEN.match(text, position)
        if not match or match.end() == position:
            raise ConfigError('unexpected character in forcing expression',
                              expression=text, position=position)
        name = match.group(2)
        if name is not None and name not in NAMES:
            raise ConfigError('unknown name in forcing expression',
                              expression=text, name=name)
        position = match.end()

    try:
        expression = parse_expr(text, local_dict=dict(NAMES), global_dict={
            'Integer': sympy.Integer, 'Float': sympy.Float, 'Rational': sympy.Rational,
            'Symbol': sympy.Symbol,
        }, transformations=standard_transformations)
    except (SyntaxError, TypeError, ValueError) as error:
        raise ConfigError('forcing expression does not parse',
                          expression=text, reason=str(error))

    expression = sympy.sympify(expression)
    if not expression.free_symbols <= {x, y}:
        raise ConfigError('forcing expression may only use x and y', expression=text)
    return expression


def expression(components):
    return Forcing(name='expression',
                   f=_vector([parse_component(text) for text in components]))


def zero():
    return constant((0.0, 0.0))


def build_forcing(config):
    """ Forcing from the validated `forcing` section of an experiment config """
    kind = config['kind']
    if kind == 'manufactured':
        return manufactured()
    if kind == 'constant':
        return constant(config['value'])
    if kind == 'expression':
        return expression(config['value'])
    raise ConfigError('unknown forcing kind', kind=kind)
