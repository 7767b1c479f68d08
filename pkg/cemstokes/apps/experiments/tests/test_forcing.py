import numpy as np
from django.test import SimpleTestCase

from cemstokes.apps.experiments.exceptions import ConfigError
from cemstokes.apps.experiments.forcing import (
    build_forcing, constant, expression, manufactured, parse_component
)


class ForcingTest(SimpleTestCase):
    def setUp(self):
        self.x = np.array([[0.1, 0.25], [0.5, 0.9]])
        self.y = np.array([[0.3, 0.75], [0.5, 0.2]])

    def test_manufactured_velocity_is_divergence_free(self):
        forcing = manufactured()
        gradient = forcing.gradient(self.x, self.y)
        self.assertEqual(gradient.shape, (2, 2, 2, 2))
        np.testing.assert_allclose(gradient[..., 0, 0] + gradient[..., 1, 1], 0.0, atol=1e-12)

    def test_manufactured_velocity_vanishes_on_the_boundary(self):
        forcing = manufactured()
        side = np.linspace(0, 1, 7)
        for x, y in ((side, 0 * side), (side, 0 * side + 1), (0 * side, side), (0 * side + 1, side)):
            ux, uy = forcing.velocity(x, y)
            np.testing.assert_allclose(ux, 0.0, atol=1e-14)
            np.testing.assert_allclose(uy, 0.0, atol=1e-14)

    def test_manufactured_force_by_hand_at_a_point(self):
        # ux = pi sin^2(pi x) sin(2 pi y), uy = -pi sin(2 pi x) sin^2(pi y)
        fx, fy = manufactured().f(np.array(0.25), np.array(0.25))
        # at (1/4, 1/4): -lap ux = 2 pi^3, dp/dx = 2 pi cos(pi/2) cos(pi/2) = 0
        self.assertAlmostEqual(float(fx), 2 * np.pi ** 3, places=10)
        # -lap uy = -2 pi^3, dp/dy = -2 pi sin(pi/2) sin(pi/2) = -2 pi
        self.assertAlmostEqual(float(fy), -2 * np.pi ** 3 - 2 * np.pi, places=10)

    def test_pressure_has_zero_mean(self):
        points = (np.arange(64) + 0.5) / 64
        X, Y = np.meshgrid(points, points)
        self.assertAlmostEqual(float(manufactured().pressure(X, Y).mean()), 0.0, places=12)

    def test_constant(self):
        fx, fy = constant((2, -1)).f(self.x, self.y)
        np.testing.assert_array_equal(fx, 2.0)
        np.testing.assert_array_equal(fy, -1.0)
        self.assertEqual(fx.shape, self.x.shape)

    def test_expression(self):
        fx, fy = expression(['pow(x, 2) + 3', '2']).f(self.x, self.y)
        np.testing.assert_allclose(fx, self.x ** 2 + 3)
        np.testing.assert_array_equal(fy, 2.0)
        self.assertEqual(fy.shape, self.x.shape)

    def test_rejected_expressions(self):
        for text in ('exp(x)', 'x; y', 'z + 1', 'x.real', 'lambda: 1', 'x +'):
            with self.assertRaises(ConfigError, msg=text):
                parse_component(text)

    def test_selector(self):
        self.assertEqual(build_forcing({'kind': 'manufactured'}).name, 'manufactured')
        self.assertEqual(build_forcing({'kind': 'constant', 'value': [1, 0]}).name, 'constant')
        with self.assertRaises(ConfigError):
            build_forcing({'kind': 'tabulated'})
