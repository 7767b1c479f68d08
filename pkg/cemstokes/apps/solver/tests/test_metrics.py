import dataclasses

import numpy as np

from cemstokes.apps.basis.cem import compute_basis_table
from cemstokes.apps.solver.coarse import broken_pressure, solve_multiscale
from cemstokes.apps.solver.metrics import error_report, velocity_errors

from .base import BaseTest


class ErrorReportTest(BaseTest):
    def setUp(self):
        super(ErrorReportTest, self).setUp()
        self.ms = solve_multiscale(self.table, self.QH, self.forcing.f, self.operators)

    def test_record(self):
        metrics = error_report(self.reference, self.ms, self.forcing.f, self.operators)
        self.assertEqual(metrics['H'], 0.25)
        self.assertEqual(metrics['h'], 0.125)
        self.assertEqual(metrics['ell'], 3)
        self.assertEqual(metrics['k'], 1)
        self.assertEqual(metrics['n_ms'], 48)
        self.assertEqual(metrics['lambda_min_excluded'], self.aux.Lambda)
        for name in ('err_u_a', 'err_u_s', 'err_u_rel', 'err_p', 'err_p_rel', 'err_p_fluct',
                     'kappa_f_norm', 'residual_norm'):
            self.assertGreaterEqual(metrics[name], 0.0, name)
        self.assertLessEqual(metrics['err_p_fluct'], metrics['err_p'] + 1e-14)

    def test_exact_solution_has_no_error(self):
        exact = dataclasses.replace(self.ms, u=self.reference.u,
                                    p=broken_pressure(self.QH, self.reference.p))
        metrics = error_report(self.reference, exact)
        for name in ('err_u_a', 'err_u_s', 'err_u_rel', 'err_p', 'err_p_rel', 'err_p_fluct'):
            self.assertEqual(metrics[name], 0.0, name)
        self.assertNotIn('residual_norm', metrics)

    def test_triangle_inequality(self):
        table = compute_basis_table(self.aux, 0, operators=self.operators)
        third = solve_multiscale(table, self.QH, self.forcing.f, self.operators).u
        first, second = self.reference.u, self.ms.u
        for norm in range(2):
            direct = velocity_errors(self.space, self.pou, first, third)[norm]
            detour = (velocity_errors(self.space, self.pou, first, second)[norm]
                      + velocity_errors(self.space, self.pou, second, third)[norm])
            self.assertLessEqual(direct, detour + 1e-14)

    def test_global_k_is_labelled(self):
        table = compute_basis_table(self.aux, None, operators=self.operators)
        ms = solve_multiscale(table, self.QH, self.forcing.f, self.operators)
        self.assertEqual(error_report(self.reference, ms)['k'], 'global')

    def test_localized_solutions_approach_the_global_one(self):
        table = compute_basis_table(self.aux, None, operators=self.operators)
        u_glo = solve_multiscale(table, self.QH, self.forcing.f, self.operators).u
        distances = []
        for k in range(4):
            table = compute_basis_table(self.aux, k, operators=self.operators)
            u = solve_multiscale(table, self.QH, self.forcing.f, self.operators).u
            distances.append(self.a_norm(u - u_glo))

        self.assertLess(distances[1], distances[0])
        self.assertLessEqual(distances[3], 1e-8 * self.a_norm(u_glo))


class OracleTest(BaseTest):
    nx = 16
    Nx = 2

    def test_saturated_layers_reproduce_the_global_basis(self):
        local = solve_multiscale(self.table, self.QH, self.forcing.f, self.operators)
        table = compute_basis_table(self.aux, None, operators=self.operators)
        glo = solve_multiscale(table, self.QH, self.forcing.f, self.operators)
        np.testing.assert_allclose(local.coefficients, glo.coefficients, atol=1e-8)
        self.assertLessEqual(self.a_norm(local.u - glo.u), 1e-8)
