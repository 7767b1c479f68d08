from cemstokes.apps.experiments.command import ExperimentCommand, write_csv
from cemstokes.apps.experiments.pipeline import convergence_rates, pressure_constant

COLUMNS = ['Nx', 'H', 'k', 'n_ms', 'err_u_a', 'err_u_rel', 'err_u_s', 'err_p',
           'err_p_rel', 'err_p_fluct', 'lambda_min_excluded', 'gamma', 'rate',
           'p_constant_ratio']


class Command(ExperimentCommand):
    help = 'Sweeps the coarse levels and oversampling layers of an experiment.'
    outputs = ('convergence',)

    def run(self, experiment):
        config = experiment.config
        rows = experiment.sweep(concurrent=self.concurrent)
        for (Nx, _), row in zip(config.points(), rows):
            row['Nx'] = Nx

        rates = convergence_rates(rows, auto=config.k == 'auto')
        C, ratios = pressure_constant(rows)
        for row, rate, ratio in zip(rows, rates, ratios):
            row['rate'] = rate
            row['p_constant_ratio'] = ratio

        columns = COLUMNS + (['err_glo_a'] if config.compare_global else [])
        self.stdout.write('pressure constant C = {:.6g}'.format(C))
        if config.output('convergence'):
            write_csv(self.path(config.output('convergence')), rows, columns)
            return [config.output('convergence')]
        return []
