from cemstokes.apps.core.renderers import write_json
from cemstokes.apps.experiments.command import ExperimentCommand, write_csv
from cemstokes.apps.experiments.pipeline import (
    eigen_rows, field_dump, inequality_checks
)


class Command(ExperimentCommand):
    help = 'Solves the first sweep point of an experiment against the fine reference.'
    outputs = ('metrics', 'fields', 'eigen')

    def run(self, experiment):
        config = experiment.config
        Nx, k = config.points()[0]

        experiment.prepare()
        ms, metrics = experiment.solve(Nx, k)
        level = experiment.level(Nx)
        metrics['inequality_violations'] = inequality_checks(level, config.seed)

        written = []
        if config.output('metrics'):
            write_json(self.path(config.output('metrics')), metrics, 'metrics')
            written.append(config.output('metrics'))
        if config.output('fields'):
            write_json(self.path(config.output('fields')), field_dump(experiment, ms),
                       'fields')
            written.append(config.output('fields'))
        if config.output('eigen'):
            write_csv(self.path(config.output('eigen')), eigen_rows(level))
            written.append(config.output('eigen'))
        return written
